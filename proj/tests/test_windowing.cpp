#include <doctest.h>

#include "windfc/common.hpp"
#include "windfc/errors.hpp"
#include "windfc/windowing.hpp"

#include <random>

using namespace windfc;
using namespace windfc::windowing;

namespace {

FeatureTable random_table(std::size_t rows, int features, std::uint64_t seed) {
    FeatureTable table;
    for (int f = 0; f < features; ++f) table.names.push_back("f" + std::to_string(f));
    table.values.resize(static_cast<Eigen::Index>(rows), features);
    std::mt19937_64 rng(seed);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int f = 0; f < features; ++f) {
            table.values(static_cast<Eigen::Index>(r), f) = uniform_range(rng, -4.0, 9.0);
        }
    }
    return table;
}

WindowSpec spec_for(const FeatureTable& table, int P, int H) {
    WindowSpec spec;
    spec.past_steps = P;
    spec.horizon_steps = H;
    spec.input_features = table.names;
    spec.target_feature = table.names.front();
    return spec;
}

} // namespace

TEST_CASE("split points floor at 0.8 and 0.9 of the row count") {
    SUBCASE("n=100") {
        auto cuts = split_points(100);
        CHECK(cuts.train_end == 80);
        CHECK(cuts.val_end == 90);
    }
    SUBCASE("n=101 sends the remainder to test") {
        auto cuts = split_points(101);
        CHECK(cuts.train_end == 80);
        CHECK(cuts.val_end == 90); // 80/10/11
    }
    SUBCASE("the station row count splits 93003/11625/11626") {
        auto cuts = split_points(116254);
        CHECK(cuts.train_end == 93003);
        CHECK(cuts.val_end - cuts.train_end == 11625);
        CHECK(116254 - cuts.val_end == 11626);
    }
}

TEST_CASE("split_series validates length and keeps segments contiguous") {
    auto table = random_table(100, 2, 1);
    auto spec = spec_for(table, 3, 1);
    auto segs = split_series(100, spec);
    CHECK(segs[0] == std::pair<std::size_t, std::size_t>{0, 80});
    CHECK(segs[1] == std::pair<std::size_t, std::size_t>{80, 90});
    CHECK(segs[2] == std::pair<std::size_t, std::size_t>{90, 100});

    WindowSpec big = spec_for(table, 18, 1);
    try {
        split_series(100, big); // needs 10*(18+1) = 190 rows
        FAIL("expected an error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("190") != std::string::npos);
    }
}

TEST_CASE("window count formula L - P - H + 1") {
    auto table = random_table(200, 2, 2);
    SUBCASE("L=100, P=18, H=1 gives 82") {
        auto spec = spec_for(table, 18, 1);
        CHECK(make_windows(table, 0, 100, spec).size() == 82);
    }
    SUBCASE("exact boundary gives one sample") {
        auto spec = spec_for(table, 18, 1);
        CHECK(make_windows(table, 0, 19, spec).size() == 1);
    }
    SUBCASE("below the boundary gives zero samples, not an error") {
        auto spec = spec_for(table, 18, 1);
        CHECK(make_windows(table, 0, 18, spec).empty());
    }
    SUBCASE("property over random L, P, H") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const int H = 1 + static_cast<int>(bounded_rand(rng, 6));
            const int P = H + static_cast<int>(bounded_rand(rng, 12));
            const std::size_t L =
                static_cast<std::size_t>(P + H) + bounded_rand(rng, 60);
            auto spec = spec_for(table, P, H);
            CHECK(make_windows(table, 0, L, spec).size() ==
                  L - static_cast<std::size_t>(P) - static_cast<std::size_t>(H) + 1);
        }
    }
}

TEST_CASE("sample geometry: inputs end P steps back, target lands H ahead") {
    auto table = random_table(60, 2, 3);
    auto spec = spec_for(table, 4, 2);
    auto samples = make_windows(table, 10, 40, spec);
    REQUIRE(!samples.empty());
    const auto& s = samples.front();
    CHECK(s.input.rows() == 4);
    CHECK(s.input.cols() == 2);
    // first sample: inputs are rows [10, 14), target at row 10 + 4 + 2 - 1
    for (int t = 0; t < 4; ++t) {
        CHECK(s.input(t, 0) == table.values(10 + t, 0));
        CHECK(s.input(t, 1) == table.values(10 + t, 1));
    }
    CHECK(s.t_index == 15);
    CHECK(s.target == table.values(15, 0));
}

TEST_CASE("window spec validation enforces P >= H >= 1") {
    auto table = random_table(100, 1, 4);
    CHECK_THROWS_AS(spec_for(table, 1, 18).validate(), usage_error);
    CHECK_THROWS_AS(spec_for(table, 5, 0).validate(), usage_error);
    CHECK_NOTHROW(spec_for(table, 5, 5).validate());
}

TEST_CASE("no sample straddles a split boundary") {
    auto table = random_table(400, 3, 6);
    auto spec = spec_for(table, 12, 3);
    auto set = build_windowed(table, spec);
    const auto cuts = split_points(400);

    std::int64_t max_train_target = -1;
    for (const auto& s : set.train) max_train_target = std::max(max_train_target, s.t_index);
    CHECK(max_train_target < static_cast<std::int64_t>(cuts.train_end));

    std::int64_t min_val_target = 1 << 30, max_val_target = -1;
    for (const auto& s : set.val) {
        min_val_target = std::min(min_val_target, s.t_index);
        max_val_target = std::max(max_val_target, s.t_index);
    }
    CHECK(min_val_target >= static_cast<std::int64_t>(cuts.train_end));
    CHECK(max_val_target < static_cast<std::int64_t>(cuts.val_end));

    std::int64_t min_test_target = 1 << 30;
    for (const auto& s : set.test) min_test_target = std::min(min_test_target, s.t_index);
    CHECK(min_test_target >= static_cast<std::int64_t>(cuts.val_end));

    // inputs too: the earliest val/test input row starts inside its own segment
    CHECK(set.val.front().t_index - (12 + 3 - 1) >= static_cast<std::int64_t>(cuts.train_end));
    CHECK(set.test.front().t_index - (12 + 3 - 1) >= static_cast<std::int64_t>(cuts.val_end));
}

TEST_CASE("normalizer round trip and shift/scale identities") {
    auto table = random_table(300, 2, 7);
    auto spec = spec_for(table, 6, 1);
    auto set = build_windowed(table, spec);
    const auto& nz = set.normalizer;

    SUBCASE("invert(apply(x)) = x to 1e-12 relative") {
        std::mt19937_64 rng(8);
        for (int i = 0; i < 200; ++i) {
            const double x = uniform_range(rng, -50.0, 50.0);
            CHECK(nz.invert_feature(0, nz.apply_feature(0, x)) ==
                  doctest::Approx(x).epsilon(1e-12));
            CHECK(nz.invert_target(nz.apply_target(x)) == doctest::Approx(x).epsilon(1e-12));
        }
    }

    SUBCASE("shifting a column leaves z-scores unchanged") {
        FeatureTable shifted = table;
        shifted.values.col(1).array() += 37.5;
        auto set2 = build_windowed(shifted, spec);
        for (std::size_t i = 0; i < set.train.size(); ++i) {
            for (int t = 0; t < 6; ++t) {
                CHECK(set2.normalizer.apply_feature(1, set2.train[i].input(t, 1)) ==
                      doctest::Approx(nz.apply_feature(1, set.train[i].input(t, 1))).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("scaling a column yields bit-equal normalized training views") {
    auto table = random_table(500, 3, 9);
    auto spec = spec_for(table, 8, 2);
    auto base = build_windowed(table, spec);

    FeatureTable scaled = table;
    const double c = 1.7; // deliberately not a power of two
    for (Eigen::Index r = 0; r < scaled.values.rows(); ++r) {
        scaled.values(r, 2) = c * scaled.values(r, 2);
    }
    auto other = build_windowed(scaled, spec);

    for (int split = 0; split < 3; ++split) {
        Eigen::MatrixXd Xa, Xb;
        Eigen::VectorXd ya, yb;
        flattened_normalized(base, split, Xa, ya);
        flattened_normalized(other, split, Xb, yb);
        REQUIRE(Xa.rows() == Xb.rows());
        CHECK(Xa == Xb); // bit-equal
        CHECK(ya == yb);
    }
}

TEST_CASE("scaling the target column yields bit-equal normalized targets") {
    auto table = random_table(400, 2, 10);
    auto spec = spec_for(table, 5, 1); // target is column 0, also an input
    auto base = build_windowed(table, spec);

    FeatureTable scaled = table;
    const double c = 1.33193;
    for (Eigen::Index r = 0; r < scaled.values.rows(); ++r) {
        scaled.values(r, 0) = c * scaled.values(r, 0);
    }
    auto other = build_windowed(scaled, spec);

    Eigen::MatrixXd Xa, Xb;
    Eigen::VectorXd ya, yb;
    flattened_normalized(base, 0, Xa, ya);
    flattened_normalized(other, 0, Xb, yb);
    CHECK(Xa == Xb);
    CHECK(ya == yb);
}

TEST_CASE("zero-variance feature errors name the feature") {
    auto table = random_table(300, 2, 11);
    table.values.col(1).setConstant(3.0);
    auto spec = spec_for(table, 4, 1);
    try {
        build_windowed(table, spec);
        FAIL("expected an error");
    } catch (const numeric_error& e) {
        CHECK(std::string(e.what()).find("f1") != std::string::npos);
    }
    // tolerant mode flags instead
    auto set = build_windowed(table, spec, /*tolerant=*/true);
    CHECK(set.normalizer.degenerate_features == std::vector<int>{1});
}

TEST_CASE("flattened layout is row-major over (step, feature)") {
    auto table = random_table(200, 2, 12);
    auto spec = spec_for(table, 3, 1);
    auto set = build_windowed(table, spec);
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    flattened_normalized(set, 0, X, y);
    REQUIRE(X.cols() == 6);
    const auto& s = set.train.front();
    const auto& nz = set.normalizer;
    for (int t = 0; t < 3; ++t) {
        for (int f = 0; f < 2; ++f) {
            CHECK(X(0, t * 2 + f) == quantize(nz.apply_feature(f, s.input(t, f))));
        }
    }
}

TEST_CASE("sample CSV export carries flattened inputs, target, t_index") {
    auto table = random_table(200, 2, 13);
    auto spec = spec_for(table, 3, 1);
    auto set = build_windowed(table, spec);
    std::ostringstream out;
    write_samples_csv(set, 2, out);
    const std::string text = out.str();
    CHECK(text.find("f0_t-2,f1_t-2,f0_t-1,f1_t-1,f0_t0,f1_t0,target,t_index") == 0);
    // one header plus one line per sample
    std::size_t lines = 0;
    for (char ch : text) lines += (ch == '\n') ? 1 : 0;
    CHECK(lines == set.test.size() + 1);
}

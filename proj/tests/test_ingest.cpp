#include <doctest.h>

#include "windfc/common.hpp"
#include "windfc/errors.hpp"
#include "windfc/ingest.hpp"

#include <random>
#include <sstream>

using namespace windfc;
using namespace windfc::ingest;

namespace {

const char* kNdbcSample =
    "#YY  MM DD hh mm WDIR WSPD GST  WVHT   DPD   APD MWD   PRES  ATMP  WTMP  DEWP  VIS  TIDE\n"
    "#yr  mo dy hr mn degT m/s  m/s     m   sec   sec degT   hPa  degC  degC  degC  nmi    ft\n"
    "2021 07 25 22 30 120  5.0  6.2 99.00 99.00 99.00 999 1012.3  28.1  29.0  24.5 99.0 99.00\n"
    "2021 07 25 22 40 125  5.5  6.8 99.00 99.00 99.00 999 1012.1  28.0  29.0 999.0 99.0 99.00\n"
    "2021 07 25 22 50 999  99.0 7.1 99.00 99.00 99.00 999 9999.0  28.2  29.1  24.4 99.0 99.00\n";

std::vector<MetRecord> parse_text(const char* text) {
    std::istringstream in(text);
    return parse_ndbc(in);
}

MetRecord make_rec(minute_t t, double wspd) {
    MetRecord rec;
    rec.timestamp = t;
    rec.values = {100.0, wspd, wspd * 1.1, 1010.0, 25.0, 27.0, 20.0};
    rec.flags.fill(FieldFlag::observed);
    return rec;
}

} // namespace

TEST_CASE("NDBC text: header skipped, fields mapped, sentinels flagged") {
    auto recs = parse_text(kNdbcSample);
    REQUIRE(recs.size() == 3); // two '#' lines yield no records

    CHECK(recs[0].timestamp == minutes_from_civil(2021, 7, 25, 22, 30));
    CHECK(recs[0].wdir() == 120.0);
    CHECK(recs[0].wspd() == 5.0);
    CHECK(recs[0].gst() == 6.2);
    CHECK(recs[0].pres() == 1012.3);
    CHECK(recs[0].atmp() == 28.1);
    CHECK(recs[0].wtmp() == 29.0);
    CHECK(recs[0].dewp() == 24.5);
    for (int f = 0; f < kFieldCount; ++f) CHECK(recs[0].flags[f] == FieldFlag::observed);

    // DEWP 999.0 is the missing sentinel
    CHECK(recs[1].flags[field_index("DEWP")] == FieldFlag::missing);
    CHECK(recs[1].flags[field_index("ATMP")] == FieldFlag::observed);

    // WDIR 999, WSPD 99.0, PRES 9999.0 all sentinel-coded
    CHECK(recs[2].flags[field_index("WDIR")] == FieldFlag::missing);
    CHECK(recs[2].flags[field_index("WSPD")] == FieldFlag::missing);
    CHECK(recs[2].flags[field_index("PRES")] == FieldFlag::missing);
    CHECK(recs[2].flags[field_index("GST")] == FieldFlag::observed);
}

TEST_CASE("empty input parses to an empty list") {
    CHECK(parse_text("").empty());
    CHECK(parse_text("#YY MM DD hh mm WSPD\n#yr mo dy hr mn m/s\n").empty());
}

TEST_CASE("malformed lines name the line number") {
    const char* bad =
        "#YY MM DD hh mm WSPD\n"
        "2021 07 25 22 30 5.0\n"
        "2021 07 25 22 40 banana\n";
    try {
        parse_text(bad);
        FAIL("expected a parse error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("wdir 360 wraps to 0; negative speeds are rejected") {
    auto recs = parse_text("#YY MM DD hh mm WDIR WSPD\n2021 01 01 00 00 360 4.0\n");
    CHECK(recs[0].wdir() == 0.0);
    CHECK_THROWS_AS(parse_text("#YY MM DD hh mm WSPD\n2021 01 01 00 00 -3.0\n"), data_error);
}

TEST_CASE("repair: single missing slot is linearly interpolated at the midpoint") {
    std::vector<MetRecord> raw = {make_rec(0, 4.0), make_rec(10, 5.0), make_rec(30, 7.0)};
    auto ds = repair(raw, 10);
    REQUIRE(ds.records.size() == 4);
    CHECK(ds.records[2].timestamp == 20);
    CHECK(ds.records[2].wspd() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(ds.records[2].flags[field_index("WSPD")] == FieldFlag::imputed);

    std::size_t inserted = 0;
    for (const auto& ev : ds.repair_log) {
        if (ev.kind == RepairEvent::Kind::row_inserted) ++inserted;
    }
    CHECK(inserted == 1);
}

TEST_CASE("repair: already-complete series is untouched") {
    std::vector<MetRecord> raw;
    for (int i = 0; i < 20; ++i) raw.push_back(make_rec(i * 10, 3.0 + i));
    auto ds = repair(raw, 10);
    CHECK(ds.records.size() == 20);
    CHECK(ds.repair_log.empty());
    for (int i = 0; i < 20; ++i) CHECK(ds.records[i].wspd() == 3.0 + i);
}

TEST_CASE("repair: gaps longer than 6 slots forward-fill") {
    std::vector<MetRecord> raw = {make_rec(0, 4.0), make_rec(10, 5.0), make_rec(90, 9.0)};
    auto ds = repair(raw, 10); // 7 missing slots between 10 and 90
    REQUIRE(ds.records.size() == 10);
    for (int i = 2; i < 9; ++i) {
        CHECK(ds.records[i].wspd() == 5.0);
        CHECK(ds.records[i].flags[field_index("WSPD")] == FieldFlag::imputed);
    }
    bool saw_ffill = false;
    for (const auto& ev : ds.repair_log) {
        if (ev.kind == RepairEvent::Kind::value_imputed &&
            ev.method == RepairEvent::Method::forward_fill) {
            saw_ffill = true;
        }
    }
    CHECK(saw_ffill);
}

TEST_CASE("repair: duplicates keep the first occurrence and are logged") {
    std::vector<MetRecord> raw = {make_rec(0, 4.0), make_rec(10, 5.0), make_rec(10, 50.0),
                                  make_rec(20, 6.0)};
    auto ds = repair(raw, 10);
    REQUIRE(ds.records.size() == 3);
    CHECK(ds.records[1].wspd() == 5.0);
    std::size_t dups = 0;
    for (const auto& ev : ds.repair_log) {
        if (ev.kind == RepairEvent::Kind::duplicate_dropped) ++dups;
    }
    CHECK(dups == 1);
}

TEST_CASE("repair errors") {
    CHECK_THROWS_AS(repair({make_rec(0, 1.0)}, 10), data_error);
    CHECK_THROWS_AS(repair({}, 10), data_error);
    // off-grid timestamp cannot be reconciled with the cadence
    CHECK_THROWS_AS(repair({make_rec(0, 1.0), make_rec(15, 2.0)}, 10), data_error);
}

TEST_CASE("repair invariants over a randomized gappy series") {
    std::mt19937_64 rng(23);
    std::vector<MetRecord> raw;
    minute_t t = 0;
    for (int i = 0; i < 400; ++i) {
        if (uniform01(rng) < 0.85) {
            auto rec = make_rec(t, uniform_range(rng, 1.0, 12.0));
            if (uniform01(rng) < 0.1) rec.flags[field_index("DEWP")] = FieldFlag::missing;
            raw.push_back(rec);
        }
        t += 10;
    }
    auto ds = repair(raw, 10);

    SUBCASE("constant spacing and the count formula") {
        for (std::size_t i = 1; i < ds.records.size(); ++i) {
            REQUIRE(ds.records[i].timestamp - ds.records[i - 1].timestamp == 10);
        }
        const auto span = ds.records.back().timestamp - ds.records.front().timestamp;
        CHECK(ds.records.size() == static_cast<std::size_t>(span / 10) + 1);
    }

    SUBCASE("repair is idempotent") {
        auto again = repair(ds.records, 10);
        REQUIRE(again.records.size() == ds.records.size());
        CHECK(again.repair_log.empty());
        for (std::size_t i = 0; i < ds.records.size(); ++i) {
            for (int f = 0; f < kFieldCount; ++f) {
                CHECK(again.records[i].values[f] == ds.records[i].values[f]);
                CHECK(again.records[i].flags[f] == ds.records[i].flags[f]);
            }
        }
    }

    SUBCASE("interpolated values stay inside their observed bracket") {
        const int f = field_index("WSPD");
        for (std::size_t i = 0; i < ds.records.size(); ++i) {
            if (ds.records[i].flags[f] != FieldFlag::imputed) continue;
            std::size_t lo = i, hi = i;
            while (lo > 0 && ds.records[lo].flags[f] != FieldFlag::observed) --lo;
            while (hi + 1 < ds.records.size() && ds.records[hi].flags[f] != FieldFlag::observed) ++hi;
            if (ds.records[lo].flags[f] != FieldFlag::observed ||
                ds.records[hi].flags[f] != FieldFlag::observed) {
                continue; // edge runs use nearest fill
            }
            const double a = std::min(ds.records[lo].values[f], ds.records[hi].values[f]);
            const double b = std::max(ds.records[lo].values[f], ds.records[hi].values[f]);
            CHECK(ds.records[i].values[f] >= a - 1e-12);
            CHECK(ds.records[i].values[f] <= b + 1e-12);
        }
    }

    SUBCASE("summary counts agree with an independent flag scan") {
        const auto s = summarize(ds);
        std::size_t imputed = 0;
        for (const auto& rec : ds.records) {
            for (int f = 0; f < kFieldCount; ++f) {
                if (rec.flags[f] == FieldFlag::imputed) ++imputed;
            }
        }
        CHECK(s.values_imputed == imputed);
        std::size_t log_imputed = 0;
        for (const auto& ev : ds.repair_log) {
            if (ev.kind == RepairEvent::Kind::value_imputed) ++log_imputed;
        }
        CHECK(log_imputed == imputed);
        for (int f = 0; f < kFieldCount; ++f) {
            CHECK(s.per_field[f].observed + s.per_field[f].imputed + s.per_field[f].missing ==
                  ds.records.size());
        }
    }
}

TEST_CASE("summary fractions") {
    std::vector<MetRecord> raw;
    for (int i = 0; i < 100; ++i) {
        if (i == 50) continue; // one hole
        raw.push_back(make_rec(i * 10, 5.0));
    }
    auto ds = repair(raw, 10);
    auto s = summarize(ds);
    CHECK(s.rows == 100);
    CHECK(s.rows_inserted == 1);
    CHECK(s.row_imputed_fraction() == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("CSV round trip is bit-exact for observed values") {
    std::mt19937_64 rng(31);
    std::vector<MetRecord> raw;
    for (int i = 0; i < 50; ++i) {
        auto rec = make_rec(i * 10, uniform_range(rng, 0.0, 30.0));
        rec.values[3] = uniform_range(rng, 980.0, 1040.0);
        rec.values[4] = uniform_range(rng, -5.0, 35.0);
        raw.push_back(rec);
    }
    auto ds = repair(raw, 10, "roundtrip");

    std::ostringstream out;
    write_csv(ds, out);
    std::istringstream in(out.str());
    auto parsed = parse_csv(in);
    auto ds2 = repair(parsed, 10, "roundtrip");

    REQUIRE(ds2.records.size() == ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        CHECK(ds2.records[i].timestamp == ds.records[i].timestamp);
        for (int f = 0; f < kFieldCount; ++f) {
            CHECK(ds2.records[i].values[f] == ds.records[i].values[f]); // bit-exact
            CHECK(ds2.records[i].flags[f] == ds.records[i].flags[f]);
        }
    }
}

TEST_CASE("CSV with a timestamp column and flags reads back") {
    const char* csv =
        "timestamp,WSPD,GST,WSPD_flag\n"
        "2021-07-25T22:30,5.0,6.0,observed\n"
        "2021-07-25T22:40,5.5,6.5,imputed\n";
    std::istringstream in(csv);
    auto recs = parse_csv(in);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].flags[field_index("WSPD")] == FieldFlag::observed);
    CHECK(recs[1].flags[field_index("WSPD")] == FieldFlag::imputed);
    CHECK(recs[1].wspd() == 5.5);
    CHECK(recs[0].flags[field_index("PRES")] == FieldFlag::missing); // absent column
}

TEST_CASE("repair log serializes as JSON lines") {
    std::vector<MetRecord> raw = {make_rec(0, 4.0), make_rec(20, 6.0)};
    auto ds = repair(raw, 10);
    std::ostringstream out;
    write_repair_log_jsonl(ds, out);
    const std::string text = out.str();
    CHECK(text.find("\"type\":\"row_inserted\"") != std::string::npos);
    CHECK(text.find("\"method\":\"linear\"") != std::string::npos);
}

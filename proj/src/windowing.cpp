#include "windfc/windowing.hpp"

#include "windfc/errors.hpp"

#include <cmath>
#include <ostream>

namespace windfc::windowing {

void WindowSpec::validate() const {
    if (horizon_steps < 1 || past_steps < horizon_steps) {
        throw usage_error("window spec: need past_steps >= horizon_steps >= 1, got P=" +
                          std::to_string(past_steps) + " H=" + std::to_string(horizon_steps));
    }
    if (input_features.empty()) throw usage_error("window spec: no input features");
    if (target_feature.empty()) throw usage_error("window spec: no target feature");
}

int FeatureTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

FeatureTable table_from_series(const ingest::SeriesDataset& ds,
                               const std::vector<std::string>& names) {
    FeatureTable table;
    table.names = names;
    const std::size_t n = ds.records.size();
    table.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(names.size()));
    for (std::size_t c = 0; c < names.size(); ++c) {
        const int f = ingest::field_index(names[c]);
        if (f < 0) throw data_error("unknown met field '" + names[c] + "'");
        for (std::size_t r = 0; r < n; ++r) {
            if (ds.records[r].flags[f] == FieldFlag::missing) {
                throw data_error("field " + names[c] + " is missing at " +
                                 format_timestamp(ds.records[r].timestamp) +
                                 "; repair the series first");
            }
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                ds.records[r].values[f];
        }
    }
    return table;
}

SplitPoints split_points(std::size_t n) {
    return SplitPoints{n * 8 / 10, n * 9 / 10};
}

std::array<std::pair<std::size_t, std::size_t>, 3> split_series(std::size_t n_rows,
                                                                const WindowSpec& spec) {
    spec.validate();
    const std::size_t window = static_cast<std::size_t>(spec.past_steps + spec.horizon_steps);
    const std::size_t min_rows = 10 * window;
    if (n_rows < min_rows) {
        throw data_error("series too short: " + std::to_string(n_rows) + " rows, need at least " +
                         std::to_string(min_rows) + " for P=" + std::to_string(spec.past_steps) +
                         " H=" + std::to_string(spec.horizon_steps));
    }
    const SplitPoints cuts = split_points(n_rows);
    return {{{0, cuts.train_end}, {cuts.train_end, cuts.val_end}, {cuts.val_end, n_rows}}};
}

std::vector<WindowedSample> make_windows(const FeatureTable& table, std::size_t seg_begin,
                                         std::size_t seg_end, const WindowSpec& spec) {
    spec.validate();
    std::vector<int> cols;
    cols.reserve(spec.input_features.size());
    for (const auto& name : spec.input_features) {
        const int c = table.column(name);
        if (c < 0) throw data_error("input feature '" + name + "' not in table");
        cols.push_back(c);
    }
    const int target_col = table.column(spec.target_feature);
    if (target_col < 0) throw data_error("target feature '" + spec.target_feature + "' not in table");

    const std::size_t len = seg_end - seg_begin;
    const std::size_t window = static_cast<std::size_t>(spec.past_steps + spec.horizon_steps);
    std::vector<WindowedSample> out;
    if (len < window) return out; // too short: no samples, not an error
    const std::size_t count = len - window + 1;
    out.reserve(count);
    const int P = spec.past_steps;
    const int F = static_cast<int>(cols.size());
    for (std::size_t i = 0; i < count; ++i) {
        WindowedSample s;
        s.input.resize(P, F);
        const std::size_t base = seg_begin + i;
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) {
                s.input(t, f) = table.values(static_cast<Eigen::Index>(base + t), cols[f]);
            }
        }
        const std::size_t target_row = base + static_cast<std::size_t>(P + spec.horizon_steps - 1);
        s.target = table.values(static_cast<Eigen::Index>(target_row), target_col);
        s.t_index = static_cast<std::int64_t>(target_row);
        out.push_back(std::move(s));
    }
    return out;
}

Normalizer fit_normalizer(const std::vector<WindowedSample>& train_samples,
                          const WindowSpec& spec, bool tolerant) {
    if (train_samples.size() < 2) {
        throw data_error("fit_normalizer: need at least 2 training samples");
    }
    const int P = spec.past_steps;
    const int F = static_cast<int>(spec.input_features.size());
    Normalizer nz;
    nz.mean = Eigen::VectorXd::Zero(F);
    nz.stddev = Eigen::VectorXd::Zero(F);

    const double count = static_cast<double>(train_samples.size()) * P;
    for (const auto& s : train_samples) {
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) nz.mean[f] += s.input(t, f);
        }
    }
    nz.mean /= count;
    for (const auto& s : train_samples) {
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) {
                const double d = s.input(t, f) - nz.mean[f];
                nz.stddev[f] += d * d;
            }
        }
    }
    for (int f = 0; f < F; ++f) {
        nz.stddev[f] = std::sqrt(nz.stddev[f] / count);
        if (nz.stddev[f] == 0.0) {
            if (!tolerant) {
                throw numeric_error("feature '" + spec.input_features[static_cast<std::size_t>(f)] +
                                    "' has zero variance on the training split");
            }
            nz.stddev[f] = 1.0;
            nz.degenerate_features.push_back(f);
        }
    }

    double tm = 0.0;
    for (const auto& s : train_samples) tm += s.target;
    tm /= static_cast<double>(train_samples.size());
    double tv = 0.0;
    for (const auto& s : train_samples) {
        const double d = s.target - tm;
        tv += d * d;
    }
    nz.target_mean = tm;
    nz.target_std = std::sqrt(tv / static_cast<double>(train_samples.size()));
    if (nz.target_std == 0.0) {
        if (!tolerant) {
            throw numeric_error("target '" + spec.target_feature +
                                "' has zero variance on the training split");
        }
        nz.target_std = 1.0;
        nz.target_degenerate = true;
    }
    return nz;
}

const std::vector<WindowedSample>& WindowedSet::split(int which) const {
    switch (which) {
    case 0: return train;
    case 1: return val;
    default: return test;
    }
}

WindowedSet build_windowed(const FeatureTable& table, const WindowSpec& spec,
                           bool tolerant_normalizer) {
    const auto segments = split_series(static_cast<std::size_t>(table.values.rows()), spec);
    WindowedSet set;
    set.spec = spec;
    set.train = make_windows(table, segments[0].first, segments[0].second, spec);
    set.val = make_windows(table, segments[1].first, segments[1].second, spec);
    set.test = make_windows(table, segments[2].first, segments[2].second, spec);
    if (set.train.empty() || set.val.empty() || set.test.empty()) {
        throw data_error("series too short: a split produced zero windows for P=" +
                         std::to_string(spec.past_steps) + " H=" + std::to_string(spec.horizon_steps));
    }
    set.normalizer = fit_normalizer(set.train, spec, tolerant_normalizer);
    return set;
}

void flattened_normalized(const WindowedSet& set, int split, Eigen::MatrixXd& X,
                          Eigen::VectorXd& y) {
    const auto& samples = set.split(split);
    const int P = set.spec.past_steps;
    const int F = static_cast<int>(set.spec.input_features.size());
    X.resize(static_cast<Eigen::Index>(samples.size()), P * F);
    y.resize(static_cast<Eigen::Index>(samples.size()));
    const auto& nz = set.normalizer;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) {
                X(static_cast<Eigen::Index>(i), t * F + f) = quantize(nz.apply_feature(f, s.input(t, f)));
            }
        }
        y[static_cast<Eigen::Index>(i)] = quantize(nz.apply_target(s.target));
    }
}

void sequence_normalized(const WindowedSet& set, int split, std::vector<Eigen::MatrixXd>& steps,
                         Eigen::VectorXd& y) {
    const auto& samples = set.split(split);
    const int P = set.spec.past_steps;
    const int F = static_cast<int>(set.spec.input_features.size());
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    steps.assign(static_cast<std::size_t>(P), Eigen::MatrixXd(F, n));
    y.resize(n);
    const auto& nz = set.normalizer;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) {
                steps[static_cast<std::size_t>(t)](f, i) = quantize(nz.apply_feature(f, s.input(t, f)));
            }
        }
        y[i] = quantize(nz.apply_target(s.target));
    }
}

void write_samples_csv(const WindowedSet& set, int split, std::ostream& out) {
    const auto& samples = set.split(split);
    const int P = set.spec.past_steps;
    const int F = static_cast<int>(set.spec.input_features.size());
    std::vector<std::string> header;
    for (int t = 0; t < P; ++t) {
        for (int f = 0; f < F; ++f) {
            header.push_back(set.spec.input_features[static_cast<std::size_t>(f)] + "_t" +
                             std::to_string(t - P + 1));
        }
    }
    header.push_back("target");
    header.push_back("t_index");
    out << csv_join(header) << '\n';
    std::vector<std::string> row;
    for (const auto& s : samples) {
        row.clear();
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) row.push_back(fmt_shortest(s.input(t, f)));
        }
        row.push_back(fmt_shortest(s.target));
        row.push_back(std::to_string(s.t_index));
        out << csv_join(row) << '\n';
    }
}

} // namespace windfc::windowing

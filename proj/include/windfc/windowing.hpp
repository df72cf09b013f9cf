#pragma once

#include "windfc/ingest.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace windfc::windowing {

// Sliding-window geometry: P past steps in, the value H steps ahead out.
struct WindowSpec {
    int past_steps = 18;   // 3 h of 10-minute steps
    int horizon_steps = 1; // 10 minutes
    std::vector<std::string> input_features;
    std::string target_feature;

    void validate() const; // throws usage_error unless P >= H >= 1
};

// Column view of a series (raw or derived columns), one row per record.
struct FeatureTable {
    std::vector<std::string> names;
    Eigen::MatrixXd values; // n x F

    int column(std::string_view name) const; // -1 if absent
};

// Raw met columns pulled out of a repaired series; missing values are not
// allowed here (repair fills everything unless a field never appeared).
FeatureTable table_from_series(const ingest::SeriesDataset& ds,
                               const std::vector<std::string>& names);

struct SplitPoints {
    std::size_t train_end; // floor(0.8 n)
    std::size_t val_end;   // floor(0.9 n)
};

SplitPoints split_points(std::size_t n);

struct WindowedSample {
    Eigen::MatrixXd input; // P x F, original units
    double target = 0.0;
    std::int64_t t_index = 0; // global row index of the target row
};

// Per-feature and target z-score statistics, fit on the training split only.
struct Normalizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    double target_mean = 0.0;
    double target_std = 1.0;
    std::vector<int> degenerate_features; // columns whose stddev was zero
    bool target_degenerate = false;

    double apply_feature(int j, double x) const { return (x - mean[j]) / stddev[j]; }
    double invert_feature(int j, double z) const { return mean[j] + stddev[j] * z; }
    double apply_target(double y) const { return (y - target_mean) / target_std; }
    double invert_target(double z) const { return target_mean + target_std * z; }
};

// Snap to single precision. Training views go through this so a column that
// is an exact rescaling of another normalizes to identical bits; the raw
// double z-scores differ in the last ulp and would break that equality.
inline double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

struct WindowedSet {
    WindowSpec spec;
    Normalizer normalizer;
    std::vector<WindowedSample> train;
    std::vector<WindowedSample> val;
    std::vector<WindowedSample> test;

    const std::vector<WindowedSample>& split(int which) const; // 0 train, 1 val, 2 test
};

// Chronological 8:1:1 split of the table rows, windows built inside each
// segment so no sample straddles a split boundary.
std::array<std::pair<std::size_t, std::size_t>, 3> split_series(std::size_t n_rows,
                                                                const WindowSpec& spec);

std::vector<WindowedSample> make_windows(const FeatureTable& table, std::size_t seg_begin,
                                         std::size_t seg_end, const WindowSpec& spec);

Normalizer fit_normalizer(const std::vector<WindowedSample>& train_samples,
                          const WindowSpec& spec, bool tolerant = false);

WindowedSet build_windowed(const FeatureTable& table, const WindowSpec& spec,
                           bool tolerant_normalizer = false);

// Normalized views used by the trainers (quantized, see above).
// Flattened layout: row-major over (time step, feature).
void flattened_normalized(const WindowedSet& set, int split, Eigen::MatrixXd& X,
                          Eigen::VectorXd& y);
// Sequence layout: out[t] is an F x N matrix of step-t inputs.
void sequence_normalized(const WindowedSet& set, int split, std::vector<Eigen::MatrixXd>& steps,
                         Eigen::VectorXd& y);

// One row per sample: flattened raw inputs, target, t_index.
void write_samples_csv(const WindowedSet& set, int split, std::ostream& out);

} // namespace windfc::windowing

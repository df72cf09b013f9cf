#pragma once

#include "windfc/ingest.hpp"
#include "windfc/metrics.hpp"
#include "windfc/models.hpp"
#include "windfc/physics.hpp"
#include "windfc/windowing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace windfc::experiments {

// Column names of the experiment feature table. Heights are part of the
// name; POWER is watts at hub height.
inline constexpr const char* kWspdAnem = "WSPD3.8";
inline constexpr const char* kWspdHub = "WSPD100";
inline constexpr const char* kGstAnem = "GST3.8";
inline constexpr const char* kGstHub = "GST100";
inline constexpr const char* kPres = "PRES";
inline constexpr const char* kAtmp = "ATMP";
inline constexpr const char* kWtmp = "WTMP";
inline constexpr const char* kPower = "POWER";

// One input/output feature-combination experiment.
struct CaseSpec {
    int id = 0;
    int mode = 0;
    std::vector<std::string> inputs;
    std::string target;

    // Canonical description with measurement heights erased. Cases that are
    // exact rescalings of each other (1/2, 4/5, 7/8) share this key, so the
    // derived per-cell seed is shared too and their runs stay comparable
    // bit for bit.
    std::string seed_key(const std::string& kind) const;
};

// The nine feature-combination cases; the composition is reconstructed from
// the three modes and kept in one place so it is easy to amend.
std::vector<CaseSpec> enumerate_cases();

// Base columns plus derived WSPD100/GST100 (log-profile rescaling) and POWER.
windowing::FeatureTable case_table(const ingest::SeriesDataset& ds,
                                   const physics::TurbineSpec& turbine);

struct CaseResult {
    int case_id = 0;
    int mode = 0;
    std::string kind;
    std::string native_space; // "speed_mps" or "power_mw"
    metrics::MetricReport native;
    metrics::MetricReport power; // always present; MW
    bool target_degenerate = false;
    int best_epoch = 0;
    double wall_seconds = 0.0; // informational; never part of deterministic output
};

CaseResult run_case(const windowing::FeatureTable& table, const CaseSpec& spec,
                    const models::ModelKind& kind, const windowing::WindowSpec& window,
                    const models::TrainConfig& config, const physics::TurbineSpec& turbine,
                    std::uint64_t seed);

struct MatrixCell {
    CaseSpec spec;
    std::string kind;
    std::optional<CaseResult> result;
    std::string error; // non-empty when the cell failed
};

struct MatrixResult {
    std::vector<MatrixCell> cells; // ordered (case, kind)
};

// Full cross product; individual failures are recorded and the run continues.
// Cells execute concurrently up to `threads`; per-cell seeds come from the
// master seed so assembly order never affects the numbers.
MatrixResult run_matrix(const ingest::SeriesDataset& ds,
                        const std::vector<models::ModelKind>& kinds,
                        const std::vector<CaseSpec>& cases, const windowing::WindowSpec& window,
                        const models::TrainConfig& config, const physics::TurbineSpec& turbine,
                        std::uint64_t master_seed, int threads = 0);

struct SweepCell {
    int past_steps = 0;
    int horizon_steps = 0;
    bool skipped = false; // series too short for this pair
    std::string skip_reason;
    metrics::MetricReport report; // validation split, target units
};

struct SweepResult {
    std::vector<SweepCell> cells; // only pairs with past >= horizon, ordered (P, H)
};

// Table-I-style grid over window sizes, evaluated on the validation split.
SweepResult window_sweep(const ingest::SeriesDataset& ds, const physics::TurbineSpec& turbine,
                         const std::vector<std::string>& input_features,
                         const std::string& target, const std::vector<int>& past_steps,
                         const std::vector<int>& horizon_steps, const models::ModelKind& kind,
                         const models::TrainConfig& config, std::uint64_t master_seed,
                         int threads = 0);

struct ImprovementStat {
    struct PerKind {
        std::string kind;
        double speed_output_rmse = 0.0; // mean power-space RMSE, MW
        double power_output_rmse = 0.0;
        double percent = 0.0; // 100 * (power - speed) / power
    };
    std::vector<PerKind> per_kind;
    double pooled_percent = 0.0;
    std::string json(int precision = 6) const;
};

// Accuracy gain of predicting speed (then converting) over predicting power
// directly, measured in power space.
ImprovementStat improvement_stat(const MatrixResult& results);

// Persistence baseline: predict the last observed target value. Used as the
// quality floor for short-horizon forecasts.
metrics::MetricReport persistence_report(const windowing::WindowedSet& set, int split);

} // namespace windfc::experiments

#include "windfc/experiments.hpp"

#include "windfc/errors.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace windfc::experiments {

namespace {

// Measurement height is presentation, not identity: WSPD3.8 and WSPD100 are
// the same signal up to the log-profile constant.
std::string erase_height(const std::string& name) {
    if (name == kWspdAnem || name == kWspdHub) return "WSPD";
    if (name == kGstAnem || name == kGstHub) return "GST";
    return name;
}

} // namespace

std::string CaseSpec::seed_key(const std::string& kind) const {
    std::string key = "mode=" + std::to_string(mode) + "|in=";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) key += ',';
        key += erase_height(inputs[i]);
    }
    key += "|out=" + erase_height(target);
    key += "|kind=" + kind;
    return key;
}

std::vector<CaseSpec> enumerate_cases() {
    std::vector<CaseSpec> cases;
    // Mode 1: one feature in, the same feature out.
    cases.push_back({1, 1, {kWspdAnem}, kWspdAnem});
    cases.push_back({2, 1, {kWspdHub}, kWspdHub});
    cases.push_back({3, 1, {kPower}, kPower});
    // Mode 2: power plus wind speeds in, power out.
    cases.push_back({4, 2, {kPower, kWspdAnem}, kPower});
    cases.push_back({5, 2, {kPower, kWspdHub}, kPower});
    cases.push_back({6, 2, {kPower, kWspdAnem, kWspdHub}, kPower});
    // Mode 3: the selected met features in.
    cases.push_back({7, 3, {kWspdAnem, kGstAnem, kPres, kAtmp, kWtmp}, kWspdAnem});
    cases.push_back({8, 3, {kWspdHub, kGstHub, kPres, kAtmp, kWtmp}, kWspdHub});
    cases.push_back({9, 3, {kWspdAnem, kGstAnem, kPres, kAtmp, kWtmp, kPower}, kPower});
    return cases;
}

windowing::FeatureTable case_table(const ingest::SeriesDataset& ds,
                                   const physics::TurbineSpec& turbine) {
    windowing::FeatureTable base = windowing::table_from_series(
        ds, {"WSPD", "GST", "PRES", "ATMP", "WTMP"});
    const Eigen::Index n = base.values.rows();

    windowing::FeatureTable table;
    table.names = {kWspdAnem, kWspdHub, kGstAnem, kGstHub, kPres, kAtmp, kWtmp, kPower};
    table.values.resize(n, 8);
    const double h1 = turbine.anemometer_height;
    const double h2 = turbine.hub_height;
    const double z0 = turbine.roughness_length;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double wspd = base.values(i, 0);
        const double gst = base.values(i, 1);
        const double wspd_hub = physics::extrapolate_speed(wspd, h1, h2, z0);
        table.values(i, 0) = wspd;
        table.values(i, 1) = wspd_hub;
        table.values(i, 2) = gst;
        // GST uses the same log-profile constant so the 100 m variant stays a
        // pure rescaling of the 3.8 m one.
        table.values(i, 3) = physics::extrapolate_speed(gst, h1, h2, z0);
        table.values(i, 4) = base.values(i, 2);
        table.values(i, 5) = base.values(i, 3);
        table.values(i, 6) = base.values(i, 4);
        table.values(i, 7) = physics::power_from_speed(wspd_hub, turbine);
    }
    return table;
}

CaseResult run_case(const windowing::FeatureTable& table, const CaseSpec& spec,
                    const models::ModelKind& kind, const windowing::WindowSpec& window,
                    const models::TrainConfig& config, const physics::TurbineSpec& turbine,
                    std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();

    windowing::WindowSpec wspec = window;
    wspec.input_features = spec.inputs;
    wspec.target_feature = spec.target;

    // Constant targets (for example POWER pinned at the rated plateau) keep a
    // degenerate-but-valid model rather than failing the whole case.
    windowing::WindowedSet set = windowing::build_windowed(table, wspec, /*tolerant=*/true);

    models::TrainConfig cell_config = config;
    cell_config.seed = seed;
    models::TrainedModel model = models::fit(set, kind, cell_config);
    models::SplitEval eval = models::predict_split(model, set, 2);

    CaseResult result;
    result.case_id = spec.id;
    result.mode = spec.mode;
    result.kind = models::kind_name(kind);
    result.target_degenerate = set.normalizer.target_degenerate;
    result.best_epoch = model.best_epoch;

    const Eigen::Index n = eval.y_true.size();
    if (spec.target == kPower) {
        // Native space is already power; report in MW.
        Eigen::VectorXd t_mw = eval.y_true / 1e6;
        Eigen::VectorXd p_mw = eval.y_pred / 1e6;
        result.native = metrics::evaluate({t_mw.data(), static_cast<std::size_t>(n)},
                                          {p_mw.data(), static_cast<std::size_t>(n)});
        result.power = result.native;
        result.native_space = "power_mw";
    } else {
        result.native = metrics::evaluate({eval.y_true.data(), static_cast<std::size_t>(n)},
                                          {eval.y_pred.data(), static_cast<std::size_t>(n)});
        result.native_space = "speed_mps";
        // Both truth and prediction go through the same speed-to-power map so
        // the conversion cannot favor either side.
        const double to_hub = (spec.target == kWspdAnem) ? physics::hub_ratio(turbine) : 1.0;
        Eigen::VectorXd t_mw(n), p_mw(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            t_mw[i] = physics::power_from_speed(eval.y_true[i] * to_hub, turbine) / 1e6;
            p_mw[i] = physics::power_from_speed(eval.y_pred[i] * to_hub, turbine) / 1e6;
        }
        result.power = metrics::evaluate({t_mw.data(), static_cast<std::size_t>(n)},
                                         {p_mw.data(), static_cast<std::size_t>(n)});
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

MatrixResult run_matrix(const ingest::SeriesDataset& ds,
                        const std::vector<models::ModelKind>& kinds,
                        const std::vector<CaseSpec>& cases, const windowing::WindowSpec& window,
                        const models::TrainConfig& config, const physics::TurbineSpec& turbine,
                        std::uint64_t master_seed, int threads) {
    const windowing::FeatureTable table = case_table(ds, turbine);

    MatrixResult result;
    result.cells.reserve(cases.size() * kinds.size());
    for (const auto& c : cases) {
        for (const auto& k : kinds) {
            result.cells.push_back({c, models::kind_name(k), std::nullopt, ""});
        }
    }

    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min<int>(threads, static_cast<int>(result.cells.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.cells.size()) return;
            MatrixCell& cell = result.cells[i];
            const models::ModelKind& kind = kinds[i % kinds.size()];
            const std::uint64_t seed = derive_seed(master_seed, cell.spec.seed_key(cell.kind));
            try {
                cell.result = run_case(table, cell.spec, kind, window, config, turbine, seed);
            } catch (const std::exception& e) {
                cell.error = "case " + std::to_string(cell.spec.id) + " (" + cell.kind +
                             "): " + e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

SweepResult window_sweep(const ingest::SeriesDataset& ds, const physics::TurbineSpec& turbine,
                         const std::vector<std::string>& input_features,
                         const std::string& target, const std::vector<int>& past_steps,
                         const std::vector<int>& horizon_steps, const models::ModelKind& kind,
                         const models::TrainConfig& config, std::uint64_t master_seed,
                         int threads) {
    const windowing::FeatureTable table = case_table(ds, turbine);

    SweepResult result;
    for (int p : past_steps) {
        for (int h : horizon_steps) {
            if (p < h) continue; // the sweep assumes past >= horizon
            SweepCell cell;
            cell.past_steps = p;
            cell.horizon_steps = h;
            result.cells.push_back(cell);
        }
    }

    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(result.cells.size(), 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= result.cells.size()) return;
            SweepCell& cell = result.cells[i];
            windowing::WindowSpec wspec;
            wspec.past_steps = cell.past_steps;
            wspec.horizon_steps = cell.horizon_steps;
            wspec.input_features = input_features;
            wspec.target_feature = target;
            models::TrainConfig cell_config = config;
            cell_config.seed = derive_seed(master_seed, "sweep|P=" + std::to_string(cell.past_steps) +
                                                            "|H=" + std::to_string(cell.horizon_steps));
            try {
                windowing::WindowedSet set = windowing::build_windowed(table, wspec);
                models::TrainedModel model = models::fit(set, kind, cell_config);
                models::SplitEval eval = models::predict_split(model, set, 1); // validation
                const Eigen::Index n = eval.y_true.size();
                cell.report = metrics::evaluate({eval.y_true.data(), static_cast<std::size_t>(n)},
                                                {eval.y_pred.data(), static_cast<std::size_t>(n)});
            } catch (const data_error& e) {
                cell.skipped = true;
                cell.skip_reason = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

ImprovementStat improvement_stat(const MatrixResult& results) {
    struct Acc {
        double speed_sum = 0.0;
        int speed_n = 0;
        double power_sum = 0.0;
        int power_n = 0;
    };
    std::vector<std::pair<std::string, Acc>> by_kind;
    auto acc_for = [&](const std::string& kind) -> Acc& {
        for (auto& [k, a] : by_kind) {
            if (k == kind) return a;
        }
        by_kind.emplace_back(kind, Acc{});
        return by_kind.back().second;
    };
    for (const auto& cell : results.cells) {
        if (!cell.result) continue;
        Acc& acc = acc_for(cell.kind);
        if (cell.spec.target == kPower) {
            acc.power_sum += cell.result->power.rmse;
            ++acc.power_n;
        } else {
            acc.speed_sum += cell.result->power.rmse;
            ++acc.speed_n;
        }
    }

    ImprovementStat stat;
    double pooled_speed = 0.0, pooled_power = 0.0;
    int pooled_speed_n = 0, pooled_power_n = 0;
    for (const auto& [kind, acc] : by_kind) {
        if (acc.speed_n == 0 || acc.power_n == 0) continue;
        ImprovementStat::PerKind pk;
        pk.kind = kind;
        pk.speed_output_rmse = acc.speed_sum / acc.speed_n;
        pk.power_output_rmse = acc.power_sum / acc.power_n;
        pk.percent = 100.0 * (pk.power_output_rmse - pk.speed_output_rmse) / pk.power_output_rmse;
        stat.per_kind.push_back(pk);
        pooled_speed += acc.speed_sum;
        pooled_speed_n += acc.speed_n;
        pooled_power += acc.power_sum;
        pooled_power_n += acc.power_n;
    }
    if (stat.per_kind.empty()) {
        throw data_error("improvement_stat: need at least one speed-output and one power-output "
                         "case for the same model kind");
    }
    const double es = pooled_speed / pooled_speed_n;
    const double ep = pooled_power / pooled_power_n;
    stat.pooled_percent = 100.0 * (ep - es) / ep;
    return stat;
}

std::string ImprovementStat::json(int precision) const {
    std::string out = "{\"per_kind\":[";
    for (std::size_t i = 0; i < per_kind.size(); ++i) {
        if (i) out += ',';
        const auto& pk = per_kind[i];
        out += "{\"kind\":\"" + pk.kind + "\"";
        out += ",\"speed_output_rmse_mw\":" + fmt_fixed(pk.speed_output_rmse, precision);
        out += ",\"power_output_rmse_mw\":" + fmt_fixed(pk.power_output_rmse, precision);
        out += ",\"improvement_percent\":" + fmt_fixed(pk.percent, precision) + '}';
    }
    out += "],\"pooled_improvement_percent\":" + fmt_fixed(pooled_percent, precision) + '}';
    return out;
}

metrics::MetricReport persistence_report(const windowing::WindowedSet& set, int split) {
    int target_col = -1;
    for (std::size_t f = 0; f < set.spec.input_features.size(); ++f) {
        if (set.spec.input_features[f] == set.spec.target_feature) {
            target_col = static_cast<int>(f);
            break;
        }
    }
    if (target_col < 0) {
        throw data_error("persistence baseline needs the target among the input features");
    }
    const auto& samples = set.split(split);
    std::vector<double> y_true, y_pred;
    y_true.reserve(samples.size());
    y_pred.reserve(samples.size());
    for (const auto& s : samples) {
        y_true.push_back(s.target);
        y_pred.push_back(s.input(set.spec.past_steps - 1, target_col));
    }
    return metrics::evaluate(y_true, y_pred);
}

} // namespace windfc::experiments

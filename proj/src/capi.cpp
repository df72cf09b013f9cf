#include "windfc.h"

#include "windfc/errors.hpp"
#include "windfc/experiments.hpp"
#include "windfc/features.hpp"
#include "windfc/fixture.hpp"
#include "windfc/ingest.hpp"
#include "windfc/metrics.hpp"
#include "windfc/models.hpp"
#include "windfc/physics.hpp"
#include "windfc/report.hpp"
#include "windfc/windowing.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

using nlohmann::json;

struct wf_series {
    windfc::ingest::SeriesDataset ds;
};
struct wf_turbine {
    windfc::physics::TurbineSpec spec;
};
struct wf_model {
    windfc::models::TrainedModel model;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
wf_status guarded(Fn&& fn) {
    try {
        fn();
        return WF_OK;
    } catch (const windfc::usage_error& e) {
        g_last_error = e.what();
        return WF_ERR_USAGE;
    } catch (const windfc::data_error& e) {
        g_last_error = e.what();
        return WF_ERR_DATA;
    } catch (const windfc::numeric_error& e) {
        g_last_error = e.what();
        return WF_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WF_ERR_INTERNAL;
    }
}

json parse_options(const char* options_json) {
    if (options_json == nullptr || *options_json == '\0') return json::object();
    try {
        return json::parse(options_json);
    } catch (const json::exception& e) {
        throw windfc::usage_error(std::string("options: ") + e.what());
    }
}

template <typename T>
T opt(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw windfc::usage_error(std::string("options: bad value for '") + key + "'");
    }
}

windfc::models::TrainConfig train_config_from(const json& j, std::uint64_t default_seed) {
    windfc::models::TrainConfig config;
    config.seed = default_seed;
    if (!j.contains("train")) return config;
    const json& t = j.at("train");
    config.seed = opt<std::uint64_t>(t, "seed", config.seed);
    config.learning_rate = opt<double>(t, "learning_rate", config.learning_rate);
    config.max_epochs = opt<int>(t, "epochs", config.max_epochs);
    config.batch_size = opt<int>(t, "batch", config.batch_size);
    config.patience = opt<int>(t, "patience", config.patience);
    return config;
}

windfc::windowing::WindowSpec window_from(const json& j) {
    windfc::windowing::WindowSpec spec;
    if (j.contains("window")) {
        const json& w = j.at("window");
        spec.past_steps = opt<int>(w, "past_steps", spec.past_steps);
        spec.horizon_steps = opt<int>(w, "horizon_steps", spec.horizon_steps);
    }
    return spec;
}

windfc::models::ModelKind kind_from(const json& j, const std::string& name) {
    if (name == "ridge") {
        windfc::models::Ridge r;
        r.lambda = opt<double>(j, "lambda", r.lambda);
        return r;
    }
    if (name == "fcnn") {
        windfc::models::Fcnn f;
        f.hidden = opt<std::vector<int>>(j, "hidden", f.hidden);
        return f;
    }
    if (name == "gru") {
        windfc::models::Gru g;
        if (j.contains("hidden") && j.at("hidden").is_number_integer()) {
            g.hidden = j.at("hidden").get<int>();
        }
        return g;
    }
    throw windfc::usage_error("unknown model kind '" + name + "' (ridge, fcnn, gru)");
}

windfc::fixture::FixtureConfig fixture_config_from(const json& j) {
    windfc::fixture::FixtureConfig config;
    config.rows = opt<std::size_t>(j, "rows", config.rows);
    config.seed = opt<std::uint64_t>(j, "seed", config.seed);
    config.cadence_minutes = opt<int>(j, "cadence_minutes", config.cadence_minutes);
    config.weibull_shape = opt<double>(j, "weibull_shape", config.weibull_shape);
    config.weibull_scale = opt<double>(j, "weibull_scale", config.weibull_scale);
    config.ar_a = opt<double>(j, "ar_a", config.ar_a);
    config.ar_b = opt<double>(j, "ar_b", config.ar_b);
    config.temp_coupling = opt<double>(j, "temp_coupling", config.temp_coupling);
    return config;
}

} // namespace

extern "C" {

const char* wf_last_error(void) {
    return g_last_error.c_str();
}

void wf_string_free(char* s) {
    std::free(s);
}

/* --- series ------------------------------------------------------------------ */

wf_status wf_series_load(const char* path, int cadence_minutes, wf_series** out) {
    return guarded([&] {
        if (!path || !out) throw windfc::usage_error("wf_series_load: null argument");
        auto raw = windfc::ingest::parse_auto_file(path);
        auto ds = windfc::ingest::repair(std::move(raw), cadence_minutes,
                                         std::filesystem::path(path).stem().string());
        *out = new wf_series{std::move(ds)};
    });
}

wf_status wf_series_from_fixture(const char* options_json, wf_series** out) {
    return guarded([&] {
        if (!out) throw windfc::usage_error("wf_series_from_fixture: null output");
        const json j = parse_options(options_json);
        *out = new wf_series{windfc::fixture::generate(fixture_config_from(j))};
    });
}

wf_status wf_series_rows(const wf_series* s, size_t* out) {
    return guarded([&] {
        if (!s || !out) throw windfc::usage_error("wf_series_rows: null argument");
        *out = s->ds.records.size();
    });
}

wf_status wf_series_summary_json(const wf_series* s, char** json_out) {
    return guarded([&] {
        if (!s || !json_out) throw windfc::usage_error("wf_series_summary_json: null argument");
        *json_out = dup_string(windfc::ingest::summarize(s->ds).json());
    });
}

wf_status wf_series_write_csv(const wf_series* s, const char* path) {
    return guarded([&] {
        if (!s || !path) throw windfc::usage_error("wf_series_write_csv: null argument");
        std::ofstream outf(path, std::ios::binary);
        if (!outf) throw windfc::data_error(std::string("cannot write '") + path + "'");
        windfc::ingest::write_csv(s->ds, outf);
    });
}

wf_status wf_series_write_repair_log(const wf_series* s, const char* path) {
    return guarded([&] {
        if (!s || !path) throw windfc::usage_error("wf_series_write_repair_log: null argument");
        std::ofstream outf(path, std::ios::binary);
        if (!outf) throw windfc::data_error(std::string("cannot write '") + path + "'");
        windfc::ingest::write_repair_log_jsonl(s->ds, outf);
    });
}

void wf_series_free(wf_series* s) {
    delete s;
}

/* --- turbine ------------------------------------------------------------------- */

wf_status wf_turbine_default(wf_turbine** out) {
    return guarded([&] {
        if (!out) throw windfc::usage_error("wf_turbine_default: null output");
        *out = new wf_turbine{windfc::physics::default_turbine()};
    });
}

wf_status wf_turbine_from_json_file(const char* path, wf_turbine** out) {
    return guarded([&] {
        if (!path || !out) throw windfc::usage_error("wf_turbine_from_json_file: null argument");
        *out = new wf_turbine{windfc::physics::turbine_from_json_file(path)};
    });
}

wf_status wf_turbine_info_json(const wf_turbine* t, char** json_out) {
    return guarded([&] {
        if (!t || !json_out) throw windfc::usage_error("wf_turbine_info_json: null argument");
        *json_out = dup_string(windfc::physics::turbine_to_json(t->spec));
    });
}

wf_status wf_turbine_extrapolate(const wf_turbine* t, double speed, double from_height,
                                 double* hub_speed_out) {
    return guarded([&] {
        if (!t || !hub_speed_out) throw windfc::usage_error("wf_turbine_extrapolate: null argument");
        *hub_speed_out = windfc::physics::extrapolate_speed(speed, from_height, t->spec.hub_height,
                                                            t->spec.roughness_length);
    });
}

wf_status wf_turbine_power(const wf_turbine* t, double hub_speed, double* watts_out) {
    return guarded([&] {
        if (!t || !watts_out) throw windfc::usage_error("wf_turbine_power: null argument");
        if (hub_speed < 0.0) throw windfc::numeric_error("power: speed must be >= 0");
        *watts_out = windfc::physics::power_from_speed(hub_speed, t->spec);
    });
}

void wf_turbine_free(wf_turbine* t) {
    delete t;
}

/* --- feature analysis ------------------------------------------------------------ */

wf_status wf_features_report(const wf_series* s, const char* options_json, char** json_out) {
    return guarded([&] {
        if (!s || !json_out) throw windfc::usage_error("wf_features_report: null argument");
        const json j = parse_options(options_json);
        const std::string target = opt<std::string>(j, "target", "WSPD");
        std::vector<std::string> candidates = opt<std::vector<std::string>>(
            j, "candidates", {"WDIR", "WSPD", "GST", "PRES", "ATMP", "WTMP", "DEWP"});
        const std::uint64_t seed = opt<std::uint64_t>(j, "seed", 1);

        windfc::features::ForestConfig forest_config;
        if (j.contains("forest")) {
            const json& f = j.at("forest");
            forest_config.tree_count = opt<int>(f, "trees", forest_config.tree_count);
            forest_config.max_depth = opt<int>(f, "max_depth", forest_config.max_depth);
            forest_config.min_samples_split =
                opt<int>(f, "min_samples_split", forest_config.min_samples_split);
        }
        windfc::features::SelectionPolicy policy;
        if (j.contains("policy")) {
            const json& p = j.at("policy");
            policy.low_corr_threshold = opt<double>(p, "low_corr", policy.low_corr_threshold);
            policy.block_threshold = opt<double>(p, "block", policy.block_threshold);
            policy.low_importance_threshold =
                opt<double>(p, "low_importance", policy.low_importance_threshold);
        }

        const auto corr = windfc::features::pearson_matrix(s->ds, candidates);

        // Forest fit: non-target candidates predict the target, listwise
        // complete rows only (same exclusion rule as the correlation).
        std::vector<std::string> predictors;
        std::vector<int> fields;
        for (const auto& name : candidates) {
            if (name == target) continue;
            predictors.push_back(name);
            fields.push_back(windfc::ingest::field_index(name));
        }
        const int target_field = windfc::ingest::field_index(target);
        if (target_field < 0) throw windfc::data_error("unknown target field '" + target + "'");

        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < s->ds.records.size(); ++r) {
            bool complete = s->ds.records[r].flags[target_field] != windfc::FieldFlag::missing;
            for (int f : fields) {
                complete = complete && s->ds.records[r].flags[f] != windfc::FieldFlag::missing;
            }
            if (complete) rows.push_back(r);
        }
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(fields.size()));
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t c = 0; c < fields.size(); ++c) {
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    s->ds.records[rows[i]].values[fields[c]];
            }
            y[static_cast<Eigen::Index>(i)] = s->ds.records[rows[i]].values[target_field];
        }
        const auto forest = windfc::features::fit_forest(X, y, forest_config, seed);
        const auto imp = windfc::features::importance(forest);
        const auto selection =
            windfc::features::select_features(corr, predictors, imp.weights, target, policy);

        std::string out = "{\"target\":\"" + target + "\"";
        out += ",\"complete_rows\":" + std::to_string(rows.size());
        out += ",\"correlation\":" + corr.json();
        out += ",\"importance\":" + windfc::features::importance_json(predictors, imp.weights);
        out += ",\"importance_degenerate\":";
        out += imp.degenerate ? "true" : "false";
        if (forest.oob_r2) {
            out += ",\"oob_r2\":" + windfc::fmt_fixed(*forest.oob_r2, 6);
        }
        out += ",\"selection\":" + selection.json();
        out += '}';

        if (j.contains("out_dir")) {
            const std::filesystem::path dir = j.at("out_dir").get<std::string>();
            std::filesystem::create_directories(dir);
            windfc::report::write_text_file((dir / "correlation.csv").string(), corr.csv());
            windfc::report::write_text_file((dir / "correlation.json").string(), corr.json());
            windfc::report::write_text_file((dir / "importance.csv").string(),
                                            windfc::features::importance_csv(predictors, imp.weights));
            windfc::report::write_text_file((dir / "importance.json").string(),
                                            windfc::features::importance_json(predictors, imp.weights));
            windfc::report::write_text_file((dir / "selection.json").string(), selection.json());
        }
        *json_out = dup_string(out);
    });
}

/* --- models --------------------------------------------------------------------- */

namespace {

windfc::metrics::MetricReport eval_to_report(const windfc::models::SplitEval& eval) {
    const Eigen::Index n = eval.y_true.size();
    return windfc::metrics::evaluate({eval.y_true.data(), static_cast<std::size_t>(n)},
                                     {eval.y_pred.data(), static_cast<std::size_t>(n)});
}

} // namespace

wf_status wf_train(const wf_series* s, const wf_turbine* t, const char* options_json,
                   wf_model** out, char** summary_json_out) {
    return guarded([&] {
        if (!s || !t || !out) throw windfc::usage_error("wf_train: null argument");
        const json j = parse_options(options_json);
        const std::string kind_str = opt<std::string>(j, "kind", "fcnn");
        const windfc::models::ModelKind kind = kind_from(j, kind_str);

        windfc::windowing::WindowSpec spec = window_from(j);
        spec.input_features = opt<std::vector<std::string>>(
            j, "inputs", {windfc::experiments::kWspdAnem});
        spec.target_feature = opt<std::string>(j, "target", windfc::experiments::kWspdAnem);

        const auto config = train_config_from(j, opt<std::uint64_t>(j, "seed", 0));
        const auto table = windfc::experiments::case_table(s->ds, t->spec);
        const auto set = windfc::windowing::build_windowed(table, spec);
        auto model = windfc::models::fit(set, kind, config);

        if (summary_json_out) {
            const auto test_report = eval_to_report(windfc::models::predict_split(model, set, 2));
            std::string summary = "{\"kind\":\"" + windfc::models::kind_name(kind) + "\"";
            summary += ",\"epochs_run\":" + std::to_string(model.history.size());
            summary += ",\"best_epoch\":" + std::to_string(model.best_epoch);
            summary += ",\"train_samples\":" + std::to_string(set.train.size());
            summary += ",\"val_samples\":" + std::to_string(set.val.size());
            summary += ",\"test_samples\":" + std::to_string(set.test.size());
            summary += ",\"test\":" + test_report.json();
            summary += '}';
            *summary_json_out = dup_string(summary);
        }
        *out = new wf_model{std::move(model)};
    });
}

wf_status wf_model_save(const wf_model* m, const char* path) {
    return guarded([&] {
        if (!m || !path) throw windfc::usage_error("wf_model_save: null argument");
        windfc::models::save_file(m->model, path);
    });
}

wf_status wf_model_load(const char* path, wf_model** out) {
    return guarded([&] {
        if (!path || !out) throw windfc::usage_error("wf_model_load: null argument");
        *out = new wf_model{windfc::models::load_file(path)};
    });
}

wf_status wf_model_info_json(const wf_model* m, char** json_out) {
    return guarded([&] {
        if (!m || !json_out) throw windfc::usage_error("wf_model_info_json: null argument");
        std::string info = "{\"kind\":\"" + windfc::models::kind_name(m->model.kind) + "\"";
        info += ",\"past_steps\":" + std::to_string(m->model.spec.past_steps);
        info += ",\"horizon_steps\":" + std::to_string(m->model.spec.horizon_steps);
        info += ",\"inputs\":[";
        for (std::size_t i = 0; i < m->model.spec.input_features.size(); ++i) {
            if (i) info += ',';
            info += '"' + m->model.spec.input_features[i] + '"';
        }
        info += "],\"target\":\"" + m->model.spec.target_feature + '"';
        info += ",\"best_epoch\":" + std::to_string(m->model.best_epoch);
        info += ",\"epochs_run\":" + std::to_string(m->model.history.size());
        info += '}';
        *json_out = dup_string(info);
    });
}

wf_status wf_model_predict_csv(const wf_model* m, const wf_series* s, const wf_turbine* t,
                               const char* out_csv_path, char** metrics_json_out) {
    return guarded([&] {
        if (!m || !s || !t) throw windfc::usage_error("wf_model_predict_csv: null argument");
        const auto table = windfc::experiments::case_table(s->ds, t->spec);
        const auto samples = windfc::windowing::make_windows(
            table, 0, static_cast<std::size_t>(table.values.rows()), m->model.spec);
        if (samples.empty()) {
            throw windfc::data_error("series too short for this model's window");
        }
        std::vector<Eigen::MatrixXd> inputs;
        inputs.reserve(samples.size());
        for (const auto& sample : samples) inputs.push_back(sample.input);
        const Eigen::VectorXd pred = windfc::models::predict(m->model, inputs);

        if (out_csv_path) {
            std::ofstream outf(out_csv_path, std::ios::binary);
            if (!outf) throw windfc::data_error(std::string("cannot write '") + out_csv_path + "'");
            outf << "timestamp,actual,predicted\n";
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const auto& rec =
                    s->ds.records[static_cast<std::size_t>(samples[i].t_index)];
                outf << windfc::format_timestamp(rec.timestamp) << ','
                     << windfc::fmt_shortest(samples[i].target) << ','
                     << windfc::fmt_shortest(pred[static_cast<Eigen::Index>(i)]) << '\n';
            }
        }
        if (metrics_json_out) {
            std::vector<double> y_true;
            y_true.reserve(samples.size());
            for (const auto& sample : samples) y_true.push_back(sample.target);
            const auto report = windfc::metrics::evaluate(
                y_true, {pred.data(), static_cast<std::size_t>(pred.size())});
            *metrics_json_out = dup_string(report.json());
        }
    });
}

void wf_model_free(wf_model* m) {
    delete m;
}

/* --- experiments -------------------------------------------------------------------- */

wf_status wf_run_cases(const wf_series* s, const wf_turbine* t, const char* options_json,
                       const char* out_dir, char** summary_json_out) {
    return guarded([&] {
        if (!s || !t) throw windfc::usage_error("wf_run_cases: null argument");
        const json j = parse_options(options_json);
        const auto kind_names =
            opt<std::vector<std::string>>(j, "models", {"ridge", "fcnn", "gru"});
        if (kind_names.empty()) throw windfc::usage_error("cases: no models given");
        std::vector<windfc::models::ModelKind> kinds;
        for (const auto& name : kind_names) kinds.push_back(kind_from(j, name));

        const std::uint64_t seed = opt<std::uint64_t>(j, "seed", 42);
        const int threads = opt<int>(j, "threads", 0);
        const auto window = window_from(j);
        const auto config = train_config_from(j, seed);
        const auto cases = windfc::experiments::enumerate_cases();

        const auto results = windfc::experiments::run_matrix(s->ds, kinds, cases, window, config,
                                                             t->spec, seed, threads);

        std::unique_ptr<windfc::experiments::ImprovementStat> improvement;
        try {
            improvement = std::make_unique<windfc::experiments::ImprovementStat>(
                windfc::experiments::improvement_stat(results));
        } catch (const windfc::data_error&) {
            // no complete speed/power pairing; results are still reported
        }

        const std::string results_json =
            windfc::report::matrix_json(results, improvement.get());

        if (out_dir) {
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            windfc::report::write_text_file((dir / "results.csv").string(),
                                            windfc::report::matrix_csv(results));
            windfc::report::write_text_file((dir / "results.json").string(), results_json);

            // One radar per kind over the nine cases, power-space metrics.
            const std::vector<std::string> axes = {"mae", "rmse", "smape", "r2"};
            for (const auto& kind_name : kind_names) {
                std::vector<windfc::report::MetricRow> rows;
                bool r2_ok = true;
                for (const auto& cell : results.cells) {
                    if (cell.kind != kind_name || !cell.result) continue;
                    const auto& rep = cell.result->power;
                    if (!rep.r2) r2_ok = false;
                    rows.push_back({"C" + std::to_string(cell.spec.id),
                                    {rep.mae, rep.rmse, rep.smape, rep.r2.value_or(0.0)}});
                }
                if (rows.size() < 2) continue;
                std::vector<std::string> use_axes = axes;
                if (!r2_ok) {
                    use_axes.pop_back();
                    for (auto& row : rows) row.values.pop_back();
                }
                const auto chart = windfc::report::normalize_for_radar(use_axes, rows);
                windfc::report::write_text_file((dir / ("radar_cases_" + kind_name + ".svg")).string(),
                                                windfc::report::emit_svg(chart));
            }
            // And one radar comparing kinds by mean power-space metrics.
            if (kind_names.size() >= 2) {
                std::vector<windfc::report::MetricRow> rows;
                for (const auto& kind_name : kind_names) {
                    double mae = 0, rmse = 0, smape = 0, r2 = 0;
                    int n = 0;
                    bool r2_ok = true;
                    for (const auto& cell : results.cells) {
                        if (cell.kind != kind_name || !cell.result) continue;
                        const auto& rep = cell.result->power;
                        mae += rep.mae;
                        rmse += rep.rmse;
                        smape += rep.smape;
                        if (rep.r2) r2 += *rep.r2; else r2_ok = false;
                        ++n;
                    }
                    if (n == 0 || !r2_ok) continue;
                    rows.push_back({kind_name, {mae / n, rmse / n, smape / n, r2 / n}});
                }
                if (rows.size() >= 2) {
                    const auto chart = windfc::report::normalize_for_radar(axes, rows);
                    windfc::report::write_text_file((dir / "radar_models.svg").string(),
                                                    windfc::report::emit_svg(chart));
                }
            }
        }
        if (summary_json_out) *summary_json_out = dup_string(results_json);
    });
}

wf_status wf_run_sweep(const wf_series* s, const wf_turbine* t, const char* options_json,
                       const char* out_csv_path, char** summary_json_out) {
    return guarded([&] {
        if (!s || !t) throw windfc::usage_error("wf_run_sweep: null argument");
        const json j = parse_options(options_json);
        const std::string kind_str = opt<std::string>(j, "model", "fcnn");
        const windfc::models::ModelKind kind = kind_from(j, kind_str);
        const std::uint64_t seed = opt<std::uint64_t>(j, "seed", 42);
        const int threads = opt<int>(j, "threads", 0);
        const auto config = train_config_from(j, seed);

        const auto past_hours = opt<std::vector<double>>(j, "past_hours", {1, 3, 6, 12, 24});
        const auto horizon_minutes =
            opt<std::vector<double>>(j, "horizon_minutes", {10, 30, 60, 180, 360});
        const int cadence = s->ds.cadence_minutes;
        std::vector<int> past_steps, horizon_steps;
        for (double h : past_hours) {
            const int steps = static_cast<int>(h * 60.0 / cadence + 0.5);
            if (steps < 1) throw windfc::usage_error("sweep: past window shorter than cadence");
            past_steps.push_back(steps);
        }
        for (double m : horizon_minutes) {
            const int steps = static_cast<int>(m / cadence + 0.5);
            if (steps < 1) throw windfc::usage_error("sweep: horizon shorter than cadence");
            horizon_steps.push_back(steps);
        }

        const auto inputs = opt<std::vector<std::string>>(
            j, "inputs",
            {windfc::experiments::kWspdAnem, windfc::experiments::kGstAnem,
             windfc::experiments::kPres, windfc::experiments::kAtmp, windfc::experiments::kWtmp});
        const std::string target = opt<std::string>(j, "target", windfc::experiments::kWspdAnem);

        const auto sweep = windfc::experiments::window_sweep(
            s->ds, t->spec, inputs, target, past_steps, horizon_steps, kind, config, seed, threads);

        const std::string csv = windfc::report::sweep_csv(sweep);
        if (out_csv_path) windfc::report::write_text_file(out_csv_path, csv);
        if (summary_json_out) {
            std::string out = "{\"cells\":" + std::to_string(sweep.cells.size());
            std::size_t skipped = 0;
            for (const auto& c : sweep.cells) skipped += c.skipped ? 1 : 0;
            out += ",\"skipped\":" + std::to_string(skipped);
            out += ",\"csv\":" + json(csv).dump();
            out += '}';
            *summary_json_out = dup_string(out);
        }
    });
}

wf_status wf_fixture_write_csv(const char* options_json, const char* path) {
    return guarded([&] {
        if (!path) throw windfc::usage_error("wf_fixture_write_csv: null path");
        const json j = parse_options(options_json);
        const auto ds = windfc::fixture::generate(fixture_config_from(j));
        std::ofstream outf(path, std::ios::binary);
        if (!outf) throw windfc::data_error(std::string("cannot write '") + path + "'");
        windfc::ingest::write_csv(ds, outf);
    });
}

} // extern "C"

// windfc command-line tool. Everything goes through the C API in windfc.h;
// this file only parses flags, assembles option JSON and renders output.

#include <windfc.h>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct StringOut {
    char* ptr = nullptr;
    ~StringOut() { wf_string_free(ptr); }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int fail(wf_status status) {
    std::cerr << "error: " << wf_last_error() << "\n";
    return static_cast<int>(status);
}

struct SeriesHandle {
    wf_series* ptr = nullptr;
    ~SeriesHandle() { wf_series_free(ptr); }
};
struct TurbineHandle {
    wf_turbine* ptr = nullptr;
    ~TurbineHandle() { wf_turbine_free(ptr); }
};
struct ModelHandle {
    wf_model* ptr = nullptr;
    ~ModelHandle() { wf_model_free(ptr); }
};

// Global options shared by the data-driven subcommands.
struct Common {
    std::string turbine_config;
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    std::string window; // "P,H"
    int cadence = 10;
    int epochs = 0;
    int batch = 0;
    int patience = 0;
    double learning_rate = 0.0;
    int threads = 0;
};

int load_turbine(const Common& common, TurbineHandle& turbine) {
    wf_status status = common.turbine_config.empty()
                           ? wf_turbine_default(&turbine.ptr)
                           : wf_turbine_from_json_file(common.turbine_config.c_str(), &turbine.ptr);
    return status == WF_OK ? 0 : static_cast<int>(status);
}

json window_json(const std::string& window) {
    json w;
    if (window.empty()) return w;
    int p = 0, h = 0;
    if (std::sscanf(window.c_str(), "%d,%d", &p, &h) != 2) {
        throw CLI::ValidationError("--window", "expected P,H (steps), e.g. 18,1");
    }
    w["past_steps"] = p;
    w["horizon_steps"] = h;
    return w;
}

json train_json(const Common& common) {
    json t;
    t["seed"] = common.seed;
    if (common.epochs > 0) t["epochs"] = common.epochs;
    if (common.batch > 0) t["batch"] = common.batch;
    if (common.patience > 0) t["patience"] = common.patience;
    if (common.learning_rate > 0.0) t["learning_rate"] = common.learning_rate;
    return t;
}

void print_metric_line(const std::string& label, const json& m) {
    std::printf("  %-18s mae=%-10.4f rmse=%-10.4f", label.c_str(), m.at("mae").get<double>(),
                m.at("rmse").get<double>());
    if (m.contains("mape") && !m.at("mape").is_null()) {
        std::printf(" mape=%-9.3f", m.at("mape").get<double>());
    } else {
        std::printf(" mape=%-9s", "n/a");
    }
    std::printf(" smape=%-9.3f", m.at("smape").get<double>());
    if (m.contains("r2") && !m.at("r2").is_null()) {
        std::printf(" r2=%.4f", m.at("r2").get<double>());
    } else {
        std::printf(" r2=n/a");
    }
    std::printf("\n");
}

int cmd_ingest(const Common& common, const std::string& input, const std::string& out_csv,
               const std::string& repair_log) {
    SeriesHandle series;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    StringOut summary;
    if ((status = wf_series_summary_json(series.ptr, &summary.ptr)) != WF_OK) return fail(status);
    const json s = json::parse(summary.str());
    std::printf("rows: %zu (%zu inserted, %zu duplicates dropped)\n",
                s.at("rows").get<std::size_t>(), s.at("rows_inserted").get<std::size_t>(),
                s.at("duplicates_dropped").get<std::size_t>());
    std::printf("span: %s .. %s\n", s.at("first").get<std::string>().c_str(),
                s.at("last").get<std::string>().c_str());
    std::printf("%-6s %10s %10s %10s\n", "field", "observed", "imputed", "missing");
    for (const auto& [name, st] : s.at("fields").items()) {
        std::printf("%-6s %10zu %10zu %10zu\n", name.c_str(), st.at("observed").get<std::size_t>(),
                    st.at("imputed").get<std::size_t>(), st.at("missing").get<std::size_t>());
    }
    if (!out_csv.empty()) {
        if ((status = wf_series_write_csv(series.ptr, out_csv.c_str())) != WF_OK) {
            return fail(status);
        }
        std::printf("wrote %s\n", out_csv.c_str());
    }
    if (!repair_log.empty()) {
        if ((status = wf_series_write_repair_log(series.ptr, repair_log.c_str())) != WF_OK) {
            return fail(status);
        }
        std::printf("wrote %s\n", repair_log.c_str());
    }
    return 0;
}

int cmd_features(const Common& common, const std::string& input, const std::string& target,
                 int trees, bool write_files) {
    SeriesHandle series;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    json options;
    options["target"] = target;
    options["seed"] = common.seed;
    options["forest"] = {{"trees", trees}};
    if (write_files) options["out_dir"] = common.out_dir;
    StringOut report;
    if ((status = wf_features_report(series.ptr, options.dump().c_str(), &report.ptr)) != WF_OK) {
        return fail(status);
    }
    const json r = json::parse(report.str());

    const auto& corr = r.at("correlation");
    const auto names = corr.at("features").get<std::vector<std::string>>();
    std::printf("correlation matrix (%zu complete rows):\n%8s", r.at("complete_rows").get<std::size_t>(), "");
    for (const auto& n : names) std::printf(" %7s", n.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::printf("%8s", names[i].c_str());
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto& v = corr.at("values").at(i).at(c);
            if (v.is_null()) {
                std::printf(" %7s", "undef");
            } else {
                std::printf(" %7.3f", v.get<double>());
            }
        }
        std::printf("\n");
    }
    std::printf("\nforest importance (target %s):\n", target.c_str());
    for (const auto& [name, w] : r.at("importance").items()) {
        std::printf("  %-6s %.4f\n", name.c_str(), w.get<double>());
    }
    if (r.contains("oob_r2")) std::printf("  out-of-bag r2: %.4f\n", r.at("oob_r2").get<double>());
    std::printf("\nselection:\n  kept:");
    for (const auto& k : r.at("selection").at("kept")) {
        std::printf(" %s", k.get<std::string>().c_str());
    }
    std::printf("\n");
    for (const auto& [name, reason] : r.at("selection").at("dropped").items()) {
        std::printf("  dropped %s (%s)\n", name.c_str(), reason.get<std::string>().c_str());
    }
    if (write_files) std::printf("\nwrote feature reports to %s\n", common.out_dir.c_str());
    return 0;
}

int cmd_sweep(const Common& common, const std::string& input, const std::string& model,
              const std::string& out_csv) {
    SeriesHandle series;
    TurbineHandle turbine;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    if (int rc = load_turbine(common, turbine)) return rc;

    json options;
    options["model"] = model;
    options["seed"] = common.seed;
    options["threads"] = common.threads;
    options["train"] = train_json(common);
    if (!common.window.empty()) {
        throw CLI::ValidationError("--window", "the sweep chooses its own window sizes");
    }
    StringOut summary;
    status = wf_run_sweep(series.ptr, turbine.ptr, options.dump().c_str(), out_csv.c_str(),
                          &summary.ptr);
    if (status != WF_OK) return fail(status);
    const json s = json::parse(summary.str());
    std::printf("%s", s.at("csv").get<std::string>().c_str());
    std::printf("wrote %s (%zu cells, %zu skipped)\n", out_csv.c_str(),
                s.at("cells").get<std::size_t>(), s.at("skipped").get<std::size_t>());
    return 0;
}

int cmd_cases(const Common& common, const std::string& input, const std::string& models_csv) {
    SeriesHandle series;
    TurbineHandle turbine;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    if (int rc = load_turbine(common, turbine)) return rc;

    json options;
    std::vector<std::string> models;
    std::string token;
    for (char c : models_csv + ",") {
        if (c == ',') {
            if (!token.empty()) models.push_back(token);
            token.clear();
        } else {
            token += c;
        }
    }
    options["models"] = models;
    options["seed"] = common.seed;
    options["threads"] = common.threads;
    options["train"] = train_json(common);
    const json w = window_json(common.window);
    if (!w.is_null() && !w.empty()) options["window"] = w;

    StringOut summary;
    status = wf_run_cases(series.ptr, turbine.ptr, options.dump().c_str(), common.out_dir.c_str(),
                          &summary.ptr);
    if (status != WF_OK) return fail(status);
    const json s = json::parse(summary.str());
    for (const auto& cell : s.at("cases")) {
        const std::string label =
            "C" + std::to_string(cell.at("case").get<int>()) + " " + cell.at("kind").get<std::string>();
        if (cell.contains("error")) {
            std::printf("  %-18s FAILED: %s\n", label.c_str(),
                        cell.at("error").get<std::string>().c_str());
            continue;
        }
        print_metric_line(label + " [power MW]", cell.at("power_mw"));
    }
    if (s.contains("improvement")) {
        const auto& imp = s.at("improvement");
        std::printf("\nspeed-output vs power-output improvement (power-space RMSE):\n");
        for (const auto& pk : imp.at("per_kind")) {
            std::printf("  %-6s %6.2f%%  (speed %.4f MW vs power %.4f MW)\n",
                        pk.at("kind").get<std::string>().c_str(),
                        pk.at("improvement_percent").get<double>(),
                        pk.at("speed_output_rmse_mw").get<double>(),
                        pk.at("power_output_rmse_mw").get<double>());
        }
        std::printf("  pooled %6.2f%%\n", imp.at("pooled_improvement_percent").get<double>());
    }
    std::printf("\nwrote results and radar charts to %s\n", common.out_dir.c_str());
    return 0;
}

int cmd_physics_convert(const Common& common, double speed, double height) {
    TurbineHandle turbine;
    if (int rc = load_turbine(common, turbine)) return rc;
    double hub_speed = 0.0;
    wf_status status = wf_turbine_extrapolate(turbine.ptr, speed, height, &hub_speed);
    if (status != WF_OK) return fail(status);
    double watts = 0.0;
    if ((status = wf_turbine_power(turbine.ptr, hub_speed, &watts)) != WF_OK) return fail(status);

    StringOut info;
    if ((status = wf_turbine_info_json(turbine.ptr, &info.ptr)) != WF_OK) return fail(status);
    const json t = json::parse(info.str());
    std::printf("speed at %.2f m: %.4f m/s\n", height, speed);
    std::printf("speed at hub (%.0f m): %.4f m/s\n", t.at("hub_height").get<double>(), hub_speed);
    std::printf("power: %.6f MW\n", watts / 1e6);
    const double cut_in = t.at("cut_in").get<double>();
    const double rated = t.at("rated_speed").get<double>();
    const double cut_out = t.at("cut_out").get<double>();
    if (hub_speed < cut_in) {
        std::printf("band: below cut-in (%.1f m/s)\n", cut_in);
    } else if (hub_speed < rated) {
        std::printf("band: cubic region [%.1f, %.1f) m/s\n", cut_in, rated);
    } else if (hub_speed < cut_out) {
        std::printf("band: rated plateau [%.1f, %.1f) m/s\n", rated, cut_out);
        if (hub_speed - rated < 0.1) {
            std::printf("note: at the rated-speed boundary, power caps at %.1f MW\n",
                        t.at("rated_power").get<double>() / 1e6);
        }
    } else {
        std::printf("band: above cut-out (%.1f m/s), turbine stopped\n", cut_out);
    }
    return 0;
}

int cmd_train(const Common& common, const std::string& input, const std::string& kind,
              const std::string& inputs_csv, const std::string& target,
              const std::string& model_file) {
    SeriesHandle series;
    TurbineHandle turbine;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    if (int rc = load_turbine(common, turbine)) return rc;

    json options;
    options["kind"] = kind;
    options["seed"] = common.seed;
    options["train"] = train_json(common);
    const json w = window_json(common.window);
    if (!w.is_null() && !w.empty()) options["window"] = w;
    std::vector<std::string> inputs;
    std::string token;
    for (char c : inputs_csv + ",") {
        if (c == ',') {
            if (!token.empty()) inputs.push_back(token);
            token.clear();
        } else {
            token += c;
        }
    }
    options["inputs"] = inputs;
    options["target"] = target;

    ModelHandle model;
    StringOut summary;
    status = wf_train(series.ptr, turbine.ptr, options.dump().c_str(), &model.ptr, &summary.ptr);
    if (status != WF_OK) return fail(status);
    if ((status = wf_model_save(model.ptr, model_file.c_str())) != WF_OK) return fail(status);

    const json s = json::parse(summary.str());
    std::printf("trained %s: %zu epochs (best %d), %zu/%zu/%zu train/val/test samples\n",
                s.at("kind").get<std::string>().c_str(), s.at("epochs_run").get<std::size_t>(),
                s.at("best_epoch").get<int>(), s.at("train_samples").get<std::size_t>(),
                s.at("val_samples").get<std::size_t>(), s.at("test_samples").get<std::size_t>());
    print_metric_line("test", s.at("test"));
    std::printf("wrote %s\n", model_file.c_str());
    return 0;
}

int cmd_predict(const Common& common, const std::string& input, const std::string& model_file,
                const std::string& out_csv) {
    SeriesHandle series;
    TurbineHandle turbine;
    ModelHandle model;
    wf_status status = wf_series_load(input.c_str(), common.cadence, &series.ptr);
    if (status != WF_OK) return fail(status);
    if (int rc = load_turbine(common, turbine)) return rc;
    if ((status = wf_model_load(model_file.c_str(), &model.ptr)) != WF_OK) return fail(status);

    StringOut metrics;
    status = wf_model_predict_csv(model.ptr, series.ptr, turbine.ptr,
                                  out_csv.empty() ? nullptr : out_csv.c_str(), &metrics.ptr);
    if (status != WF_OK) return fail(status);
    print_metric_line("whole series", json::parse(metrics.str()));
    if (!out_csv.empty()) std::printf("wrote %s\n", out_csv.c_str());
    return 0;
}

int cmd_fixture(const Common& common, std::size_t rows, const std::string& out_csv) {
    json options;
    options["rows"] = rows;
    options["seed"] = common.seed;
    options["cadence_minutes"] = common.cadence;
    wf_status status = wf_fixture_write_csv(options.dump().c_str(), out_csv.c_str());
    if (status != WF_OK) return fail(status);
    std::printf("wrote %zu-row synthetic series to %s\n", rows, out_csv.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"offshore wind forecasting toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    Common common;
    app.add_option("--turbine", common.turbine_config, "turbine config JSON file");
    app.add_option("--out-dir", common.out_dir, "output directory for generated files");
    app.add_option("--seed", common.seed, "master seed");
    app.add_option("--window", common.window, "window as P,H in 10-minute steps (default 18,1)");
    app.add_option("--cadence", common.cadence, "series cadence in minutes");
    app.add_option("--epochs", common.epochs, "max training epochs");
    app.add_option("--batch", common.batch, "mini-batch size");
    app.add_option("--patience", common.patience, "early-stopping patience");
    app.add_option("--learning-rate", common.learning_rate, "optimizer learning rate");
    app.add_option("--threads", common.threads, "worker threads for experiment grids");

    std::string input, out_csv, repair_log, target = "WSPD", model = "fcnn";
    std::string models_csv = "ridge,fcnn,gru";
    std::string inputs_csv = "WSPD3.8,GST3.8,PRES,ATMP,WTMP";
    std::string train_target = "WSPD3.8";
    std::string model_file = "model.json";
    int trees = 100;
    bool write_feature_files = false;
    double speed = 0.0, height = 3.8;
    std::size_t fixture_rows = 20000;

    auto* ingest = app.add_subcommand("ingest", "parse and repair a buoy series");
    ingest->add_option("input", input, "NDBC text or CSV file")->required();
    ingest->add_option("--out", out_csv, "write the repaired series as CSV");
    ingest->add_option("--repair-log", repair_log, "write the repair log as JSON lines");

    auto* features = app.add_subcommand("features", "correlation, importance and selection");
    features->add_option("input", input, "series file")->required();
    features->add_option("--target", target, "target field for the analysis");
    features->add_option("--trees", trees, "forest size");
    features->add_flag("--write", write_feature_files, "also write CSV/JSON reports to --out-dir");

    auto* sweep = app.add_subcommand("sweep", "window-size sweep on the validation split");
    sweep->add_option("input", input, "series file")->required();
    sweep->add_option("--model", model, "model kind (ridge, fcnn, gru)");
    sweep->add_option("--out", out_csv, "output CSV path")->default_str("sweep.csv");

    auto* cases = app.add_subcommand("cases", "run the nine feature-combination cases");
    cases->add_option("input", input, "series file")->required();
    cases->add_option("--models", models_csv, "comma-separated model kinds");

    auto* physics = app.add_subcommand("physics", "physical conversions");
    auto* convert = physics->add_subcommand("convert", "extrapolate a speed and convert to power");
    convert->add_option("--speed", speed, "wind speed in m/s")->required();
    convert->add_option("--height", height, "measurement height in m");

    auto* train = app.add_subcommand("train", "train a single model");
    train->add_option("input", input, "series file")->required();
    train->add_option("--kind", model, "model kind (ridge, fcnn, gru)");
    train->add_option("--inputs", inputs_csv, "comma-separated input features");
    train->add_option("--target", train_target, "target feature");
    train->add_option("--model-file", model_file, "where to save the model");

    auto* predict = app.add_subcommand("predict", "predict with a saved model");
    predict->add_option("input", input, "series file")->required();
    predict->add_option("--model-file", model_file, "saved model JSON")->required();
    predict->add_option("--out", out_csv, "write timestamp,actual,predicted CSV");

    auto* fixture = app.add_subcommand("fixture", "write a synthetic series");
    fixture->add_option("--rows", fixture_rows, "row count");
    fixture->add_option("--out", out_csv, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(common, input, out_csv, repair_log);
        if (features->parsed()) {
            return cmd_features(common, input, target, trees, write_feature_files);
        }
        if (sweep->parsed()) {
            return cmd_sweep(common, input, model, out_csv.empty() ? "sweep.csv" : out_csv);
        }
        if (cases->parsed()) return cmd_cases(common, input, models_csv);
        if (physics->parsed()) {
            if (convert->parsed()) return cmd_physics_convert(common, speed, height);
            std::cerr << "error: physics needs a subcommand (convert)\n";
            return 1;
        }
        if (train->parsed()) {
            return cmd_train(common, input, model, inputs_csv, train_target, model_file);
        }
        if (predict->parsed()) return cmd_predict(common, input, model_file, out_csv);
        if (fixture->parsed()) return cmd_fixture(common, fixture_rows, out_csv);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

#include "windfc/models.hpp"

#include "windfc/errors.hpp"
#include "nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace windfc::models {

std::string kind_name(const ModelKind& kind) {
    if (std::holds_alternative<Ridge>(kind)) return "ridge";
    if (std::holds_alternative<Fcnn>(kind)) return "fcnn";
    return "gru";
}

void validate_kind(const ModelKind& kind) {
    if (const auto* r = std::get_if<Ridge>(&kind)) {
        if (r->lambda < 0.0) throw usage_error("ridge: lambda must be >= 0");
    } else if (const auto* f = std::get_if<Fcnn>(&kind)) {
        for (int h : f->hidden) {
            if (h < 1) throw usage_error("fcnn: hidden layer sizes must be >= 1");
        }
    } else if (const auto* g = std::get_if<Gru>(&kind)) {
        if (g->hidden < 1) throw usage_error("gru: hidden size must be >= 1");
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw usage_error("train config: learning_rate must be > 0");
    if (patience < 1) throw usage_error("train config: patience must be >= 1");
    if (max_epochs < 1) throw usage_error("train config: max_epochs must be >= 1");
    if (batch_size < 1) throw usage_error("train config: batch_size must be >= 1");
}

namespace {

// --- ridge -------------------------------------------------------------------

void fit_ridge(TrainedModel& model, const windowing::WindowedSet& set, double lambda) {
    Eigen::MatrixXd Xtr, Xval;
    Eigen::VectorXd ytr, yval;
    windowing::flattened_normalized(set, 0, Xtr, ytr);
    windowing::flattened_normalized(set, 1, Xval, yval);

    const Eigen::Index n = Xtr.rows();
    const Eigen::Index d = Xtr.cols();
    Eigen::MatrixXd X(n, d + 1);
    X.leftCols(d) = Xtr;
    X.col(d).setOnes();

    Eigen::MatrixXd A = X.transpose() * X;
    A.diagonal().array() += lambda;
    Eigen::VectorXd b = X.transpose() * ytr;
    const auto ldlt = A.ldlt();
    Eigen::VectorXd w = ldlt.solve(b);

    // The normal equations are always consistent, so a residual check cannot
    // see rank deficiency; inspect the pivots instead.
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    if (!w.allFinite() || pivots.minCoeff() < 1e-12 * pivots.maxCoeff()) {
        throw numeric_error("ridge: normal equations are singular; use lambda > 0");
    }

    model.params.clear();
    model.params.push_back(w.head(d));
    model.params.push_back(Eigen::MatrixXd::Constant(1, 1, w[d]));

    auto mse = [&](const Eigen::MatrixXd& Xs, const Eigen::VectorXd& ys) {
        const Eigen::VectorXd pred =
            (Xs * w.head(d)).array() + w[d];
        return (pred - ys).squaredNorm() / static_cast<double>(ys.size());
    };
    model.history.push_back({mse(Xtr, ytr), mse(Xval, yval)});
    model.best_epoch = 0;
}

// --- gradient training -------------------------------------------------------

// Runs seeded mini-batch training with early stopping on validation loss.
// batch_sse(indices, grads) returns the batch sum of squared errors and fills
// grads with the mean-loss gradient; val_sse() evaluates the validation split.
template <typename BatchFn, typename ValFn>
void train_loop(nn::ParamList& params, Eigen::Index n_train, Eigen::Index n_val,
                const TrainConfig& config, TrainedModel& model, BatchFn&& batch_sse,
                ValFn&& val_sse) {
    nn::ParamList grads = nn::zeros_like(params);
    nn::ParamList adam_m = nn::zeros_like(params);
    nn::ParamList adam_v = nn::zeros_like(params);
    long adam_t = 0;

    std::mt19937_64 shuffle_rng(derive_seed(config.seed, "shuffle"));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
    std::iota(order.begin(), order.end(), 0);

    nn::ParamList best_params = params;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded_rand(shuffle_rng, i));
            std::swap(order[i - 1], order[j]);
        }

        double train_sse = 0.0;
        for (Eigen::Index start = 0; start < n_train; start += config.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(config.batch_size, n_train - start);
            train_sse += batch_sse(std::span<const Eigen::Index>(order.data() + start,
                                                                 static_cast<std::size_t>(count)),
                                   grads);
            ++adam_t;
            const double corr1 = 1.0 - std::pow(config.beta1, static_cast<double>(adam_t));
            const double corr2 = 1.0 - std::pow(config.beta2, static_cast<double>(adam_t));
            for (std::size_t p = 0; p < params.size(); ++p) {
                adam_m[p] = config.beta1 * adam_m[p] + (1.0 - config.beta1) * grads[p];
                adam_v[p] = (config.beta2 * adam_v[p].array() +
                             (1.0 - config.beta2) * grads[p].array().square())
                                .matrix();
                params[p].array() -= config.learning_rate * (adam_m[p].array() / corr1) /
                                     ((adam_v[p].array() / corr2).sqrt() + config.epsilon);
            }
        }

        const double train_loss = train_sse / static_cast<double>(n_train);
        const double val_loss = val_sse() / static_cast<double>(n_val);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            std::string last = model.history.empty()
                                   ? "none"
                                   : fmt_shortest(model.history.back().val_loss) + " at epoch " +
                                         std::to_string(model.history.size() - 1);
            throw numeric_error("training diverged at epoch " + std::to_string(epoch) +
                                "; last finite val loss: " + last +
                                "; reduce the learning rate");
        }
        model.history.push_back({train_loss, val_loss});

        if (val_loss < best_val) {
            best_val = val_loss;
            model.best_epoch = epoch;
            best_params = params;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    params = best_params;
}

Eigen::MatrixXd gather_cols(const Eigen::MatrixXd& X, std::span<const Eigen::Index> idx) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = X.col(idx[i]);
    }
    return out;
}

void fit_fcnn(TrainedModel& model, const windowing::WindowedSet& set, const Fcnn& fcnn,
              const TrainConfig& config) {
    Eigen::MatrixXd Xtr_rows, Xval_rows;
    Eigen::VectorXd ytr, yval;
    windowing::flattened_normalized(set, 0, Xtr_rows, ytr);
    windowing::flattened_normalized(set, 1, Xval_rows, yval);
    const Eigen::MatrixXd Xtr = Xtr_rows.transpose(); // D x N
    const Eigen::MatrixXd Xval = Xval_rows.transpose();

    std::vector<int> sizes;
    sizes.push_back(static_cast<int>(Xtr.rows()));
    sizes.insert(sizes.end(), fcnn.hidden.begin(), fcnn.hidden.end());
    sizes.push_back(1);

    std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
    model.params = nn::fcnn_init(sizes, init_rng);

    auto batch_sse = [&](std::span<const Eigen::Index> idx, nn::ParamList& grads) {
        Eigen::MatrixXd Xb = gather_cols(Xtr, idx);
        Eigen::VectorXd yb(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) yb[static_cast<Eigen::Index>(i)] = ytr[idx[i]];
        return nn::fcnn_backward(model.params, Xb, yb, grads);
    };
    auto val_sse = [&]() {
        const Eigen::RowVectorXd pred = nn::fcnn_forward(model.params, Xval);
        return (pred.transpose() - yval).squaredNorm();
    };
    train_loop(model.params, Xtr.cols(), Xval.cols(), config, model, batch_sse, val_sse);
}

void fit_gru(TrainedModel& model, const windowing::WindowedSet& set, const Gru& gru,
             const TrainConfig& config) {
    std::vector<Eigen::MatrixXd> steps_tr, steps_val;
    Eigen::VectorXd ytr, yval;
    windowing::sequence_normalized(set, 0, steps_tr, ytr);
    windowing::sequence_normalized(set, 1, steps_val, yval);
    const int F = static_cast<int>(steps_tr.front().rows());

    std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
    model.params = nn::gru_init(F, gru.hidden, init_rng);

    std::vector<Eigen::MatrixXd> xb(steps_tr.size());
    auto batch_sse = [&](std::span<const Eigen::Index> idx, nn::ParamList& grads) {
        for (std::size_t t = 0; t < steps_tr.size(); ++t) xb[t] = gather_cols(steps_tr[t], idx);
        Eigen::VectorXd yb(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) yb[static_cast<Eigen::Index>(i)] = ytr[idx[i]];
        return nn::gru_backward(model.params, xb, yb, grads);
    };
    auto val_sse = [&]() {
        const Eigen::RowVectorXd pred = nn::gru_forward(model.params, steps_val);
        return (pred.transpose() - yval).squaredNorm();
    };
    train_loop(model.params, steps_tr.front().cols(), steps_val.front().cols(), config, model,
               batch_sse, val_sse);
}

} // namespace

TrainedModel fit(const windowing::WindowedSet& set, const ModelKind& kind,
                 const TrainConfig& config) {
    validate_kind(kind);
    config.validate();
    if (set.train.empty() || set.val.empty()) {
        throw data_error("fit: train and validation splits must be non-empty");
    }

    TrainedModel model;
    model.kind = kind;
    model.spec = set.spec;
    model.normalizer = set.normalizer;
    model.config = config;

    if (const auto* r = std::get_if<Ridge>(&kind)) {
        fit_ridge(model, set, r->lambda);
    } else if (const auto* f = std::get_if<Fcnn>(&kind)) {
        fit_fcnn(model, set, *f, config);
    } else {
        fit_gru(model, set, std::get<Gru>(kind), config);
    }
    return model;
}

namespace {

void check_input_shape(const TrainedModel& model, const Eigen::MatrixXd& input) {
    const int P = model.spec.past_steps;
    const int F = static_cast<int>(model.spec.input_features.size());
    if (input.rows() != P || input.cols() != F) {
        throw data_error("predict: expected " + std::to_string(P) + "x" + std::to_string(F) +
                         " window, got " + std::to_string(input.rows()) + "x" +
                         std::to_string(input.cols()));
    }
}

} // namespace

Eigen::VectorXd predict(const TrainedModel& model, std::span<const Eigen::MatrixXd> inputs) {
    const int P = model.spec.past_steps;
    const int F = static_cast<int>(model.spec.input_features.size());
    const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
    const auto& nz = model.normalizer;

    Eigen::RowVectorXd pred_norm(n);
    if (std::holds_alternative<Gru>(model.kind)) {
        std::vector<Eigen::MatrixXd> steps(static_cast<std::size_t>(P), Eigen::MatrixXd(F, n));
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& input = inputs[static_cast<std::size_t>(i)];
            check_input_shape(model, input);
            for (int t = 0; t < P; ++t) {
                for (int f = 0; f < F; ++f) {
                    steps[static_cast<std::size_t>(t)](f, i) =
                        windowing::quantize(nz.apply_feature(f, input(t, f)));
                }
            }
        }
        pred_norm = nn::gru_forward(model.params, steps);
    } else {
        Eigen::MatrixXd X(P * F, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& input = inputs[static_cast<std::size_t>(i)];
            check_input_shape(model, input);
            for (int t = 0; t < P; ++t) {
                for (int f = 0; f < F; ++f) {
                    X(t * F + f, i) = windowing::quantize(nz.apply_feature(f, input(t, f)));
                }
            }
        }
        if (std::holds_alternative<Ridge>(model.kind)) {
            pred_norm = (model.params[0].transpose() * X).row(0);
            pred_norm.array() += model.params[1](0, 0);
        } else {
            pred_norm = nn::fcnn_forward(model.params, X);
        }
    }

    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = nz.invert_target(pred_norm[i]);
    return out;
}

double predict_one(const TrainedModel& model, const Eigen::MatrixXd& input) {
    return predict(model, std::span<const Eigen::MatrixXd>(&input, 1))[0];
}

SplitEval predict_split(const TrainedModel& model, const windowing::WindowedSet& set, int split) {
    const auto& samples = set.split(split);
    std::vector<Eigen::MatrixXd> inputs;
    inputs.reserve(samples.size());
    SplitEval eval;
    eval.y_true.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        inputs.push_back(samples[i].input);
        eval.y_true[static_cast<Eigen::Index>(i)] = samples[i].target;
    }
    eval.y_pred = predict(model, inputs);
    return eval;
}

double grad_check(const ModelKind& kind, const Eigen::MatrixXd& sample_input, double target,
                  double epsilon, std::uint64_t seed) {
    validate_kind(kind);
    const int P = static_cast<int>(sample_input.rows());
    const int F = static_cast<int>(sample_input.cols());
    std::mt19937_64 rng(derive_seed(seed, "gradcheck"));

    nn::ParamList params;
    std::vector<Eigen::MatrixXd> steps;
    Eigen::MatrixXd flat;
    const bool is_gru = std::holds_alternative<Gru>(kind);
    if (is_gru) {
        params = nn::gru_init(F, std::get<Gru>(kind).hidden, rng);
        steps.assign(static_cast<std::size_t>(P), Eigen::MatrixXd(F, 1));
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) steps[static_cast<std::size_t>(t)](f, 0) = sample_input(t, f);
        }
    } else if (std::holds_alternative<Fcnn>(kind)) {
        std::vector<int> sizes;
        sizes.push_back(P * F);
        const auto& hidden = std::get<Fcnn>(kind).hidden;
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(1);
        params = nn::fcnn_init(sizes, rng);
        flat.resize(P * F, 1);
        for (int t = 0; t < P; ++t) {
            for (int f = 0; f < F; ++f) flat(t * F + f, 0) = sample_input(t, f);
        }
    } else {
        throw usage_error("grad_check: ridge is closed-form, nothing to check");
    }

    Eigen::VectorXd y(1);
    y[0] = target;
    nn::ParamList grads = nn::zeros_like(params);
    if (is_gru) {
        nn::gru_backward(params, steps, y, grads);
    } else {
        nn::fcnn_backward(params, flat, y, grads);
    }

    auto loss_at = [&]() {
        const Eigen::RowVectorXd pred =
            is_gru ? nn::gru_forward(params, steps) : nn::fcnn_forward(params, flat);
        const double e = y[0] - pred[0];
        return e * e;
    };

    double max_rel = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (Eigen::Index r = 0; r < params[p].rows(); ++r) {
            for (Eigen::Index c = 0; c < params[p].cols(); ++c) {
                const double saved = params[p](r, c);
                params[p](r, c) = saved + epsilon;
                const double up = loss_at();
                params[p](r, c) = saved - epsilon;
                const double down = loss_at();
                params[p](r, c) = saved;
                const double fd = (up - down) / (2.0 * epsilon);
                const double ga = grads[p](r, c);
                const double rel = std::abs(ga - fd) / std::max({std::abs(ga), std::abs(fd), 1e-8});
                max_rel = std::max(max_rel, rel);
            }
        }
    }
    return max_rel;
}

// --- persistence ---------------------------------------------------------------

namespace {

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::ordered_json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    j["data"] = data;
    return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw data_error("model file: parameter size mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
    }
    return m;
}

} // namespace

std::string save_json(const TrainedModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "windfc-model-v1";
    j["kind"] = kind_name(model.kind);
    if (const auto* r = std::get_if<Ridge>(&model.kind)) {
        j["kind_params"] = {{"lambda", r->lambda}};
    } else if (const auto* f = std::get_if<Fcnn>(&model.kind)) {
        j["kind_params"] = {{"hidden", f->hidden}};
    } else {
        j["kind_params"] = {{"hidden", std::get<Gru>(model.kind).hidden}};
    }
    j["window"] = {{"past_steps", model.spec.past_steps},
                   {"horizon_steps", model.spec.horizon_steps},
                   {"input_features", model.spec.input_features},
                   {"target_feature", model.spec.target_feature}};
    std::vector<double> mean(model.normalizer.mean.data(),
                             model.normalizer.mean.data() + model.normalizer.mean.size());
    std::vector<double> stddev(model.normalizer.stddev.data(),
                               model.normalizer.stddev.data() + model.normalizer.stddev.size());
    j["normalizer"] = {{"mean", mean},
                       {"stddev", stddev},
                       {"target_mean", model.normalizer.target_mean},
                       {"target_std", model.normalizer.target_std},
                       {"degenerate_features", model.normalizer.degenerate_features},
                       {"target_degenerate", model.normalizer.target_degenerate}};
    j["config"] = {{"seed", model.config.seed},
                   {"learning_rate", model.config.learning_rate},
                   {"max_epochs", model.config.max_epochs},
                   {"batch_size", model.config.batch_size},
                   {"patience", model.config.patience},
                   {"beta1", model.config.beta1},
                   {"beta2", model.config.beta2},
                   {"epsilon", model.config.epsilon}};
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& p : model.params) params.push_back(matrix_to_json(p));
    j["params"] = params;
    nlohmann::ordered_json history = nlohmann::ordered_json::array();
    for (const auto& h : model.history) history.push_back({h.train_loss, h.val_loss});
    j["history"] = history;
    j["best_epoch"] = model.best_epoch;
    return j.dump(2);
}

TrainedModel load_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model file: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "windfc-model-v1") {
            throw data_error("model file: unknown format tag");
        }
        TrainedModel model;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "ridge") {
            model.kind = Ridge{j.at("kind_params").at("lambda").get<double>()};
        } else if (kind == "fcnn") {
            model.kind = Fcnn{j.at("kind_params").at("hidden").get<std::vector<int>>()};
        } else if (kind == "gru") {
            model.kind = Gru{j.at("kind_params").at("hidden").get<int>()};
        } else {
            throw data_error("model file: unknown kind '" + kind + "'");
        }
        const auto& w = j.at("window");
        model.spec.past_steps = w.at("past_steps").get<int>();
        model.spec.horizon_steps = w.at("horizon_steps").get<int>();
        model.spec.input_features = w.at("input_features").get<std::vector<std::string>>();
        model.spec.target_feature = w.at("target_feature").get<std::string>();
        const auto& nz = j.at("normalizer");
        const auto mean = nz.at("mean").get<std::vector<double>>();
        const auto stddev = nz.at("stddev").get<std::vector<double>>();
        model.normalizer.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                                  static_cast<Eigen::Index>(mean.size()));
        model.normalizer.stddev =
            Eigen::Map<const Eigen::VectorXd>(stddev.data(), static_cast<Eigen::Index>(stddev.size()));
        model.normalizer.target_mean = nz.at("target_mean").get<double>();
        model.normalizer.target_std = nz.at("target_std").get<double>();
        model.normalizer.degenerate_features = nz.at("degenerate_features").get<std::vector<int>>();
        model.normalizer.target_degenerate = nz.at("target_degenerate").get<bool>();
        const auto& cfg = j.at("config");
        model.config.seed = cfg.at("seed").get<std::uint64_t>();
        model.config.learning_rate = cfg.at("learning_rate").get<double>();
        model.config.max_epochs = cfg.at("max_epochs").get<int>();
        model.config.batch_size = cfg.at("batch_size").get<int>();
        model.config.patience = cfg.at("patience").get<int>();
        model.config.beta1 = cfg.at("beta1").get<double>();
        model.config.beta2 = cfg.at("beta2").get<double>();
        model.config.epsilon = cfg.at("epsilon").get<double>();
        for (const auto& p : j.at("params")) model.params.push_back(matrix_from_json(p));
        for (const auto& h : j.at("history")) {
            model.history.push_back({h.at(0).get<double>(), h.at(1).get<double>()});
        }
        model.best_epoch = j.at("best_epoch").get<int>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model file: ") + e.what());
    }
}

void save_file(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write model file '" + path + "'");
    out << save_json(model) << '\n';
}

TrainedModel load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_json(ss.str());
}

} // namespace windfc::models

#pragma once

#include "windfc/windowing.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace windfc::models {

// L2-regularized linear model on the flattened window, solved in closed form.
struct Ridge {
    double lambda = 1e-3;
};

// Fully connected net on the flattened window: ReLU hidden layers, linear
// scalar output.
struct Fcnn {
    std::vector<int> hidden = {64, 32};
};

// Single-layer gated recurrent unit over the P-step window, linear head on
// the last hidden state.
struct Gru {
    int hidden = 32;
};

using ModelKind = std::variant<Ridge, Fcnn, Gru>;

std::string kind_name(const ModelKind& kind);
void validate_kind(const ModelKind& kind);

struct TrainConfig {
    std::uint64_t seed = 0;
    double learning_rate = 1e-3;
    int max_epochs = 200;
    int batch_size = 64;
    int patience = 10;
    double beta1 = 0.9;  // first-moment decay
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

// A fitted predictor plus everything needed to reproduce its predictions:
// the normalizer it was trained under and the window geometry.
struct TrainedModel {
    ModelKind kind;
    windowing::WindowSpec spec;
    windowing::Normalizer normalizer;
    // Parameter tensors in a fixed per-kind order (see save_json for layout).
    std::vector<Eigen::MatrixXd> params;
    std::vector<EpochStats> history;
    int best_epoch = 0;
    TrainConfig config;
};

TrainedModel fit(const windowing::WindowedSet& set, const ModelKind& kind,
                 const TrainConfig& config);

// Inputs are raw-unit P x F windows; predictions come back in target units.
Eigen::VectorXd predict(const TrainedModel& model, std::span<const Eigen::MatrixXd> inputs);
double predict_one(const TrainedModel& model, const Eigen::MatrixXd& input);

struct SplitEval {
    Eigen::VectorXd y_true;
    Eigen::VectorXd y_pred;
};
SplitEval predict_split(const TrainedModel& model, const windowing::WindowedSet& set, int split);

// Max relative disagreement between the analytic gradient and central finite
// differences at a random parameter point, over every parameter entry.
double grad_check(const ModelKind& kind, const Eigen::MatrixXd& sample_input, double target,
                  double epsilon = 1e-5, std::uint64_t seed = 0);

// Self-describing JSON; load(save(m)) reproduces predictions bit-exactly.
std::string save_json(const TrainedModel& model);
TrainedModel load_json(const std::string& text);
void save_file(const TrainedModel& model, const std::string& path);
TrainedModel load_file(const std::string& path);

} // namespace windfc::models

#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

// Batched forward/backward passes for the two gradient-trained kinds.
// Parameters are a flat list of matrices in a fixed order; column vectors are
// n x 1 matrices so the optimizer can treat everything uniformly.
namespace windfc::models::nn {

using ParamList = std::vector<Eigen::MatrixXd>;

// FCNN over sizes [d0, d1, ..., dL] (dL == 1):
//   params[2l] = W_l (d_{l+1} x d_l), params[2l+1] = b_l (d_{l+1} x 1)
ParamList fcnn_init(const std::vector<int>& sizes, std::mt19937_64& rng);
Eigen::RowVectorXd fcnn_forward(const ParamList& params, const Eigen::MatrixXd& X);
// Returns the sum of squared errors over the batch; grads are of the batch
// MEAN loss. grads must be preallocated with the parameter shapes.
double fcnn_backward(const ParamList& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     ParamList& grads);

// GRU with hidden size h over F-dimensional steps:
//   params = [Wz, Uz, bz, Wr, Ur, br, Wc, Uc, bc, head_w (1 x h), head_b (1 x 1)]
ParamList gru_init(int input_dim, int hidden, std::mt19937_64& rng);
Eigen::RowVectorXd gru_forward(const ParamList& params, const std::vector<Eigen::MatrixXd>& xsteps);
double gru_backward(const ParamList& params, const std::vector<Eigen::MatrixXd>& xsteps,
                    const Eigen::VectorXd& y, ParamList& grads);

ParamList zeros_like(const ParamList& params);

} // namespace windfc::models::nn

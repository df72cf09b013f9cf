#pragma once

#include "windfc/ingest.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace windfc::features {

struct CorrelationMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values; // symmetric, diagonal exactly 1, NaN where undefined
    std::vector<std::pair<int, int>> undefined_pairs; // zero-variance entries, i < j
    std::vector<int> zero_variance_features;

    double at(std::string_view a, std::string_view b) const;
    int index(std::string_view name) const;
    std::string csv(int precision = 6) const;
    std::string json(int precision = 6) const;
};

// Pearson r over complete rows (listwise exclusion of rows with any missing
// value among the named fields).
CorrelationMatrix pearson_matrix(const ingest::SeriesDataset& ds,
                                 const std::vector<std::string>& names);
CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& columns,
                                 const std::vector<std::string>& names);

// --- regression forest ------------------------------------------------------

struct ForestConfig {
    int tree_count = 100;
    int max_depth = 12;
    int min_samples_split = 10;
    bool bootstrap = true;        // per-tree resample of size n
    bool feature_subsample = true; // ceil(sqrt(F)) candidate features per split
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    double gain = 0.0; // impurity (SSE) reduction of this split
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
    int n_samples = 0;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
};

struct RegressionForest {
    ForestConfig config;
    int feature_count = 0;
    std::vector<Tree> trees;
    Eigen::VectorXd per_feature_gain; // sums to total_split_gain
    double total_split_gain = 0.0;
    std::optional<double> oob_r2; // set when bootstrap sampling is on
};

// Variance-reduction (MSE impurity) trees on bootstrap resamples; fully
// deterministic for a fixed seed, per-tree seeds derived from it.
RegressionForest fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const ForestConfig& config, std::uint64_t seed);

double predict_tree(const Tree& tree, const Eigen::RowVectorXd& row);
double predict(const RegressionForest& forest, const Eigen::RowVectorXd& row);

struct ImportanceResult {
    Eigen::VectorXd weights; // nonnegative, sums to 1
    bool degenerate = false; // no splits anywhere: uniform weights
};

// Share of the total impurity reduction attributable to each feature.
ImportanceResult importance(const RegressionForest& forest);

std::string importance_csv(const std::vector<std::string>& names, const Eigen::VectorXd& weights,
                           int precision = 6);
std::string importance_json(const std::vector<std::string>& names, const Eigen::VectorXd& weights,
                            int precision = 6);

// --- feature selection -------------------------------------------------------

enum class DropReason { low_correlation, redundant, low_importance };
std::string_view drop_reason_name(DropReason r);

struct SelectionPolicy {
    double low_corr_threshold = 0.1;  // drop when |r(f, target)| falls below
    double block_threshold = 0.85;    // pairwise |r| that forms a redundant block
    double low_importance_threshold = 0.0; // 0 disables the standalone importance rule
};

struct FeatureSelection {
    std::vector<std::string> kept; // candidate order preserved
    std::vector<std::pair<std::string, DropReason>> dropped;
    std::string json() const;
};

// Candidates are the correlation-matrix names; `importances` covers the
// non-target candidates (same order as `importance_names`). The target is
// always kept; blocks containing the target are exempt from the redundancy
// rule, and each remaining block loses its lowest-importance member.
FeatureSelection select_features(const CorrelationMatrix& corr,
                                 const std::vector<std::string>& importance_names,
                                 const Eigen::VectorXd& importances, const std::string& target,
                                 const SelectionPolicy& policy = {});

} // namespace windfc::features

#include "windfc/features.hpp"

#include "windfc/common.hpp"
#include "windfc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace windfc::features {

int CorrelationMatrix::index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double CorrelationMatrix::at(std::string_view a, std::string_view b) const {
    const int i = index(a);
    const int j = index(b);
    if (i < 0 || j < 0) throw data_error("correlation: unknown feature name");
    return values(i, j);
}

std::string CorrelationMatrix::csv(int precision) const {
    std::vector<std::string> header = {"feature"};
    header.insert(header.end(), names.begin(), names.end());
    std::string out = csv_join(header) + '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::vector<std::string> row = {names[i]};
        for (std::size_t j = 0; j < names.size(); ++j) {
            const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            row.push_back(std::isnan(v) ? "undefined" : fmt_fixed(v, precision));
        }
        out += csv_join(row) + '\n';
    }
    return out;
}

std::string CorrelationMatrix::json(int precision) const {
    std::string out = "{\"features\":[";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += '"' + names[i] + '"';
    }
    out += "],\"values\":[";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += '[';
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j) out += ',';
            const double v = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out += std::isnan(v) ? "null" : fmt_fixed(v, precision);
        }
        out += ']';
    }
    out += "]}";
    return out;
}

CorrelationMatrix pearson_matrix(const ingest::SeriesDataset& ds,
                                 const std::vector<std::string>& names) {
    std::vector<int> fields;
    for (const auto& n : names) {
        const int f = ingest::field_index(n);
        if (f < 0) throw data_error("pearson_matrix: unknown field '" + n + "'");
        fields.push_back(f);
    }
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        bool complete = true;
        for (int f : fields) {
            if (ds.records[r].flags[f] == FieldFlag::missing) {
                complete = false;
                break;
            }
        }
        if (complete) rows.push_back(r);
    }
    if (rows.size() < 2) {
        throw data_error("pearson_matrix: fewer than 2 complete rows");
    }
    Eigen::MatrixXd cols(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < fields.size(); ++j) {
            cols(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                ds.records[rows[i]].values[fields[j]];
        }
    }
    return pearson_matrix(cols, names);
}

CorrelationMatrix pearson_matrix(const Eigen::MatrixXd& columns,
                                 const std::vector<std::string>& names) {
    const Eigen::Index n = columns.rows();
    const Eigen::Index F = columns.cols();
    if (static_cast<std::size_t>(F) != names.size()) {
        throw data_error("pearson_matrix: name/column count mismatch");
    }
    if (n < 2) throw data_error("pearson_matrix: need at least 2 rows");

    Eigen::VectorXd mean = columns.colwise().mean();
    Eigen::MatrixXd centered = columns.rowwise() - mean.transpose();
    Eigen::VectorXd ss = centered.colwise().squaredNorm();

    CorrelationMatrix corr;
    corr.names = names;
    corr.values = Eigen::MatrixXd::Constant(F, F, std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index i = 0; i < F; ++i) {
        corr.values(i, i) = 1.0;
        if (ss[i] == 0.0) corr.zero_variance_features.push_back(static_cast<int>(i));
    }
    for (Eigen::Index i = 0; i < F; ++i) {
        for (Eigen::Index j = i + 1; j < F; ++j) {
            if (ss[i] == 0.0 || ss[j] == 0.0) {
                corr.undefined_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
                continue;
            }
            const double r = centered.col(i).dot(centered.col(j)) / std::sqrt(ss[i] * ss[j]);
            corr.values(i, j) = r;
            corr.values(j, i) = r;
        }
    }
    return corr;
}

// --- forest -----------------------------------------------------------------

namespace {

struct Builder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const ForestConfig& config;
    std::mt19937_64 rng;
    Tree tree;
    Eigen::VectorXd& feature_gain;
    int subset_size;

    // Candidates are scanned feature-by-feature, ascending value within a
    // feature; a later candidate wins only when it beats the incumbent by a
    // relative margin. Exact ties (two features inducing the same partition)
    // then resolve to the first candidate no matter how the sums were rounded.
    static double tie_margin(double parent_sse) { return parent_sse * 1e-12; }

    // Sorted scan over one feature: best SSE reduction and its threshold.
    // Returns false when no meaningfully positive gain exists.
    bool best_split_on(const std::vector<int>& idx, int feature, double parent_sse,
                       double& out_gain, double& out_threshold) const {
        const std::size_t m = idx.size();
        std::vector<std::pair<double, double>> vals(m); // (x, y)
        for (std::size_t i = 0; i < m; ++i) {
            vals[i] = {X(idx[i], feature), y(idx[i])};
        }
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double total_sum = 0.0;
        for (const auto& [xv, yv] : vals) total_sum += yv;

        double left_sum = 0.0, left_sq = 0.0;
        double total_sq = 0.0;
        for (const auto& [xv, yv] : vals) total_sq += yv * yv;

        bool found = false;
        double best_gain = 0.0, best_threshold = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            left_sum += vals[i].second;
            left_sq += vals[i].second * vals[i].second;
            if (vals[i].first == vals[i + 1].first) continue; // no boundary here
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(m - i - 1);
            const double right_sum = total_sum - left_sum;
            const double right_sq = total_sq - left_sq;
            const double sse_l = left_sq - left_sum * left_sum / nl;
            const double sse_r = right_sq - right_sum * right_sum / nr;
            const double gain = parent_sse - sse_l - sse_r;
            if (gain > best_gain + tie_margin(parent_sse)) {
                best_gain = gain;
                best_threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
                found = true;
            }
        }
        if (!found) return false;
        out_gain = best_gain;
        out_threshold = best_threshold;
        return true;
    }

    int build(std::vector<int> idx, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const std::size_t m = idx.size();

        double sum = 0.0, sq = 0.0;
        for (int i : idx) {
            sum += y(i);
            sq += y(i) * y(i);
        }
        const double mean = sum / static_cast<double>(m);
        const double sse = sq - sum * sum / static_cast<double>(m);

        tree.nodes[node_id].leaf_value = mean;
        tree.nodes[node_id].n_samples = static_cast<int>(m);

        if (depth >= config.max_depth || static_cast<int>(m) < config.min_samples_split ||
            sse <= 0.0) {
            return node_id;
        }

        // Candidate features: all of them, or a fresh random subset per split.
        const int F = static_cast<int>(X.cols());
        std::vector<int> candidates;
        if (config.feature_subsample && subset_size < F) {
            std::vector<int> pool(F);
            std::iota(pool.begin(), pool.end(), 0);
            for (int k = 0; k < subset_size; ++k) {
                const std::uint64_t pick =
                    bounded_rand(rng, static_cast<std::uint64_t>(F - k)) + static_cast<std::uint64_t>(k);
                std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
            }
            candidates.assign(pool.begin(), pool.begin() + subset_size);
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates.resize(static_cast<std::size_t>(F));
            std::iota(candidates.begin(), candidates.end(), 0);
        }

        int best_feature = -1;
        double best_gain = 0.0, best_threshold = 0.0;
        for (int f : candidates) {
            double gain, threshold;
            if (best_split_on(idx, f, sse, gain, threshold) &&
                gain > best_gain + tie_margin(sse)) {
                best_gain = gain;
                best_threshold = threshold;
                best_feature = f;
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            (X(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].gain = best_gain;
        feature_gain[best_feature] += best_gain;
        const int left = build(std::move(left_idx), depth + 1);
        const int right = build(std::move(right_idx), depth + 1);
        tree.nodes[node_id].left = left;
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

} // namespace

RegressionForest fit_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const ForestConfig& config, std::uint64_t seed) {
    const Eigen::Index n = X.rows();
    const int F = static_cast<int>(X.cols());
    if (n != y.size()) throw data_error("fit_forest: X/y row count mismatch");
    if (config.tree_count < 1) throw usage_error("fit_forest: tree_count must be >= 1");
    if (n < config.min_samples_split) {
        throw data_error("fit_forest: fewer rows than min_samples_split");
    }

    RegressionForest forest;
    forest.config = config;
    forest.feature_count = F;
    forest.per_feature_gain = Eigen::VectorXd::Zero(F);
    forest.trees.reserve(static_cast<std::size_t>(config.tree_count));

    const int subset_size = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(F)))));

    // OOB accumulation (only meaningful with bootstrap resampling).
    Eigen::VectorXd oob_sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXi oob_count = Eigen::VectorXi::Zero(n);

    for (int t = 0; t < config.tree_count; ++t) {
        std::mt19937_64 rng(derive_seed(seed, "tree:" + std::to_string(t)));
        std::vector<int> idx;
        std::vector<bool> in_bag(static_cast<std::size_t>(n), false);
        idx.reserve(static_cast<std::size_t>(n));
        if (config.bootstrap) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const int pick = static_cast<int>(bounded_rand(rng, static_cast<std::uint64_t>(n)));
                idx.push_back(pick);
                in_bag[static_cast<std::size_t>(pick)] = true;
            }
        } else {
            idx.resize(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), 0);
            std::fill(in_bag.begin(), in_bag.end(), true);
        }

        Builder builder{X, y, config, std::move(rng), Tree{}, forest.per_feature_gain, subset_size};
        builder.build(std::move(idx), 0);
        forest.trees.push_back(std::move(builder.tree));

        if (config.bootstrap) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!in_bag[static_cast<std::size_t>(i)]) {
                    oob_sum[i] += predict_tree(forest.trees.back(), X.row(i));
                    oob_count[i] += 1;
                }
            }
        }
    }
    forest.total_split_gain = forest.per_feature_gain.sum();

    if (config.bootstrap) {
        double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
        Eigen::Index covered = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (oob_count[i] > 0) {
                mean += y[i];
                ++covered;
            }
        }
        if (covered > 1) {
            mean /= static_cast<double>(covered);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (oob_count[i] > 0) {
                    const double pred = oob_sum[i] / oob_count[i];
                    ss_res += (y[i] - pred) * (y[i] - pred);
                    ss_tot += (y[i] - mean) * (y[i] - mean);
                }
            }
            if (ss_tot > 0.0) forest.oob_r2 = 1.0 - ss_res / ss_tot;
        }
    }
    return forest;
}

double predict_tree(const Tree& tree, const Eigen::RowVectorXd& row) {
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return tree.nodes[static_cast<std::size_t>(node)].leaf_value;
}

double predict(const RegressionForest& forest, const Eigen::RowVectorXd& row) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += predict_tree(tree, row);
    return sum / static_cast<double>(forest.trees.size());
}

ImportanceResult importance(const RegressionForest& forest) {
    ImportanceResult result;
    const int F = forest.feature_count;
    if (forest.total_split_gain <= 0.0) {
        result.weights = Eigen::VectorXd::Constant(F, 1.0 / static_cast<double>(F));
        result.degenerate = true;
        return result;
    }
    result.weights = forest.per_feature_gain / forest.total_split_gain;
    return result;
}

std::string importance_csv(const std::vector<std::string>& names, const Eigen::VectorXd& weights,
                           int precision) {
    std::string out = "feature,importance\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += csv_escape(names[i]) + ',' +
               fmt_fixed(weights[static_cast<Eigen::Index>(i)], precision) + '\n';
    }
    return out;
}

std::string importance_json(const std::vector<std::string>& names, const Eigen::VectorXd& weights,
                            int precision) {
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += '"' + names[i] + "\":" + fmt_fixed(weights[static_cast<Eigen::Index>(i)], precision);
    }
    out += '}';
    return out;
}

// --- selection ----------------------------------------------------------------

std::string_view drop_reason_name(DropReason r) {
    switch (r) {
    case DropReason::low_correlation: return "low-correlation";
    case DropReason::redundant: return "redundant";
    case DropReason::low_importance: return "low-importance";
    }
    return "";
}

std::string FeatureSelection::json() const {
    std::string out = "{\"kept\":[";
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i) out += ',';
        out += '"' + kept[i] + '"';
    }
    out += "],\"dropped\":{";
    for (std::size_t i = 0; i < dropped.size(); ++i) {
        if (i) out += ',';
        out += '"' + dropped[i].first + "\":\"" + std::string(drop_reason_name(dropped[i].second)) + '"';
    }
    out += "}}";
    return out;
}

FeatureSelection select_features(const CorrelationMatrix& corr,
                                 const std::vector<std::string>& importance_names,
                                 const Eigen::VectorXd& importances, const std::string& target,
                                 const SelectionPolicy& policy) {
    const int F = static_cast<int>(corr.names.size());
    const int target_idx = corr.index(target);
    if (target_idx < 0) throw data_error("select_features: target not among candidates");
    if (importance_names.size() != static_cast<std::size_t>(importances.size())) {
        throw data_error("select_features: importance name/value mismatch");
    }
    auto importance_of = [&](const std::string& name) -> double {
        for (std::size_t i = 0; i < importance_names.size(); ++i) {
            if (importance_names[i] == name) return importances[static_cast<Eigen::Index>(i)];
        }
        return std::numeric_limits<double>::quiet_NaN();
    };

    std::vector<bool> dropped(static_cast<std::size_t>(F), false);
    std::vector<DropReason> reasons(static_cast<std::size_t>(F), DropReason::low_correlation);

    // Rule 1: weak linear relation to the target.
    for (int i = 0; i < F; ++i) {
        if (i == target_idx) continue;
        const double r = corr.values(i, target_idx);
        if (!std::isnan(r) && std::abs(r) < policy.low_corr_threshold) {
            dropped[static_cast<std::size_t>(i)] = true;
            reasons[static_cast<std::size_t>(i)] = DropReason::low_correlation;
        }
    }

    // Rule 2: redundant blocks. Connected components over |r| > block_threshold
    // edges among surviving candidates; a block containing the target is kept
    // whole, every other block loses its lowest-importance member.
    std::vector<int> parent(static_cast<std::size_t>(F));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
        return a;
    };
    for (int i = 0; i < F; ++i) {
        if (dropped[static_cast<std::size_t>(i)]) continue;
        for (int j = i + 1; j < F; ++j) {
            if (dropped[static_cast<std::size_t>(j)]) continue;
            const double r = corr.values(i, j);
            if (!std::isnan(r) && std::abs(r) > policy.block_threshold) {
                parent[static_cast<std::size_t>(find(i))] = find(j);
            }
        }
    }
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < F; ++i) {
        if (!dropped[static_cast<std::size_t>(i)]) blocks[find(i)].push_back(i);
    }
    for (const auto& [root, block] : blocks) {
        if (block.size() < 2) continue;
        if (std::find(block.begin(), block.end(), target_idx) != block.end()) continue;
        int lowest = -1;
        double lowest_imp = std::numeric_limits<double>::infinity();
        for (int i : block) {
            const double imp = importance_of(corr.names[static_cast<std::size_t>(i)]);
            if (!std::isnan(imp) && imp < lowest_imp) {
                lowest_imp = imp;
                lowest = i;
            }
        }
        if (lowest >= 0) {
            dropped[static_cast<std::size_t>(lowest)] = true;
            reasons[static_cast<std::size_t>(lowest)] = DropReason::redundant;
        }
    }

    // Rule 3: optional absolute importance floor.
    if (policy.low_importance_threshold > 0.0) {
        for (int i = 0; i < F; ++i) {
            if (i == target_idx || dropped[static_cast<std::size_t>(i)]) continue;
            const double imp = importance_of(corr.names[static_cast<std::size_t>(i)]);
            if (!std::isnan(imp) && imp < policy.low_importance_threshold) {
                dropped[static_cast<std::size_t>(i)] = true;
                reasons[static_cast<std::size_t>(i)] = DropReason::low_importance;
            }
        }
    }

    FeatureSelection sel;
    for (int i = 0; i < F; ++i) {
        if (dropped[static_cast<std::size_t>(i)]) {
            sel.dropped.emplace_back(corr.names[static_cast<std::size_t>(i)],
                                     reasons[static_cast<std::size_t>(i)]);
        } else {
            sel.kept.push_back(corr.names[static_cast<std::size_t>(i)]);
        }
    }
    return sel;
}

} // namespace windfc::features

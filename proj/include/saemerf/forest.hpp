#ifndef SAEMERF_FOREST_HPP
#define SAEMERF_FOREST_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "saemerf/errors.hpp"
#include "saemerf/parallel.hpp"
#include "saemerf/random.hpp"

namespace saemerf {

struct ForestConfig {
  int num_trees = 500;
  // Number of covariates tried per split; unset means max(1, p/3).
  std::optional<int> split_candidates;
  int min_node_size = 5;
  std::optional<int> max_depth;
  std::uint64_t seed = 0;

  void validate(int p) const {
    if (num_trees < 1) throw DataError("num_trees must be >= 1");
    if (min_node_size < 1) throw DataError("min_node_size must be >= 1");
    if (split_candidates) {
      if (*split_candidates < 1) throw DataError("split_candidates must be >= 1");
      if (*split_candidates > p) throw DataError("split_candidates exceeds the covariate count");
    }
    if (max_depth && *max_depth < 1) throw DataError("max_depth must be >= 1");
  }

  int resolved_mtry(int p) const {
    return split_candidates ? *split_candidates : std::max(1, p / 3);
  }
};

// Binary regression tree in a flat node array; split_var < 0 marks a leaf.
struct TreeNode {
  int split_var = -1;
  double threshold = 0.0;
  double gain = 0.0;  // impurity decrease at this split (0 for leaves)
  double value = 0.0; // leaf mean (0 for internal nodes)
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<int> inbag_count;  // per training row, bootstrap multiplicity

  template <typename Row>
  double predict_row(const Row& row) const {
    int node = 0;
    while (nodes[node].split_var >= 0) {
      const TreeNode& nd = nodes[node];
      node = row[nd.split_var] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[node].value;
  }
};

// Bagged CART ensemble. Immutable after fitting and safe to share across
// threads.
class Forest {
 public:
  const std::vector<Tree>& trees() const { return trees_; }
  const Eigen::VectorXd& importance() const { return importance_; }
  // OOB prediction per training row; rows that were in-bag for every tree
  // fall back to the full-forest prediction and are counted here.
  const Eigen::VectorXd& oob_predictions() const { return oob_predictions_; }
  int oob_fallback_rows() const { return oob_fallback_rows_; }
  int num_trees() const { return static_cast<int>(trees_.size()); }
  int num_training_rows() const { return n_; }
  int num_covariates() const { return p_; }
  double response_min() const { return response_min_; }
  double response_max() const { return response_max_; }

  Eigen::VectorXd predict(const Eigen::MatrixXd& points, int threads = 0) const {
    if (points.cols() != p_)
      throw DataError("prediction points have a different covariate count than the training data");
    Eigen::VectorXd out(points.rows());
    const double inv_t = 1.0 / static_cast<double>(trees_.size());
    parallel_for(static_cast<std::size_t>(points.rows()), [&](std::size_t i) {
      const Eigen::RowVectorXd row = points.row(static_cast<Eigen::Index>(i));
      double sum = 0.0;
      for (const Tree& tree : trees_) sum += tree.predict_row(row);
      out[static_cast<Eigen::Index>(i)] = sum * inv_t;
    }, threads);
    return out;
  }

  double predict_one(const Eigen::RowVectorXd& row) const {
    if (row.size() != p_)
      throw DataError("prediction point has a different covariate count than the training data");
    double sum = 0.0;
    for (const Tree& tree : trees_) sum += tree.predict_row(row);
    return sum / static_cast<double>(trees_.size());
  }

  friend Forest fit_forest(const Eigen::MatrixXd&, const Eigen::VectorXd&, const ForestConfig&,
                           int);

 private:
  std::vector<Tree> trees_;
  Eigen::VectorXd importance_;
  Eigen::VectorXd oob_predictions_;
  int oob_fallback_rows_ = 0;
  int n_ = 0;
  int p_ = 0;
  double response_min_ = 0.0;
  double response_max_ = 0.0;
};

namespace detail {

// Recursive grower over one bootstrap bag. Node membership is a contiguous
// segment of `samples`; splits partition the segment in place.
class TreeGrower {
 public:
  TreeGrower(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ForestConfig& config,
             std::uint64_t seed)
      : x_(x), y_(y), config_(config), mtry_(config.resolved_mtry(static_cast<int>(x.cols()))),
        rng_(seed) {
    const int p = static_cast<int>(x.cols());
    var_perm_.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) var_perm_[static_cast<std::size_t>(j)] = j;
  }

  Tree grow(Eigen::VectorXd* importance) {
    const int n = static_cast<int>(x_.rows());
    Tree tree;
    tree.inbag_count.assign(static_cast<std::size_t>(n), 0);
    samples_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int r = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(n)));
      samples_[static_cast<std::size_t>(i)] = r;
      ++tree.inbag_count[static_cast<std::size_t>(r)];
    }
    tree.nodes.reserve(static_cast<std::size_t>(2 * n / config_.min_node_size + 4));
    importance_ = importance;
    build_node(tree, 0, n, 0);
    return tree;
  }

 private:
  struct SplitChoice {
    double gain = 0.0;
    int var = -1;
    double threshold = 0.0;
    int left_count = 0;
  };

  int build_node(Tree& tree, int begin, int end, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const int m = end - begin;
    double sum = 0.0, sumsq = 0.0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (int i = begin; i < end; ++i) {
      const double v = y_[samples_[static_cast<std::size_t>(i)]];
      sum += v;
      sumsq += v * v;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
    const double mean = sum / m;
    const double node_sse = sumsq - sum * sum / m;

    const bool depth_capped = config_.max_depth && depth >= *config_.max_depth;
    if (m <= config_.min_node_size || m < 2 || ymin == ymax || depth_capped) {
      tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    const SplitChoice split = find_split(begin, end, node_sse);
    if (split.var < 0) {
      tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    auto mid = std::partition(samples_.begin() + begin, samples_.begin() + end, [&](int row) {
      return x_(row, split.var) <= split.threshold;
    });
    const int cut = static_cast<int>(mid - samples_.begin());

    tree.nodes[static_cast<std::size_t>(node_id)].split_var = split.var;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    tree.nodes[static_cast<std::size_t>(node_id)].gain = split.gain;
    (*importance_)[split.var] += split.gain;

    const int left = build_node(tree, begin, cut, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left;
    const int right = build_node(tree, cut, end, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }

  // Best split among mtry sampled candidate variables. Gain is the SSE
  // reduction parent - (left + right); ties break on the lowest variable
  // index, then the smallest threshold, independent of sampling order.
  SplitChoice find_split(int begin, int end, double node_sse) {
    const int p = static_cast<int>(x_.cols());
    const int m = end - begin;
    for (int k = 0; k < mtry_; ++k) {
      const int j = k + static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(p - k)));
      std::swap(var_perm_[static_cast<std::size_t>(k)], var_perm_[static_cast<std::size_t>(j)]);
    }

    SplitChoice best;
    scratch_.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < mtry_; ++k) {
      const int var = var_perm_[static_cast<std::size_t>(k)];
      for (int i = 0; i < m; ++i) {
        const int row = samples_[static_cast<std::size_t>(begin + i)];
        scratch_[static_cast<std::size_t>(i)] = {x_(row, var), y_[row]};
      }
      // Full (value, response) ordering keeps prefix sums reproducible.
      std::sort(scratch_.begin(), scratch_.end());

      double total = 0.0, totalsq = 0.0;
      for (const auto& pr : scratch_) {
        total += pr.second;
        totalsq += pr.second * pr.second;
      }
      double lsum = 0.0, lsumsq = 0.0;
      for (int i = 1; i < m; ++i) {
        const auto& prev = scratch_[static_cast<std::size_t>(i - 1)];
        lsum += prev.second;
        lsumsq += prev.second * prev.second;
        const double a = prev.first;
        const double b = scratch_[static_cast<std::size_t>(i)].first;
        if (a >= b) continue;
        const double rsum = total - lsum;
        const double rsumsq = totalsq - lsumsq;
        const double sse_left = lsumsq - lsum * lsum / i;
        const double sse_right = rsumsq - rsum * rsum / (m - i);
        const double gain = node_sse - sse_left - sse_right;
        const double threshold = a + (b - a) / 2.0;
        if (gain > best.gain ||
            (gain == best.gain && best.var >= 0 &&
             (var < best.var || (var == best.var && threshold < best.threshold)))) {
          best.gain = gain;
          best.var = var;
          best.threshold = threshold;
          best.left_count = i;
        }
      }
    }
    if (best.gain <= 0.0) best.var = -1;
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  const ForestConfig& config_;
  int mtry_;
  Rng rng_;
  std::vector<int> samples_;
  std::vector<int> var_perm_;
  std::vector<std::pair<double, double>> scratch_;
  Eigen::VectorXd* importance_ = nullptr;
};

}  // namespace detail

// Grows config.num_trees trees on with-replacement bags of size n. Each
// tree owns an RNG stream derived from (seed, tree index), so parallel and
// serial runs produce bit-identical forests.
inline Forest fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const ForestConfig& config, int threads = 0) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n == 0 || p == 0) throw DataError("forest training data is empty");
  if (n < 2) throw DataError("forest needs at least 2 training rows");
  if (y.size() != n) throw DataError("response length does not match the covariate rows");
  if (!x.allFinite() || !y.allFinite())
    throw DataError("forest training data contains non-finite values");
  config.validate(p);

  Forest forest;
  forest.n_ = n;
  forest.p_ = p;
  forest.response_min_ = y.minCoeff();
  forest.response_max_ = y.maxCoeff();
  forest.trees_.resize(static_cast<std::size_t>(config.num_trees));

  std::vector<Eigen::VectorXd> tree_importance(static_cast<std::size_t>(config.num_trees));
  std::vector<Eigen::VectorXd> tree_predictions(static_cast<std::size_t>(config.num_trees));

  parallel_for(static_cast<std::size_t>(config.num_trees), [&](std::size_t t) {
    detail::TreeGrower grower(x, y, config, derive_seed(config.seed, {kTreeStream, t}));
    tree_importance[t] = Eigen::VectorXd::Zero(p);
    Tree tree = grower.grow(&tree_importance[t]);
    Eigen::VectorXd& pred = tree_predictions[t];
    pred.resize(n);
    for (int i = 0; i < n; ++i) pred[i] = tree.predict_row(x.row(i));
    forest.trees_[t] = std::move(tree);
  }, threads);

  // Serial reductions in tree order keep results independent of scheduling.
  forest.importance_ = Eigen::VectorXd::Zero(p);
  for (const Eigen::VectorXd& imp : tree_importance) forest.importance_ += imp;

  forest.oob_predictions_.resize(n);
  Eigen::VectorXd oob_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi oob_count = Eigen::VectorXi::Zero(n);
  Eigen::VectorXd full_sum = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < forest.trees_.size(); ++t) {
    const Tree& tree = forest.trees_[t];
    const Eigen::VectorXd& pred = tree_predictions[t];
    full_sum += pred;
    for (int i = 0; i < n; ++i) {
      if (tree.inbag_count[static_cast<std::size_t>(i)] == 0) {
        oob_sum[i] += pred[i];
        ++oob_count[i];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (oob_count[i] > 0) {
      forest.oob_predictions_[i] = oob_sum[i] / oob_count[i];
    } else {
      forest.oob_predictions_[i] = full_sum[i] / static_cast<double>(config.num_trees);
      ++forest.oob_fallback_rows_;
    }
  }
  return forest;
}

}  // namespace saemerf

#endif  // SAEMERF_FOREST_HPP

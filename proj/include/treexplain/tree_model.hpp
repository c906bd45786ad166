#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "treexplain/error.hpp"

namespace treexplain {

inline constexpr int kLeaf = -1;
inline constexpr int kDefaultMaxDepth = 64;
inline constexpr double kCoverTolerance = 1e-9;

// Array-encoded binary decision tree. Node 0 is the root. A node is a leaf iff
// features[j] == kLeaf; leaves carry kLeaf children. Samples go left when
// x[features[j]] <= thresholds[j].
struct Tree {
  std::vector<double> values;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> thresholds;
  std::vector<int> features;
  std::vector<double> covers;

  std::size_t size() const { return features.size(); }
  bool is_leaf(int node) const { return features[static_cast<std::size_t>(node)] == kLeaf; }

  // Leaf reached by x. Assumes a validated tree.
  int leaf_for(std::span<const double> x) const;
  double predict(std::span<const double> x) const;

  int depth() const;
  int num_leaves() const;
  int num_internal() const { return static_cast<int>(size()) - num_leaves(); }
};

// Throws Error tagged with tree_index and node index on the first violated
// invariant.
void validate_tree(const Tree& tree, int num_features, int tree_index,
                   int max_depth = kDefaultMaxDepth);

struct EnsembleStats {
  int tree_count = 0;
  int max_leaves = 0;
  int max_depth = 0;
};

// Immutable validated ensemble. Construction validates every tree and caches
// per-node cover-weighted means (used by expected values, Saabas and gain).
class TreeEnsemble {
 public:
  TreeEnsemble(std::vector<Tree> trees, double base_score, int num_features,
               std::vector<std::string> feature_names = {},
               int max_depth = kDefaultMaxDepth);

  const std::vector<Tree>& trees() const { return trees_; }
  const Tree& tree(std::size_t t) const { return trees_[t]; }
  double base_score() const { return base_score_; }
  int num_features() const { return num_features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const EnsembleStats& stats() const { return stats_; }

  // Cover-weighted mean of the leaves below each node of tree t.
  const std::vector<double>& node_means(std::size_t t) const { return node_means_[t]; }

  // Display name for feature f: the stored name or "f<index>".
  std::string feature_label(int f) const;

  // Sorted indices of features that appear in at least one split.
  std::vector<int> used_features() const;

 private:
  std::vector<Tree> trees_;
  double base_score_;
  int num_features_;
  std::vector<std::string> feature_names_;
  EnsembleStats stats_;
  std::vector<std::vector<double>> node_means_;
};

void check_dimension(const TreeEnsemble& ensemble, std::span<const double> x);

double predict(const TreeEnsemble& ensemble, std::span<const double> x);
double expected_value(const TreeEnsemble& ensemble);

// Row-major numeric table; one row per sample.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
          std::vector<std::string> column_names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  void append_row(std::span<const double> row);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::string> column_names_;
};

std::vector<double> predict_batch(const TreeEnsemble& ensemble, const Dataset& data);

}  // namespace treexplain

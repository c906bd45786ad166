#include "treexplain/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace treexplain {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformed: return "Malformed";
    case ErrorKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::kCoverMismatch: return "CoverMismatch";
    case ErrorKind::kLeafInconsistency: return "LeafInconsistency";
    case ErrorKind::kDepthExceeded: return "DepthExceeded";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kTooManyFeatures: return "TooManyFeatures";
    case ErrorKind::kDegenerateElement: return "DegenerateElement";
    case ErrorKind::kInsufficientRows: return "InsufficientRows";
    case ErrorKind::kEmptyData: return "EmptyData";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

int Tree::leaf_for(std::span<const double> x) const {
  int node = 0;
  while (!is_leaf(node)) {
    const auto j = static_cast<std::size_t>(node);
    node = x[static_cast<std::size_t>(features[j])] <= thresholds[j] ? left[j] : right[j];
  }
  return node;
}

double Tree::predict(std::span<const double> x) const {
  return values[static_cast<std::size_t>(leaf_for(x))];
}

int Tree::depth() const {
  if (size() == 0) return 0;
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    max_depth = std::max(max_depth, d);
    if (!is_leaf(node)) {
      stack.emplace_back(left[static_cast<std::size_t>(node)], d + 1);
      stack.emplace_back(right[static_cast<std::size_t>(node)], d + 1);
    }
  }
  return max_depth;
}

int Tree::num_leaves() const {
  return static_cast<int>(std::count(features.begin(), features.end(), kLeaf));
}

namespace {

[[noreturn]] void Fail(ErrorKind kind, int tree_index, int node, const std::string& what) {
  std::ostringstream os;
  os << ErrorKindName(kind) << ": tree " << tree_index;
  if (node >= 0) os << " node " << node;
  os << ": " << what;
  throw Error(kind, os.str());
}

}  // namespace

void validate_tree(const Tree& tree, int num_features, int tree_index, int max_depth) {
  const std::size_t n = tree.features.size();
  if (n == 0) Fail(ErrorKind::kMalformed, tree_index, -1, "tree has no nodes");
  if (tree.values.size() != n || tree.left.size() != n || tree.right.size() != n ||
      tree.thresholds.size() != n || tree.covers.size() != n) {
    Fail(ErrorKind::kMalformed, tree_index, -1, "node arrays have different lengths");
  }
  const int count = static_cast<int>(n);
  std::vector<int> parents(n, 0);
  for (int j = 0; j < count; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double cover = tree.covers[u];
    if (!std::isfinite(cover) || cover < 0.0) {
      Fail(ErrorKind::kCoverMismatch, tree_index, j, "cover must be finite and nonnegative");
    }
    if (tree.features[u] == kLeaf) {
      if (tree.left[u] != kLeaf || tree.right[u] != kLeaf) {
        Fail(ErrorKind::kLeafInconsistency, tree_index, j, "leaf has children");
      }
      if (!std::isfinite(tree.values[u])) {
        Fail(ErrorKind::kMalformed, tree_index, j, "leaf value is not finite");
      }
      continue;
    }
    const int f = tree.features[u];
    if (f < 0 || f >= num_features) {
      Fail(ErrorKind::kIndexOutOfRange, tree_index, j,
           "feature index " + std::to_string(f) + " outside [0, " +
               std::to_string(num_features) + ")");
    }
    if (tree.left[u] == kLeaf || tree.right[u] == kLeaf) {
      Fail(ErrorKind::kLeafInconsistency, tree_index, j, "internal node is missing a child");
    }
    for (int child : {tree.left[u], tree.right[u]}) {
      if (child <= 0 || child >= count) {
        Fail(ErrorKind::kIndexOutOfRange, tree_index, j,
             "child index " + std::to_string(child) + " out of range");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
    if (tree.left[u] == tree.right[u]) {
      Fail(ErrorKind::kMalformed, tree_index, j, "both children are the same node");
    }
    if (!std::isfinite(tree.thresholds[u])) {
      Fail(ErrorKind::kMalformed, tree_index, j, "threshold is not finite");
    }
    if (!(cover > 0.0)) {
      Fail(ErrorKind::kCoverMismatch, tree_index, j, "internal node cover must be positive");
    }
    const double children =
        tree.covers[static_cast<std::size_t>(tree.left[u])] +
        tree.covers[static_cast<std::size_t>(tree.right[u])];
    if (std::abs(children - cover) > kCoverTolerance * std::max(cover, children)) {
      std::ostringstream os;
      os << "children covers sum to " << children << " but node cover is " << cover;
      Fail(ErrorKind::kCoverMismatch, tree_index, j, os.str());
    }
  }
  for (int j = 1; j < count; ++j) {
    if (parents[static_cast<std::size_t>(j)] != 1) {
      Fail(ErrorKind::kMalformed, tree_index, j,
           "node has " + std::to_string(parents[static_cast<std::size_t>(j)]) +
               " parents, expected 1");
    }
  }
  // With unique parents and a parentless root, any unreachable node sits on a cycle.
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int reached = 0;
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    const auto u = static_cast<std::size_t>(node);
    if (seen[u]) Fail(ErrorKind::kMalformed, tree_index, node, "cycle detected");
    seen[u] = 1;
    ++reached;
    if (d > max_depth) {
      Fail(ErrorKind::kDepthExceeded, tree_index, node,
           "depth exceeds maximum " + std::to_string(max_depth));
    }
    if (!tree.is_leaf(node)) {
      stack.emplace_back(tree.left[u], d + 1);
      stack.emplace_back(tree.right[u], d + 1);
    }
  }
  if (reached != count) {
    Fail(ErrorKind::kMalformed, tree_index, -1, "nodes unreachable from the root");
  }
}

namespace {

double FillMeans(const Tree& tree, int node, std::vector<double>& means) {
  const auto u = static_cast<std::size_t>(node);
  if (tree.is_leaf(node)) {
    means[u] = tree.values[u];
    return means[u];
  }
  const auto l = static_cast<std::size_t>(tree.left[u]);
  const auto r = static_cast<std::size_t>(tree.right[u]);
  const double lm = FillMeans(tree, tree.left[u], means);
  const double rm = FillMeans(tree, tree.right[u], means);
  const double total = tree.covers[l] + tree.covers[r];
  means[u] = (lm * tree.covers[l] + rm * tree.covers[r]) / total;
  return means[u];
}

}  // namespace

TreeEnsemble::TreeEnsemble(std::vector<Tree> trees, double base_score, int num_features,
                           std::vector<std::string> feature_names, int max_depth)
    : trees_(std::move(trees)),
      base_score_(base_score),
      num_features_(num_features),
      feature_names_(std::move(feature_names)) {
  if (num_features_ < 0) {
    throw Error(ErrorKind::kMalformed, "num_features must be nonnegative");
  }
  if (!std::isfinite(base_score_)) {
    throw Error(ErrorKind::kMalformed, "base_score is not finite");
  }
  if (!feature_names_.empty() &&
      feature_names_.size() != static_cast<std::size_t>(num_features_)) {
    throw Error(ErrorKind::kMalformed, "feature_names length " +
                                           std::to_string(feature_names_.size()) +
                                           " differs from num_features " +
                                           std::to_string(num_features_));
  }
  node_means_.reserve(trees_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    validate_tree(trees_[t], num_features_, static_cast<int>(t), max_depth);
    std::vector<double> means(trees_[t].size(), 0.0);
    FillMeans(trees_[t], 0, means);
    node_means_.push_back(std::move(means));
    stats_.max_leaves = std::max(stats_.max_leaves, trees_[t].num_leaves());
    stats_.max_depth = std::max(stats_.max_depth, trees_[t].depth());
  }
  stats_.tree_count = static_cast<int>(trees_.size());
}

std::string TreeEnsemble::feature_label(int f) const {
  if (!feature_names_.empty()) return feature_names_[static_cast<std::size_t>(f)];
  return "f" + std::to_string(f);
}

std::vector<int> TreeEnsemble::used_features() const {
  std::vector<char> used(static_cast<std::size_t>(num_features_), 0);
  for (const auto& tree : trees_) {
    for (int f : tree.features) {
      if (f != kLeaf) used[static_cast<std::size_t>(f)] = 1;
    }
  }
  std::vector<int> out;
  for (int f = 0; f < num_features_; ++f) {
    if (used[static_cast<std::size_t>(f)]) out.push_back(f);
  }
  return out;
}

void check_dimension(const TreeEnsemble& ensemble, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(ensemble.num_features())) {
    throw Error(ErrorKind::kDimensionMismatch,
                "input has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(ensemble.num_features()));
  }
}

double predict(const TreeEnsemble& ensemble, std::span<const double> x) {
  check_dimension(ensemble, x);
  double out = ensemble.base_score();
  for (const auto& tree : ensemble.trees()) out += tree.predict(x);
  return out;
}

double expected_value(const TreeEnsemble& ensemble) {
  double out = ensemble.base_score();
  for (std::size_t t = 0; t < ensemble.trees().size(); ++t) out += ensemble.node_means(t)[0];
  return out;
}

Dataset::Dataset(std::size_t rows, std::size_t cols, std::vector<double> values,
                 std::vector<std::string> column_names)
    : rows_(rows), cols_(cols), values_(std::move(values)), column_names_(std::move(column_names)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kMalformed, "dataset is not rectangular");
  }
  if (!column_names_.empty() && column_names_.size() != cols_) {
    throw Error(ErrorKind::kMalformed, "column name count differs from column count");
  }
}

void Dataset::append_row(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0 && column_names_.empty()) cols_ = row.size();
  if (row.size() != cols_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "row " + std::to_string(rows_) + " has " + std::to_string(row.size()) +
                    " values, expected " + std::to_string(cols_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

std::vector<double> predict_batch(const TreeEnsemble& ensemble, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) out.push_back(predict(ensemble, data.row(r)));
  return out;
}

}  // namespace treexplain

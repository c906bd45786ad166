#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "treexplain/baselines.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

enum class Linkage { kWard, kComplete, kAverage };

Linkage parse_linkage(std::string_view name);
std::string_view linkage_name(Linkage linkage);

// One agglomeration step. Cluster ids follow the usual dendrogram
// convention: 0..n-1 are the input rows, merge k creates cluster n + k.
// first < second always.
struct Merge {
  std::size_t first = 0;
  std::size_t second = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct MergeTree {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;  // exactly leaf_count - 1 entries
};

// Dense row-major n x m matrix of attribution vectors.
struct AttributionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

AttributionMatrix to_matrix(std::span<const Attribution> attributions);

// Agglomerative clustering under Euclidean distance with Lance-Williams
// updates. Ward heights are on the Euclidean scale. Among equal distances the
// pair whose smallest member rows are lowest merges first.
MergeTree cluster_attributions(const AttributionMatrix& attributions,
                               Linkage linkage = Linkage::kWard);

// Group label (0-based, in order of first appearance by row) for every row
// after cutting the tree into `groups` clusters.
std::vector<std::size_t> cut_tree(const MergeTree& tree, std::size_t groups);

struct R2Point {
  std::size_t groups = 0;
  double r2 = 0.0;
};

struct R2Curve {
  std::vector<R2Point> points;  // groups = n, n-1, ..., 1
  // Outputs had zero variance; R2 is then defined as 1 for g > 1 and 0 at g = 1.
  bool zero_variance = false;
};

// R2 of predicting each row by its group's mean output, for every cut of the
// merge tree.
R2Curve r2_curve(const MergeTree& tree, std::span<const double> outputs);

// In-order leaf traversal of the dendrogram (first child before second).
std::vector<std::size_t> leaf_order(const MergeTree& tree);

double curve_area(const R2Curve& curve);

struct SupervisedClusteringResult {
  AttributionMethod method;
  MergeTree tree;
  R2Curve curve;
  double area = 0.0;
};

// Explains every row with each method, clusters the attributions and scores
// the resulting merge trees against the model output.
std::vector<SupervisedClusteringResult> compare_supervised_clusterings(
    const TreeEnsemble& ensemble, const Dataset& data, std::span<const AttributionMethod> methods,
    Linkage linkage = Linkage::kWard, unsigned threads = 1);

}  // namespace treexplain

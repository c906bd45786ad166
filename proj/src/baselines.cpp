#include "treexplain/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "treexplain/oracle.hpp"
#include "treexplain/random.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain {

Attribution saabas(const TreeEnsemble& ensemble, std::span<const double> x) {
  check_dimension(ensemble, x);
  Attribution out;
  out.phi.assign(static_cast<std::size_t>(ensemble.num_features()), 0.0);
  out.phi0 = expected_value(ensemble);
  out.output = predict(ensemble, x);
  for (std::size_t t = 0; t < ensemble.trees().size(); ++t) {
    const Tree& tree = ensemble.tree(t);
    const auto& means = ensemble.node_means(t);
    int node = 0;
    while (!tree.is_leaf(node)) {
      const auto j = static_cast<std::size_t>(node);
      const int f = tree.features[j];
      const int next = x[static_cast<std::size_t>(f)] <= tree.thresholds[j] ? tree.left[j] : tree.right[j];
      out.phi[static_cast<std::size_t>(f)] += means[static_cast<std::size_t>(next)] - means[j];
      node = next;
    }
  }
  return out;
}

namespace {

// Total leaf cover below each node.
double LeafCover(const Tree& tree, int node, std::vector<double>& cover) {
  const auto j = static_cast<std::size_t>(node);
  if (tree.is_leaf(node)) return cover[j] = tree.covers[j];
  return cover[j] = LeafCover(tree, tree.left[j], cover) + LeafCover(tree, tree.right[j], cover);
}

}  // namespace

std::vector<double> gain_importance(const TreeEnsemble& ensemble) {
  std::vector<double> gain(static_cast<std::size_t>(ensemble.num_features()), 0.0);
  for (std::size_t t = 0; t < ensemble.trees().size(); ++t) {
    const Tree& tree = ensemble.tree(t);
    const auto& means = ensemble.node_means(t);
    std::vector<double> cover(tree.size(), 0.0);
    LeafCover(tree, 0, cover);
    for (std::size_t j = 0; j < tree.size(); ++j) {
      if (tree.features[j] == kLeaf) continue;
      const auto l = static_cast<std::size_t>(tree.left[j]);
      const auto r = static_cast<std::size_t>(tree.right[j]);
      // I(j) - I(l) - I(r) reduces to the between-children term.
      const double total = cover[l] + cover[r];
      if (total <= 0.0) continue;
      const double diff = means[l] - means[r];
      gain[static_cast<std::size_t>(tree.features[j])] += cover[l] * cover[r] / total * diff * diff;
    }
  }
  return gain;
}

std::vector<double> split_count_importance(const TreeEnsemble& ensemble) {
  std::vector<double> counts(static_cast<std::size_t>(ensemble.num_features()), 0.0);
  for (const auto& tree : ensemble.trees()) {
    for (int f : tree.features) {
      if (f != kLeaf) counts[static_cast<std::size_t>(f)] += 1.0;
    }
  }
  return counts;
}

namespace {

double MeanSquaredError(const TreeEnsemble& ensemble, const Dataset& data,
                        std::span<const double> labels) {
  double acc = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double e = predict(ensemble, data.row(r)) - labels[r];
    acc += e * e;
  }
  return acc / static_cast<double>(data.rows());
}

}  // namespace

std::vector<double> permutation_importance(const TreeEnsemble& ensemble, const Dataset& data,
                                           std::span<const double> labels,
                                           const PermutationOptions& options) {
  if (data.rows() < 2) {
    throw Error(ErrorKind::kInsufficientRows, "InsufficientRows: permutation importance needs >= 2 rows");
  }
  if (labels.size() != data.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "labels length " + std::to_string(labels.size()) +
                                                   " differs from row count " +
                                                   std::to_string(data.rows()));
  }
  if (options.repeats < 1) throw Error(ErrorKind::kInvalidArgument, "repeats must be >= 1");
  if (data.cols() != static_cast<std::size_t>(ensemble.num_features())) {
    throw Error(ErrorKind::kDimensionMismatch, "dataset width differs from model num_features");
  }
  const double baseline = MeanSquaredError(ensemble, data, labels);
  const int m = ensemble.num_features();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  Dataset shuffled = data;
  std::vector<double> column(data.rows());
  for (int f = 0; f < m; ++f) {
    const auto c = static_cast<std::size_t>(f);
    Rng rng(options.seed, c);
    double acc = 0.0;
    for (int rep = 0; rep < options.repeats; ++rep) {
      for (std::size_t r = 0; r < data.rows(); ++r) column[r] = data.at(r, c);
      rng.shuffle(column.begin(), column.end());
      for (std::size_t r = 0; r < data.rows(); ++r) shuffled.at(r, c) = column[r];
      acc += MeanSquaredError(ensemble, shuffled, labels) - baseline;
    }
    for (std::size_t r = 0; r < data.rows(); ++r) shuffled.at(r, c) = data.at(r, c);
    out[c] = acc / static_cast<double>(options.repeats);
  }
  return out;
}

MeanAbsShap mean_abs_shap(std::span<const Attribution> attributions, int num_features) {
  MeanAbsShap out;
  out.sum.assign(static_cast<std::size_t>(num_features), 0.0);
  for (const auto& a : attributions) {
    for (std::size_t f = 0; f < out.sum.size(); ++f) out.sum[f] += std::abs(a.phi[f]);
  }
  out.mean = out.sum;
  if (!attributions.empty()) {
    for (auto& v : out.mean) v /= static_cast<double>(attributions.size());
  }
  return out;
}

MeanAbsShap mean_abs_shap(const TreeEnsemble& ensemble, const Dataset& data) {
  std::vector<Attribution> rows;
  rows.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) rows.push_back(ensemble_shap(ensemble, data.row(r)));
  return mean_abs_shap(rows, ensemble.num_features());
}

std::vector<int> rank_features(std::span<const double> importance) {
  std::vector<int> order(importance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return importance[static_cast<std::size_t>(a)] > importance[static_cast<std::size_t>(b)];
  });
  return order;
}

AttributionMethod parse_attribution_method(std::string_view name) {
  if (name == "treeshap") return AttributionMethod::kTreeShap;
  if (name == "saabas") return AttributionMethod::kSaabas;
  if (name == "brute") return AttributionMethod::kBrute;
  if (name == "gain") return AttributionMethod::kGain;
  if (name == "split") return AttributionMethod::kSplitCount;
  if (name == "permutation") return AttributionMethod::kPermutation;
  if (name == "mean-abs-shap") return AttributionMethod::kMeanAbsShap;
  throw Error(ErrorKind::kInvalidArgument, "unknown attribution method '" + std::string(name) + "'");
}

std::string_view attribution_method_name(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kTreeShap: return "treeshap";
    case AttributionMethod::kSaabas: return "saabas";
    case AttributionMethod::kBrute: return "brute";
    case AttributionMethod::kGain: return "gain";
    case AttributionMethod::kSplitCount: return "split";
    case AttributionMethod::kPermutation: return "permutation";
    case AttributionMethod::kMeanAbsShap: return "mean-abs-shap";
  }
  return "unknown";
}

bool is_individualized(AttributionMethod method) {
  return method == AttributionMethod::kTreeShap || method == AttributionMethod::kSaabas ||
         method == AttributionMethod::kBrute;
}

namespace {

std::vector<double> RowAttribution(const TreeEnsemble& ensemble, std::span<const double> x,
                                   AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kTreeShap: return ensemble_shap(ensemble, x).phi;
    case AttributionMethod::kSaabas: return saabas(ensemble, x).phi;
    case AttributionMethod::kBrute: return brute_shap(ensemble, x).phi;
    default: break;
  }
  throw Error(ErrorKind::kInvalidArgument, "not an individualized method");
}

std::vector<double> GlobalImportance(const TreeEnsemble& ensemble, const Dataset& data,
                                     AttributionMethod method, const PerturbationOptions& options) {
  switch (method) {
    case AttributionMethod::kGain: return gain_importance(ensemble);
    case AttributionMethod::kSplitCount: return split_count_importance(ensemble);
    case AttributionMethod::kMeanAbsShap: return mean_abs_shap(ensemble, data).mean;
    case AttributionMethod::kPermutation: {
      std::vector<double> labels = options.labels;
      if (labels.empty()) labels = predict_batch(ensemble, data);
      return permutation_importance(ensemble, data, labels, {10, options.seed});
    }
    default: break;
  }
  throw Error(ErrorKind::kInvalidArgument, "not a global method");
}

}  // namespace

std::vector<double> perturbation_experiment(const TreeEnsemble& ensemble, const Dataset& data,
                                            AttributionMethod method,
                                            const PerturbationOptions& options) {
  if (data.empty()) throw Error(ErrorKind::kEmptyData, "EmptyData: perturbation needs at least one row");
  if (data.cols() != static_cast<std::size_t>(ensemble.num_features())) {
    throw Error(ErrorKind::kDimensionMismatch, "dataset width differs from model num_features");
  }
  int global_feature = -1;
  if (!is_individualized(method)) {
    const auto importance = GlobalImportance(ensemble, data, method, options);
    global_feature = rank_features(importance).front();
  }
  std::vector<double> curve;
  curve.reserve(data.rows());
  double total = 0.0;
  std::vector<double> x(data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.row(r);
    int feature = global_feature;
    if (feature < 0) {
      const auto phi = RowAttribution(ensemble, row, method);
      feature = static_cast<int>(std::min_element(phi.begin(), phi.end()) - phi.begin());
    }
    Rng rng(options.seed, r);
    const std::size_t donor = rng.index(data.rows());
    std::copy(row.begin(), row.end(), x.begin());
    x[static_cast<std::size_t>(feature)] = data.at(donor, static_cast<std::size_t>(feature));
    total += predict(ensemble, x) - predict(ensemble, row);
    curve.push_back(total);
  }
  return curve;
}

}  // namespace treexplain

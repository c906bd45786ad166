#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// Attribution along x's decision path: each split's feature receives the
// change in the node expectation (cover-weighted leaf mean) caused by taking
// x's branch. Locally accurate, not consistent.
Attribution saabas(const TreeEnsemble& ensemble, std::span<const double> x);

// Variance reduction of every split, summed per feature. Node impurity is
// sum over leaves below of cover * (value - node mean)^2, i.e. the dataset has
// cover-many points per leaf labeled with the leaf value.
std::vector<double> gain_importance(const TreeEnsemble& ensemble);

std::vector<double> split_count_importance(const TreeEnsemble& ensemble);

struct PermutationOptions {
  int repeats = 10;
  std::uint64_t seed = 0;
};

// Mean increase of squared error after shuffling each column. May be
// negative. Requires at least two rows and labels.size() == data.rows().
std::vector<double> permutation_importance(const TreeEnsemble& ensemble, const Dataset& data,
                                           std::span<const double> labels,
                                           const PermutationOptions& options = {});

struct MeanAbsShap {
  std::vector<double> sum;
  std::vector<double> mean;
};

MeanAbsShap mean_abs_shap(const TreeEnsemble& ensemble, const Dataset& data);
MeanAbsShap mean_abs_shap(std::span<const Attribution> attributions, int num_features);

// Feature indices sorted by descending importance; ties keep index order.
std::vector<int> rank_features(std::span<const double> importance);

enum class AttributionMethod {
  kTreeShap,
  kSaabas,
  kBrute,
  kGain,
  kSplitCount,
  kPermutation,
  kMeanAbsShap,
};

AttributionMethod parse_attribution_method(std::string_view name);
std::string_view attribution_method_name(AttributionMethod method);
bool is_individualized(AttributionMethod method);

struct PerturbationOptions {
  std::uint64_t seed = 0;
  // Labels for kPermutation; the model's own predictions when empty.
  std::vector<double> labels;
};

// For each row in order: pick the feature to perturb (individualized methods:
// the most negative attribution for that row, ties to the lowest index;
// global methods: the top-ranked feature for the whole dataset), replace its
// value with the same feature from a random row, and add the change in model
// output to a running total. Returns the running total after each row.
std::vector<double> perturbation_experiment(const TreeEnsemble& ensemble, const Dataset& data,
                                            AttributionMethod method,
                                            const PerturbationOptions& options = {});

}  // namespace treexplain

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "treexplain/baselines.hpp"
#include "treexplain/synthetic.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain::testing {

struct ConsistencyReport {
  int edits = 0;
  int inputs = 0;
  int shap_violations = 0;
  int saabas_violations = 0;
  int gain_rank_violations = 0;
  double worst_shap_drop = 0.0;
};

inline std::size_t RankOf(std::span<const double> importance, int feature) {
  const auto order = rank_features(importance);
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), feature) - order.begin());
}

// Raise every leaf below `node` by delta.
inline void RaiseSubtree(Tree& tree, int node, double delta) {
  std::vector<int> stack{node};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    const auto u = static_cast<std::size_t>(n);
    if (tree.is_leaf(n)) {
      tree.values[u] += delta;
    } else {
      stack.push_back(tree.left[u]);
      stack.push_back(tree.right[u]);
    }
  }
}

// Path from the root to `target`, as (node, went_left) pairs.
inline bool PathTo(const Tree& tree, int node, int target, std::vector<std::pair<int, bool>>& path) {
  if (node == target) return true;
  if (tree.is_leaf(node)) return false;
  const auto u = static_cast<std::size_t>(node);
  path.emplace_back(node, true);
  if (PathTo(tree, tree.left[u], target, path)) return true;
  path.back().second = false;
  if (PathTo(tree, tree.right[u], target, path)) return true;
  path.pop_back();
  return false;
}

// Leaf-raise edits: pick a split on feature i and one of its children, raise
// every leaf below that child by delta > 0. For inputs whose x_i agrees with
// every i-split on the way to that child, knowing x_i can only raise the
// probability of reaching the raised leaves, so every marginal contribution
// of i grows and phi_i must not decrease.
inline void RunLeafRaiseEdits(std::uint64_t seed, int edits, int inputs_per_edit,
                              ConsistencyReport& report) {
  Rng rng(seed);
  while (report.edits < edits) {
    RandomEnsembleConfig rc;
    rc.num_trees = 1 + static_cast<int>(rng.index(4));
    rc.max_depth = 1 + static_cast<int>(rng.index(6));
    rc.num_features = 1 + static_cast<int>(rng.index(8));
    rc.leaf_probability = rng.uniform(0.0, 0.4);
    const TreeEnsemble before = random_ensemble(rc, rng);

    const std::size_t t = rng.index(before.trees().size());
    const Tree& tree = before.tree(t);
    std::vector<int> internal;
    for (std::size_t j = 0; j < tree.size(); ++j) {
      if (!tree.is_leaf(static_cast<int>(j))) internal.push_back(static_cast<int>(j));
    }
    if (internal.empty()) continue;
    const int split = internal[rng.index(internal.size())];
    const int feature = tree.features[static_cast<std::size_t>(split)];
    const bool left_side = rng.bernoulli(0.5);
    const int child = left_side ? tree.left[static_cast<std::size_t>(split)]
                                : tree.right[static_cast<std::size_t>(split)];
    const double delta = rng.uniform(0.01, 2.0 * rc.value_scale);

    std::vector<Tree> trees = before.trees();
    RaiseSubtree(trees[t], child, delta);
    const TreeEnsemble after(std::move(trees), before.base_score(), before.num_features());

    // Interval (lo, hi] of x_i values that follow the path to `child`.
    std::vector<std::pair<int, bool>> path;
    PathTo(tree, 0, child, path);
    double lo = -1.0;
    double hi = 2.0;
    for (auto [node, went_left] : path) {
      const auto u = static_cast<std::size_t>(node);
      if (tree.features[u] != feature) continue;
      if (went_left) {
        hi = std::min(hi, tree.thresholds[u]);
      } else {
        lo = std::max(lo, tree.thresholds[u]);
      }
    }

    const auto gain_before = gain_importance(before);
    const auto gain_after = gain_importance(after);
    if (RankOf(gain_after, feature) > RankOf(gain_before, feature)) ++report.gain_rank_violations;

    const auto f = static_cast<std::size_t>(feature);
    for (int k = 0; k < inputs_per_edit; ++k) {
      auto x = random_input(before, rng, 0.1);
      x[f] = rng.bernoulli(0.2) ? hi : rng.uniform(lo, hi);
      if (x[f] <= lo) x[f] = hi;
      const double drop = ensemble_shap(before, x).phi[f] - ensemble_shap(after, x).phi[f];
      // Relative slack for rounding only.
      if (drop > 1e-9 * std::max(1.0, delta)) ++report.shap_violations;
      report.worst_shap_drop = std::max(report.worst_shap_drop, drop);
      if (saabas(after, x).phi[f] < saabas(before, x).phi[f] - 1e-9) ++report.saabas_violations;
      ++report.inputs;
    }
    ++report.edits;
  }
}

// The two AND trees: Cough matters more in Model B than in Model A for every
// subset, so its attribution must not fall from A to B.
inline void RunPlantedWitness(ConsistencyReport& report) {
  const auto a = fixture_model_a();
  const auto b = fixture_model_b();
  const std::vector<double> yes{1.0, 1.0};
  constexpr int kCough = 1;
  if (ensemble_shap(b, yes).phi[kCough] < ensemble_shap(a, yes).phi[kCough] - 1e-9) ++report.shap_violations;
  if (saabas(b, yes).phi[kCough] < saabas(a, yes).phi[kCough] - 1e-9) ++report.saabas_violations;
  if (RankOf(gain_importance(b), kCough) > RankOf(gain_importance(a), kCough)) ++report.gain_rank_violations;
  ++report.edits;
  ++report.inputs;
}

}  // namespace treexplain::testing

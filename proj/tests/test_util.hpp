#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/synthetic.hpp"

namespace treexplain::testing {

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return a.size() == b.size() ? worst : INFINITY;
}

inline double MaxAbsDiff(const Attribution& a, const Attribution& b) {
  return std::max(MaxAbsDiff(a.phi, b.phi), std::abs(a.phi0 - b.phi0));
}

inline double MaxAbsDiff(const InteractionMatrix& a, const InteractionMatrix& b) {
  return std::max(MaxAbsDiff(a.values, b.values), std::abs(a.phi0 - b.phi0));
}

struct RandomCase {
  TreeEnsemble ensemble;
  std::vector<double> x;
};

// T, D and M drawn uniformly from [1, max_*].
inline RandomCase MakeRandomCase(Rng& rng, int max_trees, int max_depth, int max_features,
                                 double tie_probability = 0.1) {
  RandomEnsembleConfig rc;
  rc.num_trees = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_trees)));
  rc.max_depth = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_depth)));
  rc.num_features = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_features)));
  rc.leaf_probability = rng.uniform(0.0, 0.4);
  TreeEnsemble ensemble = random_ensemble(rc, rng);
  auto x = random_input(ensemble, rng, tie_probability);
  return {std::move(ensemble), std::move(x)};
}

// One tree: a stump on `feature` with the given leaf values and covers.
inline Tree Stump(int feature, double threshold, double left_value, double right_value,
                  double left_cover = 1.0, double right_cover = 1.0) {
  Tree t;
  t.features = {feature, -1, -1};
  t.left = {1, -1, -1};
  t.right = {2, -1, -1};
  t.thresholds = {threshold, 0.0, 0.0};
  t.values = {0.0, left_value, right_value};
  t.covers = {left_cover + right_cover, left_cover, right_cover};
  return t;
}

}  // namespace treexplain::testing

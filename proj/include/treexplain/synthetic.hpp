#pragma once

#include <vector>

#include "treexplain/random.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// The two AND-style trees used to demonstrate attribution inconsistencies.
// Features: 0 = Fever, 1 = Cough; 1 means "Yes", split threshold 0.5.
// Model A: root splits on Fever, leaves {0, 0, 0, 80}.
// Model B: root splits on Cough, leaves {0, 0, 10, 90}.
// Every leaf has the same cover.
TreeEnsemble fixture_model_a();
TreeEnsemble fixture_model_b();
// Every (Fever, Cough) combination repeated `copies` times; copies = 25 matches
// the leaf covers.
Dataset fixture_dataset(int copies = 1);

// Negative AND tree for the perturbation experiment: root on feature 1, then
// feature 0, leaves {0, 0, -20, -100}. At (1, 1) feature 1 carries the larger
// negative Shapley value while path attribution blames feature 0.
TreeEnsemble planted_perturbation_model();
// `pairs` copies of the rows (1, 1) and (0, 0), alternating.
Dataset planted_perturbation_dataset(int pairs);

struct RandomEnsembleConfig {
  int num_trees = 1;
  int max_depth = 3;
  int num_features = 3;
  // Probability that a non-root node above max_depth becomes a leaf.
  double leaf_probability = 0.25;
  // Every leaf at exactly max_depth.
  bool full = false;
  double value_scale = 10.0;
};

// Random ensemble with real-valued covers, thresholds and leaf values. Split
// thresholds are drawn inside the region reaching each node, so every leaf is
// reachable by inputs in [0, 1)^M. Features may repeat along a path.
TreeEnsemble random_ensemble(const RandomEnsembleConfig& config, Rng& rng);

// Uniform input in [0, 1)^M.
std::vector<double> random_input(int num_features, Rng& rng);

// Uniform input, with each coordinate snapped with probability tie_probability
// to a threshold the ensemble uses on that feature (exercises x == t ties).
std::vector<double> random_input(const TreeEnsemble& ensemble, Rng& rng,
                                 double tie_probability);

Dataset random_dataset(int num_features, std::size_t rows, Rng& rng);

}  // namespace treexplain

#pragma once

#include <span>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/path.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// How one feature is treated while computing the SHAP values of the rest.
enum class Condition {
  kNone,
  kPresent,  // feature fixed to x's value, follows x's branch
  kAbsent,   // feature marginalized by cover weights
};

struct TreeShapOptions {
  WorkCounter* counter = nullptr;
  // Neumaier-compensated accumulation of per-leaf contributions. Useful for
  // very deep trees; off by default.
  bool compensated = false;
  // Test hook: scales every leaf subset weight by (1 + weight_perturbation).
  // Any nonzero value produces wrong attributions; used as a negative control.
  double weight_perturbation = 0.0;
};

// Adds one tree's exact SHAP values for x into phi (length M). When condition
// is not kNone, condition_feature is excluded from the player set and phi of
// that feature is left untouched.
void tree_shap(const Tree& tree, std::span<const double> x, std::span<double> phi,
               const TreeShapOptions& options = {}, int condition_feature = -1,
               Condition condition = Condition::kNone);

Attribution ensemble_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                          const TreeShapOptions& options = {});

// SHAP values of every feature other than `feature` for the game in which
// `feature` is forced present or absent. phi[feature] is 0; phi0 is the
// conditioned expectation with no other features known and output is the
// conditioned game's value with all other features known.
Attribution conditional_ensemble_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                                      int feature, Condition condition,
                                      const TreeShapOptions& options = {});

// SHAP interaction values via two conditioned passes per used feature.
InteractionMatrix shap_interactions(const TreeEnsemble& ensemble, std::span<const double> x,
                                    const TreeShapOptions& options = {});

}  // namespace treexplain

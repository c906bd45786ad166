#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// Exponential-time reference implementations. Everything here follows the
// definitions directly: conditional expectations by cover-weighted descent,
// Shapley values and Shapley interaction indices by subset enumeration.

inline constexpr std::size_t kDefaultOracleCap = 20;

// Canonical feature set, stored as a membership mask over [0, M).
class FeatureSubset {
 public:
  explicit FeatureSubset(int num_features) : present_(static_cast<std::size_t>(num_features), 0) {}
  FeatureSubset(int num_features, std::initializer_list<int> members);

  void insert(int f);
  void erase(int f) { present_.at(static_cast<std::size_t>(f)) = 0; }
  bool contains(int f) const { return present_[static_cast<std::size_t>(f)] != 0; }
  int num_features() const { return static_cast<int>(present_.size()); }
  std::size_t count() const;

 private:
  std::vector<char> present_;
};

// E[f(x) | x_S] for one tree (no base score).
double exp_value(const Tree& tree, std::span<const double> x, const FeatureSubset& subset);
// Ensemble version: base_score + sum over trees.
double exp_value(const TreeEnsemble& ensemble, std::span<const double> x,
                 const FeatureSubset& subset);

struct OracleOptions {
  std::size_t cap = kDefaultOracleCap;
  // Players of the game. Defaults to the features used by the ensemble.
  // Features outside this list that the ensemble uses are held present.
  std::optional<std::vector<int>> players;
  // Enumerate every declared feature instead of only the used ones. Only for
  // checking that unused features are null players; exponential in M.
  bool enumerate_all_features = false;
};

// f_x(S) for every subset of the player list, indexed by bitmask over
// player positions.
struct SubsetValueTable {
  std::vector<int> players;
  std::vector<double> values;
  double full_output = 0.0;
};

SubsetValueTable subset_values(const TreeEnsemble& ensemble, std::span<const double> x,
                               const OracleOptions& options = {});

Attribution brute_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                       const OracleOptions& options = {});
InteractionMatrix brute_interactions(const TreeEnsemble& ensemble, std::span<const double> x,
                                     const OracleOptions& options = {});

// Same results from a precomputed table (avoids re-enumerating when both are
// needed). num_features is the declared M.
Attribution shap_from_table(const SubsetValueTable& table, int num_features);
InteractionMatrix interactions_from_table(const SubsetValueTable& table, int num_features);

}  // namespace treexplain

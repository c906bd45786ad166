#include "treexplain/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace treexplain {

FeatureSubset::FeatureSubset(int num_features, std::initializer_list<int> members)
    : FeatureSubset(num_features) {
  for (int f : members) insert(f);
}

void FeatureSubset::insert(int f) {
  if (f < 0 || f >= num_features()) {
    throw Error(ErrorKind::kIndexOutOfRange, "feature " + std::to_string(f) + " outside subset range");
  }
  present_[static_cast<std::size_t>(f)] = 1;
}

std::size_t FeatureSubset::count() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 1));
}

namespace {

double ExpValueAt(const Tree& tree, std::span<const double> x, const FeatureSubset& subset,
                  int node, double weight) {
  const auto j = static_cast<std::size_t>(node);
  if (tree.is_leaf(node)) return weight * tree.values[j];
  const int f = tree.features[j];
  if (subset.contains(f)) {
    const int next = x[static_cast<std::size_t>(f)] <= tree.thresholds[j] ? tree.left[j] : tree.right[j];
    return ExpValueAt(tree, x, subset, next, weight);
  }
  const double cover = tree.covers[j];
  const auto a = tree.left[j];
  const auto b = tree.right[j];
  return ExpValueAt(tree, x, subset, a, weight * tree.covers[static_cast<std::size_t>(a)] / cover) +
         ExpValueAt(tree, x, subset, b, weight * tree.covers[static_cast<std::size_t>(b)] / cover);
}

// 1 / (n * C(n-1, s)) == s! (n-s-1)! / n!
std::vector<double> ShapleyWeights(std::size_t n) {
  std::vector<double> w(n, 0.0);
  double binom = 1.0;  // C(n-1, s)
  for (std::size_t s = 0; s < n; ++s) {
    w[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

// s! (n-s-2)! / (2 (n-1)!) == 1 / (2 (n-1) C(n-2, s))
std::vector<double> InteractionWeights(std::size_t n) {
  if (n < 2) return {};
  std::vector<double> w(n - 1, 0.0);
  double binom = 1.0;  // C(n-2, s)
  for (std::size_t s = 0; s + 1 < n; ++s) {
    w[s] = 1.0 / (2.0 * static_cast<double>(n - 1) * binom);
    binom = binom * static_cast<double>(n - 2 - s) / static_cast<double>(s + 1);
  }
  return w;
}

}  // namespace

double exp_value(const Tree& tree, std::span<const double> x, const FeatureSubset& subset) {
  return ExpValueAt(tree, x, subset, 0, 1.0);
}

double exp_value(const TreeEnsemble& ensemble, std::span<const double> x,
                 const FeatureSubset& subset) {
  check_dimension(ensemble, x);
  double out = ensemble.base_score();
  for (const auto& tree : ensemble.trees()) out += exp_value(tree, x, subset);
  return out;
}

SubsetValueTable subset_values(const TreeEnsemble& ensemble, std::span<const double> x,
                               const OracleOptions& options) {
  check_dimension(ensemble, x);
  const int m = ensemble.num_features();
  SubsetValueTable table;
  if (options.players) {
    table.players = *options.players;
    std::sort(table.players.begin(), table.players.end());
    table.players.erase(std::unique(table.players.begin(), table.players.end()), table.players.end());
    for (int f : table.players) {
      if (f < 0 || f >= m) {
        throw Error(ErrorKind::kIndexOutOfRange, "player feature " + std::to_string(f) + " out of range");
      }
    }
  } else if (options.enumerate_all_features) {
    table.players.resize(static_cast<std::size_t>(m));
    std::iota(table.players.begin(), table.players.end(), 0);
  } else {
    table.players = ensemble.used_features();
  }
  const std::size_t n = table.players.size();
  if (n > options.cap) {
    throw Error(ErrorKind::kTooManyFeatures,
                "TooManyFeatures: " + std::to_string(n) + " features to enumerate exceeds cap " +
                    std::to_string(options.cap));
  }

  // Non-players are held present.
  FeatureSubset base(m);
  for (int f = 0; f < m; ++f) base.insert(f);
  for (int f : table.players) base.erase(f);

  const std::size_t count = std::size_t{1} << n;
  table.values.resize(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    FeatureSubset subset = base;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask >> b & 1U) subset.insert(table.players[b]);
    }
    table.values[mask] = exp_value(ensemble, x, subset);
  }
  table.full_output = predict(ensemble, x);
  return table;
}

Attribution shap_from_table(const SubsetValueTable& table, int num_features) {
  const std::size_t n = table.players.size();
  Attribution out;
  out.phi.assign(static_cast<std::size_t>(num_features), 0.0);
  out.phi0 = table.values[0];
  out.output = table.full_output;
  if (n == 0) return out;
  const auto weights = ShapleyWeights(n);
  const std::size_t count = table.values.size();
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t bit = std::size_t{1} << p;
    double acc = 0.0;
    for (std::size_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      acc += weights[s] * (table.values[mask | bit] - table.values[mask]);
    }
    out.phi[static_cast<std::size_t>(table.players[p])] = acc;
  }
  return out;
}

InteractionMatrix interactions_from_table(const SubsetValueTable& table, int num_features) {
  const Attribution shap = shap_from_table(table, num_features);
  InteractionMatrix out(num_features, shap.phi0);
  const std::size_t n = table.players.size();
  const auto weights = InteractionWeights(n);
  const std::size_t count = table.values.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const std::size_t bi = std::size_t{1} << p;
      const std::size_t bj = std::size_t{1} << q;
      double acc = 0.0;
      for (std::size_t mask = 0; mask < count; ++mask) {
        if (mask & (bi | bj)) continue;
        const auto s = static_cast<std::size_t>(std::popcount(mask));
        const double delta = table.values[mask | bi | bj] - table.values[mask | bi] -
                             table.values[mask | bj] + table.values[mask];
        acc += weights[s] * delta;
      }
      out.at(table.players[p], table.players[q]) = acc;
      out.at(table.players[q], table.players[p]) = acc;
    }
  }
  for (int f : table.players) {
    double off = 0.0;
    for (int g : table.players) {
      if (g != f) off += out.at(f, g);
    }
    out.at(f, f) = shap.phi[static_cast<std::size_t>(f)] - off;
  }
  return out;
}

Attribution brute_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                       const OracleOptions& options) {
  return shap_from_table(subset_values(ensemble, x, options), ensemble.num_features());
}

InteractionMatrix brute_interactions(const TreeEnsemble& ensemble, std::span<const double> x,
                                     const OracleOptions& options) {
  return interactions_from_table(subset_values(ensemble, x, options), ensemble.num_features());
}

}  // namespace treexplain

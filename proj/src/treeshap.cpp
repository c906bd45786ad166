#include "treexplain/treeshap.hpp"

#include <algorithm>
#include <cmath>

namespace treexplain {
namespace {

class Accumulator {
 public:
  Accumulator(std::span<double> phi, bool compensated)
      : phi_(phi), carry_(compensated ? phi.size() : 0, 0.0) {}

  void add(int feature, double value) {
    const auto f = static_cast<std::size_t>(feature);
    if (carry_.empty()) {
      phi_[f] += value;
      return;
    }
    const double sum = phi_[f] + value;
    if (std::abs(phi_[f]) >= std::abs(value)) {
      carry_[f] += (phi_[f] - sum) + value;
    } else {
      carry_[f] += (value - sum) + phi_[f];
    }
    phi_[f] = sum;
  }

  void flush() {
    for (std::size_t f = 0; f < carry_.size(); ++f) phi_[f] += carry_[f];
  }

 private:
  std::span<double> phi_;
  std::vector<double> carry_;
};

struct Walk {
  const Tree& tree;
  std::span<const double> x;
  Accumulator& acc;
  int condition_feature;
  Condition condition;
  WorkCounter* counter;
  double weight_scale;

  // Each call owns the buffer segment starting at `path`; children take the
  // segment right after the live elements, so a copy per level is kept and
  // total buffer use is O(D^2).
  void Recurse(int node, const PathElement* parent, std::size_t parent_len, PathElement* path,
               double zero_fraction, double one_fraction, int split_feature,
               double condition_fraction) {
    if (counter) ++counter->node_visits;
    std::copy(parent, parent + parent_len, path);
    std::size_t len = parent_len;
    if (condition == Condition::kNone || split_feature != condition_feature) {
      detail::extend_path(path, len, zero_fraction, one_fraction, split_feature, counter);
      ++len;
    }

    const auto j = static_cast<std::size_t>(node);
    if (tree.is_leaf(node)) {
      const double value = tree.values[j] * condition_fraction * weight_scale;
      // Position 0 is the dummy root element and is never attributed.
      for (std::size_t i = 1; i < len; ++i) {
        const double w = detail::unwound_path_sum(path, len, i, counter);
        acc.add(path[i].feature, w * (path[i].one_fraction - path[i].zero_fraction) * value);
      }
      return;
    }

    const int feature = tree.features[j];
    const bool goes_left = x[static_cast<std::size_t>(feature)] <= tree.thresholds[j];
    const int hot = goes_left ? tree.left[j] : tree.right[j];
    const int cold = goes_left ? tree.right[j] : tree.left[j];
    const double cover = tree.covers[j];
    const double hot_ratio = tree.covers[static_cast<std::size_t>(hot)] / cover;
    const double cold_ratio = tree.covers[static_cast<std::size_t>(cold)] / cover;
    PathElement* child = path + len + 1;

    if (condition != Condition::kNone && feature == condition_feature) {
      if (condition == Condition::kPresent) {
        Recurse(hot, path, len, child, 1.0, 1.0, feature, condition_fraction);
      } else {
        if (hot_ratio > 0.0) {
          Recurse(hot, path, len, child, 1.0, 1.0, feature, condition_fraction * hot_ratio);
        }
        if (cold_ratio > 0.0) {
          Recurse(cold, path, len, child, 1.0, 1.0, feature, condition_fraction * cold_ratio);
        }
      }
      return;
    }

    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    for (std::size_t k = 1; k < len; ++k) {
      if (path[k].feature == feature) {
        incoming_zero = path[k].zero_fraction;
        incoming_one = path[k].one_fraction;
        detail::unwind_path(path, len, k, counter);
        --len;
        break;
      }
    }
    child = path + len + 1;
    const double hot_zero = incoming_zero * hot_ratio;
    const double cold_zero = incoming_zero * cold_ratio;
    // A branch with both fractions 0 receives no subsets at all.
    if (hot_zero != 0.0 || incoming_one != 0.0) {
      Recurse(hot, path, len, child, hot_zero, incoming_one, feature, condition_fraction);
    }
    if (cold_zero != 0.0) {
      Recurse(cold, path, len, child, cold_zero, 0.0, feature, condition_fraction);
    }
  }
};

std::size_t BufferSize(int depth) {
  const auto d = static_cast<std::size_t>(std::max(depth, 0));
  return (d + 2) * (d + 3) / 2 + 1;
}

void RunTree(const Tree& tree, std::span<const double> x, Accumulator& acc,
             const TreeShapOptions& options, int condition_feature, Condition condition,
             std::vector<PathElement>& buffer) {
  Walk walk{tree, x, acc, condition_feature, condition, options.counter,
            1.0 + options.weight_perturbation};
  walk.Recurse(0, nullptr, 0, buffer.data(), 1.0, 1.0, kLeaf, 1.0);
}

// E[f | x_j] (present) or E[f] (absent) for one tree, or with every feature
// but j known when `others_known` is set.
double ConditionedValue(const Tree& tree, std::span<const double> x, int feature,
                        bool feature_known, bool others_known, int node) {
  const auto j = static_cast<std::size_t>(node);
  if (tree.is_leaf(node)) return tree.values[j];
  const int f = tree.features[j];
  const bool known = f == feature ? feature_known : others_known;
  if (known) {
    const int next = x[static_cast<std::size_t>(f)] <= tree.thresholds[j] ? tree.left[j] : tree.right[j];
    return ConditionedValue(tree, x, feature, feature_known, others_known, next);
  }
  const auto l = static_cast<std::size_t>(tree.left[j]);
  const auto r = static_cast<std::size_t>(tree.right[j]);
  return (tree.covers[l] * ConditionedValue(tree, x, feature, feature_known, others_known, tree.left[j]) +
          tree.covers[r] * ConditionedValue(tree, x, feature, feature_known, others_known, tree.right[j])) /
         tree.covers[j];
}

}  // namespace

void tree_shap(const Tree& tree, std::span<const double> x, std::span<double> phi,
               const TreeShapOptions& options, int condition_feature, Condition condition) {
  std::vector<PathElement> buffer(BufferSize(tree.depth()));
  Accumulator acc(phi, options.compensated);
  RunTree(tree, x, acc, options, condition_feature, condition, buffer);
  acc.flush();
}

namespace {

std::vector<double> RunEnsemble(const TreeEnsemble& ensemble, std::span<const double> x,
                                const TreeShapOptions& options, int condition_feature,
                                Condition condition) {
  std::vector<double> phi(static_cast<std::size_t>(ensemble.num_features()), 0.0);
  std::vector<PathElement> buffer(BufferSize(ensemble.stats().max_depth));
  Accumulator acc(phi, options.compensated);
  for (const auto& tree : ensemble.trees()) {
    RunTree(tree, x, acc, options, condition_feature, condition, buffer);
  }
  acc.flush();
  return phi;
}

void CheckFeature(const TreeEnsemble& ensemble, int feature) {
  if (feature < 0 || feature >= ensemble.num_features()) {
    throw Error(ErrorKind::kIndexOutOfRange,
                "conditioning feature " + std::to_string(feature) + " outside [0, " +
                    std::to_string(ensemble.num_features()) + ")");
  }
}

}  // namespace

Attribution ensemble_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                          const TreeShapOptions& options) {
  check_dimension(ensemble, x);
  Attribution out;
  out.phi = RunEnsemble(ensemble, x, options, -1, Condition::kNone);
  out.phi0 = expected_value(ensemble);
  out.output = predict(ensemble, x);
  return out;
}

Attribution conditional_ensemble_shap(const TreeEnsemble& ensemble, std::span<const double> x,
                                      int feature, Condition condition,
                                      const TreeShapOptions& options) {
  check_dimension(ensemble, x);
  if (condition == Condition::kNone) return ensemble_shap(ensemble, x, options);
  CheckFeature(ensemble, feature);
  Attribution out;
  out.phi = RunEnsemble(ensemble, x, options, feature, condition);
  const bool present = condition == Condition::kPresent;
  out.phi0 = ensemble.base_score();
  out.output = ensemble.base_score();
  for (const auto& tree : ensemble.trees()) {
    out.phi0 += ConditionedValue(tree, x, feature, present, false, 0);
    out.output += ConditionedValue(tree, x, feature, present, true, 0);
  }
  return out;
}

InteractionMatrix shap_interactions(const TreeEnsemble& ensemble, std::span<const double> x,
                                    const TreeShapOptions& options) {
  const Attribution base = ensemble_shap(ensemble, x, options);
  const int m = ensemble.num_features();
  InteractionMatrix out(m, base.phi0);
  const auto used = ensemble.used_features();
  for (int j : used) {
    const auto present = RunEnsemble(ensemble, x, options, j, Condition::kPresent);
    const auto absent = RunEnsemble(ensemble, x, options, j, Condition::kAbsent);
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      const auto u = static_cast<std::size_t>(i);
      out.at(i, j) = 0.5 * (present[u] - absent[u]);
    }
  }
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j != i) off += out.at(i, j);
    }
    out.at(i, i) = base.phi[static_cast<std::size_t>(i)] - off;
  }
  return out;
}

}  // namespace treexplain

#pragma once

#include <cstddef>
#include <vector>

namespace treexplain {

// Additive explanation of one prediction: output == phi0 + sum(phi).
struct Attribution {
  double phi0 = 0.0;
  std::vector<double> phi;
  double output = 0.0;

  double sum() const;
  // |phi0 + sum(phi) - output|
  double local_accuracy_error() const;
};

// Pairwise SHAP interaction values. Off-diagonal entries hold half of each
// pair's interaction effect; the diagonal holds main effects.
struct InteractionMatrix {
  double phi0 = 0.0;
  int num_features = 0;
  std::vector<double> values;  // row-major num_features x num_features

  InteractionMatrix() = default;
  InteractionMatrix(int m, double base) : phi0(base), num_features(m), values(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(num_features) + static_cast<std::size_t>(j)]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(num_features) + static_cast<std::size_t>(j)]; }

  double row_sum(int i) const;
  double max_asymmetry() const;
};

}  // namespace treexplain

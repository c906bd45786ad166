#include "treexplain/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace treexplain {

double Attribution::sum() const {
  return std::accumulate(phi.begin(), phi.end(), phi0);
}

double Attribution::local_accuracy_error() const { return std::abs(sum() - output); }

double InteractionMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < num_features; ++j) s += at(i, j);
  return s;
}

double InteractionMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < num_features; ++i) {
    for (int j = i + 1; j < num_features; ++j) worst = std::max(worst, std::abs(at(i, j) - at(j, i)));
  }
  return worst;
}

}  // namespace treexplain

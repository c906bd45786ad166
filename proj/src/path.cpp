#include "treexplain/path.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "treexplain/error.hpp"

namespace treexplain {
namespace detail {

// Index map from the 1-based pseudocode: pseudocode element k is path[k - 1],
// and the pseudocode's path length after the extension is `grown` below. The
// cardinality factors k/l and (l-k)/l become (i+1)/grown and (grown-1-i)/grown.
void extend_path(PathElement* path, std::size_t length, double zero_fraction,
                 double one_fraction, int feature, WorkCounter* counter) {
  const std::size_t grown = length + 1;
  const double denom = static_cast<double>(grown);
  path[length] = PathElement{feature, zero_fraction, one_fraction, length == 0 ? 1.0 : 0.0};
  for (std::size_t k = length; k-- > 0;) {
    path[k + 1].weight += one_fraction * path[k].weight * static_cast<double>(k + 1) / denom;
    path[k].weight = zero_fraction * path[k].weight * static_cast<double>(grown - 1 - k) / denom;
  }
  if (counter) counter->path_ops += length;
}

void unwind_path(PathElement* path, std::size_t length, std::size_t position,
                 WorkCounter* counter) {
  assert(length >= 1 && position < length);
  const double one = path[position].one_fraction;
  const double zero = path[position].zero_fraction;
  const double n = static_cast<double>(length);
  // Solve the extension recurrence from whichever end divides by the larger
  // fraction. Divisors: (k + 1) >= 1, (length - 1 - k) >= 1 for k <= length - 2.
  if (one >= zero) {
    double next = path[length - 1].weight;
    for (std::size_t k = length - 1; k-- > 0;) {
      const double tmp = path[k].weight;
      path[k].weight = next * n / (static_cast<double>(k + 1) * one);
      next = tmp - path[k].weight * zero * static_cast<double>(length - 1 - k) / n;
    }
  } else {
    double prev = 0.0;
    for (std::size_t k = 0; k + 1 < length; ++k) {
      const double rest = path[k].weight - prev * one * static_cast<double>(k) / n;
      path[k].weight = rest * n / (zero * static_cast<double>(length - 1 - k));
      prev = path[k].weight;
    }
  }
  for (std::size_t k = position; k + 1 < length; ++k) {
    path[k].feature = path[k + 1].feature;
    path[k].zero_fraction = path[k + 1].zero_fraction;
    path[k].one_fraction = path[k + 1].one_fraction;
  }
  if (counter) counter->path_ops += length - 1;
}

double unwound_path_sum(const PathElement* path, std::size_t length, std::size_t position,
                        WorkCounter* counter) {
  const double one = path[position].one_fraction;
  const double zero = path[position].zero_fraction;
  double total = 0.0;
  if (one >= zero) {
    double next = path[length - 1].weight;
    for (std::size_t k = length - 1; k-- > 0;) {
      const double tmp = next / (static_cast<double>(k + 1) * one);
      total += tmp;
      next = path[k].weight - tmp * zero * static_cast<double>(length - 1 - k);
    }
  } else {
    double prev = 0.0;
    for (std::size_t k = 0; k + 1 < length; ++k) {
      const double tmp = (path[k].weight - prev * one * static_cast<double>(k)) /
                         (zero * static_cast<double>(length - 1 - k));
      total += tmp;
      prev = tmp;
    }
  }
  if (counter) counter->path_ops += length - 1;
  return total * static_cast<double>(length);
}

}  // namespace detail

SubsetPath extend(const SubsetPath& path, double zero_fraction, double one_fraction, int feature) {
  SubsetPath out(path.size() + 1);
  std::copy(path.begin(), path.end(), out.begin());
  detail::extend_path(out.data(), path.size(), zero_fraction, one_fraction, feature, nullptr);
  return out;
}

namespace {

void CheckUnwindable(std::span<const PathElement> path, std::size_t position) {
  if (position >= path.size()) {
    throw Error(ErrorKind::kIndexOutOfRange, "unwind position " + std::to_string(position) +
                                                 " outside path of length " +
                                                 std::to_string(path.size()));
  }
  const auto& e = path[position];
  if (e.one_fraction == 0.0 && e.zero_fraction == 0.0) {
    throw Error(ErrorKind::kDegenerateElement,
                "DegenerateElement: path element " + std::to_string(position) +
                    " has zero and one fractions both 0");
  }
}

}  // namespace

SubsetPath unwind(const SubsetPath& path, std::size_t position) {
  CheckUnwindable(path, position);
  SubsetPath out = path;
  detail::unwind_path(out.data(), out.size(), position, nullptr);
  out.pop_back();
  return out;
}

double unwound_sum(std::span<const PathElement> path, std::size_t position) {
  CheckUnwindable(path, position);
  return detail::unwound_path_sum(path.data(), path.size(), position, nullptr);
}

double weight_sum(std::span<const PathElement> path) {
  double s = 0.0;
  for (const auto& e : path) s += e.weight;
  return s;
}

}  // namespace treexplain

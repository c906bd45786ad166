#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace treexplain {

// One unique split feature on the current root-to-node path.
//   zero_fraction: share of "feature absent" subsets flowing through the branch
//   one_fraction:  share of "feature present" subsets flowing through the branch
//   weight:        proportion of subsets of cardinality == position
// Position 0 is a dummy element with feature kLeaf that is never attributed.
struct PathElement {
  int feature = -1;
  double zero_fraction = 1.0;
  double one_fraction = 1.0;
  double weight = 0.0;
};

using SubsetPath = std::vector<PathElement>;

// Optional work counters for complexity checks. path_ops counts inner-loop
// iterations of extend/unwind/unwound_sum; node_visits counts recursion calls.
struct WorkCounter {
  std::uint64_t node_visits = 0;
  std::uint64_t path_ops = 0;

  std::uint64_t total() const { return node_visits + path_ops; }
};

// Value-returning forms. Positions are 0-based (position 0 is the dummy).
SubsetPath extend(const SubsetPath& path, double zero_fraction, double one_fraction, int feature);
// Throws Error(kDegenerateElement) when the element has zero_fraction ==
// one_fraction == 0, and kIndexOutOfRange for a bad position.
SubsetPath unwind(const SubsetPath& path, std::size_t position);
// sum(unwind(path, position).weight) without materializing the path.
double unwound_sum(std::span<const PathElement> path, std::size_t position);

double weight_sum(std::span<const PathElement> path);

namespace detail {

// In-place kernels over a buffer holding `length` live elements. The buffer
// must have room for length + 1 elements in extend_path.
void extend_path(PathElement* path, std::size_t length, double zero_fraction,
                 double one_fraction, int feature, WorkCounter* counter);
void unwind_path(PathElement* path, std::size_t length, std::size_t position,
                 WorkCounter* counter);
double unwound_path_sum(const PathElement* path, std::size_t length, std::size_t position,
                        WorkCounter* counter);

}  // namespace detail
}  // namespace treexplain

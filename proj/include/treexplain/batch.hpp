#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/baselines.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// Splits [0, count) into contiguous chunks run on up to `threads` threads
// (0 means hardware concurrency). fn(begin, end) must only write to slots it
// owns. The first exception (lowest chunk) is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

unsigned resolve_threads(unsigned threads);

// Row-wise explanations in input order. method must be individualized
// (treeshap, saabas or brute). Errors are rethrown prefixed with the row.
std::vector<Attribution> batch_explain(const TreeEnsemble& ensemble, const Dataset& data,
                                       AttributionMethod method = AttributionMethod::kTreeShap,
                                       unsigned threads = 1);

std::vector<InteractionMatrix> batch_interactions(const TreeEnsemble& ensemble,
                                                  const Dataset& data, unsigned threads = 1);

}  // namespace treexplain

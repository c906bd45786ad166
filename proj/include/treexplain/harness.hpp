#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "treexplain/synthetic.hpp"

namespace treexplain {

// Randomized equivalence check of the polynomial algorithms against the
// enumeration oracle.
struct VerifyConfig {
  std::uint64_t seed = 0;
  int trials = 100;
  int max_features = 12;
  int max_depth = 6;
  int max_trees = 10;
  double tolerance = 1e-8;
  // Negative-control hook forwarded to TreeShapOptions::weight_perturbation.
  double weight_perturbation = 0.0;
};

struct VerifyReport {
  int trials = 0;
  double max_shap_error = 0.0;
  double max_interaction_error = 0.0;
  double max_asymmetry = 0.0;
  double max_row_sum_error = 0.0;
  // max |phi0 + sum(phi) - f(x)| / max(1, |f(x)|)
  double max_local_accuracy_error = 0.0;
  bool passed = true;
};

VerifyReport run_verification(const VerifyConfig& config);

struct BenchConfig {
  std::vector<int> tree_counts{50};
  std::vector<int> depths{2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Empty: M equals D for each depth, sweeping both together.
  std::vector<int> features;
  int repeats = 3;
  int brute_max_features = 16;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string method;
  int trees = 0;
  int depth = 0;
  int features = 0;
  int used_features = 0;
  // Median wall-clock seconds to explain one input, after one warmup run.
  double seconds = 0.0;
};

std::vector<BenchRow> run_benchmark(const BenchConfig& config);

// Median of `repeats` timed calls after one untimed warmup call.
double median_seconds(int repeats, const std::function<void()>& fn);

}  // namespace treexplain

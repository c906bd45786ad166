#include "treexplain/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "treexplain/oracle.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain {

VerifyReport run_verification(const VerifyConfig& config) {
  if (config.max_features < 1 || config.max_depth < 1 || config.max_trees < 1) {
    throw Error(ErrorKind::kInvalidArgument, "verify needs max-features, max-depth, max-trees >= 1");
  }
  VerifyReport report;
  Rng rng(config.seed);
  TreeShapOptions options;
  options.weight_perturbation = config.weight_perturbation;
  for (int trial = 0; trial < config.trials; ++trial) {
    RandomEnsembleConfig rc;
    rc.num_trees = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(config.max_trees)));
    rc.max_depth = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(config.max_depth)));
    rc.num_features = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(config.max_features)));
    rc.leaf_probability = rng.uniform(0.0, 0.4);
    const TreeEnsemble ensemble = random_ensemble(rc, rng);
    const auto x = random_input(ensemble, rng, 0.1);

    const auto table = subset_values(ensemble, x);
    const Attribution expected = shap_from_table(table, ensemble.num_features());
    const InteractionMatrix expected_int = interactions_from_table(table, ensemble.num_features());
    const Attribution got = ensemble_shap(ensemble, x, options);
    const InteractionMatrix got_int = shap_interactions(ensemble, x, options);

    for (std::size_t f = 0; f < got.phi.size(); ++f) {
      report.max_shap_error = std::max(report.max_shap_error, std::abs(got.phi[f] - expected.phi[f]));
    }
    report.max_shap_error = std::max(report.max_shap_error, std::abs(got.phi0 - expected.phi0));
    for (std::size_t k = 0; k < got_int.values.size(); ++k) {
      report.max_interaction_error =
          std::max(report.max_interaction_error, std::abs(got_int.values[k] - expected_int.values[k]));
    }
    report.max_asymmetry = std::max(report.max_asymmetry, got_int.max_asymmetry());
    for (int i = 0; i < got_int.num_features; ++i) {
      report.max_row_sum_error = std::max(
          report.max_row_sum_error, std::abs(got_int.row_sum(i) - got.phi[static_cast<std::size_t>(i)]));
    }
    report.max_local_accuracy_error =
        std::max(report.max_local_accuracy_error,
                 got.local_accuracy_error() / std::max(1.0, std::abs(got.output)));
    ++report.trials;
  }
  report.passed = report.max_shap_error <= config.tolerance &&
                  report.max_interaction_error <= config.tolerance &&
                  report.max_asymmetry <= config.tolerance &&
                  report.max_row_sum_error <= config.tolerance &&
                  report.max_local_accuracy_error <= 1e-6;
  return report;
}

double median_seconds(int repeats, const std::function<void()>& fn) {
  if (repeats < 1) throw Error(ErrorKind::kInvalidArgument, "repeats must be >= 1");
  fn();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  return times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  if (config.repeats < 1) throw Error(ErrorKind::kInvalidArgument, "repeats must be >= 1");
  std::vector<BenchRow> rows;
  Rng rng(config.seed);
  for (int trees : config.tree_counts) {
    for (int depth : config.depths) {
      std::vector<int> feature_counts = config.features;
      if (feature_counts.empty()) feature_counts = {depth};
      for (int m : feature_counts) {
        RandomEnsembleConfig rc;
        rc.num_trees = trees;
        rc.max_depth = depth;
        rc.num_features = m;
        rc.full = true;
        const TreeEnsemble ensemble = random_ensemble(rc, rng);
        const auto x = random_input(m, rng);
        const int used = static_cast<int>(ensemble.used_features().size());

        volatile double sink = 0.0;
        const double fast = median_seconds(config.repeats, [&] { sink = ensemble_shap(ensemble, x).phi0; });
        rows.push_back({"treeshap", trees, depth, m, used, fast});
        if (used <= config.brute_max_features) {
          const double slow = median_seconds(config.repeats, [&] { sink = brute_shap(ensemble, x).phi0; });
          rows.push_back({"brute", trees, depth, m, used, slow});
        }
        (void)sink;
      }
    }
  }
  return rows;
}

}  // namespace treexplain

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treexplain/attribution.hpp"
#include "treexplain/clustering.hpp"
#include "treexplain/tree_model.hpp"

namespace treexplain {

// Plot-ready tables. No rendering happens here.

struct SummaryRecord {
  int feature = 0;
  std::size_t rank = 0;
  std::size_t row = 0;
  double phi = 0.0;
  double value = 0.0;
  double color = 0.0;  // min-max normalized feature value, 0.5 for constant columns
};

struct SummaryOptions {
  // Skip features whose attributions are zero on every row.
  bool drop_unused = false;
};

// Features ordered by sum over rows of |phi| (descending, ties by index);
// records grouped by rank, then by row.
std::vector<SummaryRecord> summary_plot_data(const AttributionMatrix& attributions,
                                             const Dataset& data,
                                             const SummaryOptions& options = {});

// Normalized colors in [0, 1] for one data column.
std::vector<double> normalized_column(const Dataset& data, std::size_t column);

struct DependenceRecord {
  std::size_t row = 0;
  double x = 0.0;
  double phi = 0.0;
  double color = 0.0;  // raw value of the color feature
};

inline constexpr std::size_t kDefaultColorSample = 500;

// argmax over k != feature of sum over the first `sample` rows of
// |Phi[feature][k]|; ties to the lowest index. Returns `feature` itself when
// there is no other feature.
int select_color_feature(int feature, std::span<const InteractionMatrix> interactions,
                         std::size_t sample = kDefaultColorSample);

struct DependencePlot {
  int feature = 0;
  int color_feature = 0;
  std::vector<DependenceRecord> records;
};

// When color_feature is empty it is chosen from `interactions`, which must
// then be non-empty.
DependencePlot dependence_plot_data(int feature, std::optional<int> color_feature,
                                    const AttributionMatrix& attributions, const Dataset& data,
                                    std::span<const InteractionMatrix> interactions = {});

struct MainEffectRecord {
  std::size_t row = 0;
  double x = 0.0;
  double main = 0.0;
};

struct InteractionRecord {
  std::size_t row = 0;
  double x = 0.0;
  double interaction = 0.0;
  double color = 0.0;
};

struct InteractionDependence {
  std::vector<MainEffectRecord> main_effects;
  std::vector<InteractionRecord> interactions;
};

InteractionDependence interaction_dependence_data(int feature, int other, const Dataset& data,
                                                  std::span<const InteractionMatrix> interactions);

// CSV serializations with fixed headers; numbers use the shortest decimal that
// round-trips.
std::string summary_csv(const std::vector<SummaryRecord>& records,
                        const std::vector<std::string>& feature_labels);
std::string dependence_csv(const DependencePlot& plot);
std::string main_effect_csv(const std::vector<MainEffectRecord>& records);
std::string interaction_csv(const std::vector<InteractionRecord>& records);

}  // namespace treexplain

#include "treexplain/plot_export.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treexplain/baselines.hpp"
#include "treexplain/io.hpp"

namespace treexplain {

namespace {

void CheckShapes(const AttributionMatrix& attributions, const Dataset& data) {
  if (attributions.rows != data.rows() || attributions.cols != data.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "attribution matrix shape differs from dataset shape");
  }
}

void CheckFeature(int feature, std::size_t cols, const char* what) {
  if (feature < 0 || static_cast<std::size_t>(feature) >= cols) {
    throw Error(ErrorKind::kIndexOutOfRange,
                std::string(what) + " " + std::to_string(feature) + " out of range");
  }
}

}  // namespace

std::vector<double> normalized_column(const Dataset& data, std::size_t column) {
  std::vector<double> out(data.rows(), 0.5);
  if (data.empty()) return out;
  double lo = data.at(0, column);
  double hi = lo;
  for (std::size_t r = 1; r < data.rows(); ++r) {
    lo = std::min(lo, data.at(r, column));
    hi = std::max(hi, data.at(r, column));
  }
  if (hi > lo) {
    for (std::size_t r = 0; r < data.rows(); ++r) out[r] = (data.at(r, column) - lo) / (hi - lo);
  }
  return out;
}

std::vector<SummaryRecord> summary_plot_data(const AttributionMatrix& attributions,
                                             const Dataset& data, const SummaryOptions& options) {
  CheckShapes(attributions, data);
  std::vector<double> impact(attributions.cols, 0.0);
  for (std::size_t r = 0; r < attributions.rows; ++r) {
    for (std::size_t c = 0; c < attributions.cols; ++c) impact[c] += std::abs(attributions.at(r, c));
  }
  std::vector<SummaryRecord> records;
  records.reserve(attributions.rows * attributions.cols);
  std::size_t rank = 0;
  for (int f : rank_features(impact)) {
    const auto c = static_cast<std::size_t>(f);
    if (options.drop_unused && impact[c] == 0.0) continue;
    const auto colors = normalized_column(data, c);
    for (std::size_t r = 0; r < attributions.rows; ++r) {
      records.push_back({f, rank, r, attributions.at(r, c), data.at(r, c), colors[r]});
    }
    ++rank;
  }
  return records;
}

int select_color_feature(int feature, std::span<const InteractionMatrix> interactions,
                         std::size_t sample) {
  if (interactions.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "color feature selection needs interaction values");
  }
  const int m = interactions.front().num_features;
  CheckFeature(feature, static_cast<std::size_t>(m), "feature");
  const std::size_t rows = std::min(sample, interactions.size());
  int best = feature;
  double best_score = -1.0;
  for (int k = 0; k < m; ++k) {
    if (k == feature) continue;
    double score = 0.0;
    for (std::size_t r = 0; r < rows; ++r) score += std::abs(interactions[r].at(feature, k));
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

DependencePlot dependence_plot_data(int feature, std::optional<int> color_feature,
                                    const AttributionMatrix& attributions, const Dataset& data,
                                    std::span<const InteractionMatrix> interactions) {
  CheckShapes(attributions, data);
  CheckFeature(feature, data.cols(), "feature");
  DependencePlot plot;
  plot.feature = feature;
  plot.color_feature = color_feature ? *color_feature : select_color_feature(feature, interactions);
  CheckFeature(plot.color_feature, data.cols(), "color feature");
  const auto f = static_cast<std::size_t>(feature);
  const auto k = static_cast<std::size_t>(plot.color_feature);
  plot.records.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    plot.records.push_back({r, data.at(r, f), attributions.at(r, f), data.at(r, k)});
  }
  return plot;
}

InteractionDependence interaction_dependence_data(int feature, int other, const Dataset& data,
                                                  std::span<const InteractionMatrix> interactions) {
  if (interactions.size() != data.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "need one interaction matrix per row");
  }
  CheckFeature(feature, data.cols(), "feature");
  CheckFeature(other, data.cols(), "interaction feature");
  const auto f = static_cast<std::size_t>(feature);
  const auto g = static_cast<std::size_t>(other);
  InteractionDependence out;
  out.main_effects.reserve(data.rows());
  out.interactions.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out.main_effects.push_back({r, data.at(r, f), interactions[r].at(feature, feature)});
    out.interactions.push_back({r, data.at(r, f), interactions[r].at(feature, other), data.at(r, g)});
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRecord>& records,
                        const std::vector<std::string>& feature_labels) {
  std::ostringstream os;
  os << "feature,rank,row,phi,value,color\n";
  for (const auto& r : records) {
    os << feature_labels[static_cast<std::size_t>(r.feature)] << ',' << r.rank << ',' << r.row << ','
       << format_double(r.phi) << ',' << format_double(r.value) << ',' << format_double(r.color)
       << '\n';
  }
  return os.str();
}

std::string dependence_csv(const DependencePlot& plot) {
  std::ostringstream os;
  os << "row,x,phi,color\n";
  for (const auto& r : plot.records) {
    os << r.row << ',' << format_double(r.x) << ',' << format_double(r.phi) << ','
       << format_double(r.color) << '\n';
  }
  return os.str();
}

std::string main_effect_csv(const std::vector<MainEffectRecord>& records) {
  std::ostringstream os;
  os << "row,x,main\n";
  for (const auto& r : records) {
    os << r.row << ',' << format_double(r.x) << ',' << format_double(r.main) << '\n';
  }
  return os.str();
}

std::string interaction_csv(const std::vector<InteractionRecord>& records) {
  std::ostringstream os;
  os << "row,x,interaction,color\n";
  for (const auto& r : records) {
    os << r.row << ',' << format_double(r.x) << ',' << format_double(r.interaction) << ','
       << format_double(r.color) << '\n';
  }
  return os.str();
}

}  // namespace treexplain

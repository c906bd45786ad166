#include "treexplain/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "treexplain/batch.hpp"

namespace treexplain {

Linkage parse_linkage(std::string_view name) {
  if (name == "ward") return Linkage::kWard;
  if (name == "complete") return Linkage::kComplete;
  if (name == "average") return Linkage::kAverage;
  throw Error(ErrorKind::kInvalidArgument, "unknown linkage '" + std::string(name) + "'");
}

std::string_view linkage_name(Linkage linkage) {
  switch (linkage) {
    case Linkage::kWard: return "ward";
    case Linkage::kComplete: return "complete";
    case Linkage::kAverage: return "average";
  }
  return "unknown";
}

AttributionMatrix to_matrix(std::span<const Attribution> attributions) {
  AttributionMatrix out;
  out.rows = attributions.size();
  out.cols = attributions.empty() ? 0 : attributions.front().phi.size();
  out.values.reserve(out.rows * out.cols);
  for (const auto& a : attributions) {
    if (a.phi.size() != out.cols) {
      throw Error(ErrorKind::kDimensionMismatch, "attribution rows differ in width");
    }
    out.values.insert(out.values.end(), a.phi.begin(), a.phi.end());
  }
  return out;
}

namespace {

// Condensed upper-triangular distance storage.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * (n - 1) / 2, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return d_[Index(i, j)];
  }

 private:
  std::size_t Index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }
  std::size_t n_;
  std::vector<double> d_;
};

double LanceWilliams(Linkage linkage, double d_ka, double d_kb, double d_ab, double n_a, double n_b,
                     double n_k) {
  switch (linkage) {
    case Linkage::kComplete: return std::max(d_ka, d_kb);
    case Linkage::kAverage: return (n_a * d_ka + n_b * d_kb) / (n_a + n_b);
    case Linkage::kWard: {
      const double v = ((n_k + n_a) * d_ka * d_ka + (n_k + n_b) * d_kb * d_kb - n_k * d_ab * d_ab) /
                       (n_a + n_b + n_k);
      return std::sqrt(std::max(v, 0.0));
    }
  }
  return 0.0;
}

}  // namespace

MergeTree cluster_attributions(const AttributionMatrix& attributions, Linkage linkage) {
  const std::size_t n = attributions.rows;
  if (n < 2) {
    throw Error(ErrorKind::kDegenerateInput, "DegenerateInput: clustering needs at least 2 rows");
  }
  for (double v : attributions.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kDegenerateInput, "DegenerateInput: non-finite attribution");
  }

  DistanceMatrix dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = attributions.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = attributions.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < attributions.cols; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
      dist(i, j) = std::sqrt(s);
    }
  }

  // Slots are named by their smallest member row, so comparing slot indices
  // implements the tie-break directly.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<char> active(n, 1);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nn_dist(n, kInf);

  auto refresh = [&](std::size_t i) {
    nn[i] = n;
    nn_dist[i] = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const double d = dist(i, j);
      if (d < nn_dist[i]) {
        nn_dist[i] = d;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) refresh(i);

  MergeTree tree;
  tree.leaf_count = n;
  tree.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || nn[i] == n) continue;
      if (a == n || nn_dist[i] < nn_dist[a]) a = i;
    }
    const std::size_t b = nn[a];
    const double height = nn_dist[a];
    const double n_a = static_cast<double>(size[a]);
    const double n_b = static_cast<double>(size[b]);

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      dist(k, a) = LanceWilliams(linkage, dist(k, a), dist(k, b), height, n_a, n_b,
                                 static_cast<double>(size[k]));
    }
    active[b] = 0;
    tree.merges.push_back(Merge{std::min(id[a], id[b]), std::max(id[a], id[b]), height, size[a] + size[b]});
    size[a] += size[b];
    id[a] = n + step;

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (k == a || nn[k] == a || nn[k] == b) {
        refresh(k);
      } else if (k < a) {
        const double d = dist(k, a);
        if (d < nn_dist[k] || (d == nn_dist[k] && a < nn[k])) {
          nn_dist[k] = d;
          nn[k] = a;
        }
      }
    }
  }
  return tree;
}

namespace {

std::size_t Find(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<std::size_t> cut_tree(const MergeTree& tree, std::size_t groups) {
  const std::size_t n = tree.leaf_count;
  if (groups < 1 || groups > n) {
    throw Error(ErrorKind::kInvalidArgument, "group count " + std::to_string(groups) +
                                                 " outside [1, " + std::to_string(n) + "]");
  }
  // Union-find over cluster ids; each merged id points at its representative.
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t k = 0; k < n - groups; ++k) {
    const auto& m = tree.merges[k];
    parent[Find(parent, m.first)] = n + k;
    parent[Find(parent, m.second)] = n + k;
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> seen;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t root = Find(parent, r);
    auto it = std::find(seen.begin(), seen.end(), root);
    if (it == seen.end()) {
      labels[r] = seen.size();
      seen.push_back(root);
    } else {
      labels[r] = static_cast<std::size_t>(it - seen.begin());
    }
  }
  return labels;
}

R2Curve r2_curve(const MergeTree& tree, std::span<const double> outputs) {
  const std::size_t n = tree.leaf_count;
  if (outputs.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "outputs length differs from leaf count");
  }
  for (double v : outputs) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kDegenerateInput, "DegenerateInput: non-finite output");
  }
  const double mean = std::accumulate(outputs.begin(), outputs.end(), 0.0) / static_cast<double>(n);
  double sst = 0.0;
  for (double v : outputs) sst += (v - mean) * (v - mean);

  R2Curve curve;
  curve.zero_variance = sst == 0.0;
  std::vector<double> sum(2 * n - 1, 0.0);
  std::vector<double> count(2 * n - 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    sum[r] = outputs[r];
    count[r] = 1.0;
  }
  curve.points.push_back({n, n == 1 ? 0.0 : 1.0});
  double sse = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& m = tree.merges[k];
    const double na = count[m.first];
    const double nb = count[m.second];
    const double diff = sum[m.first] / na - sum[m.second] / nb;
    sse += na * nb / (na + nb) * diff * diff;
    sum[n + k] = sum[m.first] + sum[m.second];
    count[n + k] = na + nb;
    const std::size_t groups = n - k - 1;
    double r2;
    if (groups == 1) {
      r2 = 0.0;
    } else if (curve.zero_variance) {
      r2 = 1.0;
    } else {
      r2 = 1.0 - sse / sst;
    }
    curve.points.push_back({groups, r2});
  }
  return curve;
}

std::vector<std::size_t> leaf_order(const MergeTree& tree) {
  const std::size_t n = tree.leaf_count;
  std::vector<std::size_t> order;
  order.reserve(n);
  if (n == 0) return order;
  std::vector<std::size_t> stack{2 * n - 2};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    if (c < n) {
      order.push_back(c);
      continue;
    }
    const auto& m = tree.merges[c - n];
    stack.push_back(m.second);
    stack.push_back(m.first);
  }
  return order;
}

double curve_area(const R2Curve& curve) {
  if (curve.points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : curve.points) s += p.r2;
  return s / static_cast<double>(curve.points.size());
}

std::vector<SupervisedClusteringResult> compare_supervised_clusterings(
    const TreeEnsemble& ensemble, const Dataset& data, std::span<const AttributionMethod> methods,
    Linkage linkage, unsigned threads) {
  const auto outputs = predict_batch(ensemble, data);
  std::vector<SupervisedClusteringResult> results;
  for (AttributionMethod method : methods) {
    const auto attributions = batch_explain(ensemble, data, method, threads);
    SupervisedClusteringResult r{method, cluster_attributions(to_matrix(attributions), linkage), {}, 0.0};
    r.curve = r2_curve(r.tree, outputs);
    r.area = curve_area(r.curve);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace treexplain

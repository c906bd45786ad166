#include "treexplain/synthetic.hpp"

#include <algorithm>
#include <utility>

namespace treexplain {
namespace {

// Depth-2 AND tree: root on `root_feature`, both children on `child_feature`,
// leaves in order (root no, child no), (root no, child yes), (root yes,
// child no), (root yes, child yes).
Tree AndTree(int root_feature, int child_feature, const double (&leaves)[4]) {
  constexpr double kLeafCover = 25.0;
  Tree t;
  t.features = {root_feature, child_feature, child_feature, kLeaf, kLeaf, kLeaf, kLeaf};
  t.left = {1, 3, 5, kLeaf, kLeaf, kLeaf, kLeaf};
  t.right = {2, 4, 6, kLeaf, kLeaf, kLeaf, kLeaf};
  t.thresholds = {0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
  t.values = {0.0, 0.0, 0.0, leaves[0], leaves[1], leaves[2], leaves[3]};
  t.covers = {4 * kLeafCover, 2 * kLeafCover, 2 * kLeafCover, kLeafCover, kLeafCover, kLeafCover,
              kLeafCover};
  return t;
}

}  // namespace

TreeEnsemble fixture_model_a() {
  // Fever no -> {0, 0}; Fever yes -> Cough no 0, Cough yes 80.
  return TreeEnsemble({AndTree(0, 1, {0.0, 0.0, 0.0, 80.0})}, 0.0, 2, {"Fever", "Cough"});
}

TreeEnsemble fixture_model_b() {
  // Cough no -> {0, 0}; Cough yes -> Fever no 10, Fever yes 90.
  return TreeEnsemble({AndTree(1, 0, {0.0, 0.0, 10.0, 90.0})}, 0.0, 2, {"Fever", "Cough"});
}

Dataset fixture_dataset(int copies) {
  if (copies < 1) throw Error(ErrorKind::kInvalidArgument, "copies must be >= 1");
  const std::vector<double> base{0, 0, 1, 0, 0, 1, 1, 1};
  std::vector<double> values;
  for (int c = 0; c < copies; ++c) values.insert(values.end(), base.begin(), base.end());
  return Dataset(4 * static_cast<std::size_t>(copies), 2, std::move(values), {"Fever", "Cough"});
}

TreeEnsemble planted_perturbation_model() {
  return TreeEnsemble({AndTree(1, 0, {0.0, 0.0, -20.0, -100.0})}, 0.0, 2, {"minor", "major"});
}

Dataset planted_perturbation_dataset(int pairs) {
  if (pairs < 1) throw Error(ErrorKind::kInvalidArgument, "pairs must be >= 1");
  std::vector<double> values;
  for (int p = 0; p < pairs; ++p) values.insert(values.end(), {1.0, 1.0, 0.0, 0.0});
  return Dataset(2 * static_cast<std::size_t>(pairs), 2, std::move(values), {"minor", "major"});
}

namespace {

struct Builder {
  const RandomEnsembleConfig& config;
  Rng& rng;
  Tree tree;
  std::vector<std::pair<double, double>> bounds;  // per-feature open interval reaching the node

  int AddNode() {
    tree.values.push_back(0.0);
    tree.left.push_back(kLeaf);
    tree.right.push_back(kLeaf);
    tree.thresholds.push_back(0.0);
    tree.features.push_back(kLeaf);
    tree.covers.push_back(0.0);
    return static_cast<int>(tree.size()) - 1;
  }

  void Grow(int node, int depth, double cover) {
    const auto j = static_cast<std::size_t>(node);
    tree.covers[j] = cover;
    const bool leaf = depth >= config.max_depth ||
                      (!config.full && depth > 0 && rng.bernoulli(config.leaf_probability));
    if (leaf) {
      tree.values[j] = rng.uniform(-config.value_scale, config.value_scale);
      return;
    }
    const int f = static_cast<int>(rng.index(static_cast<std::uint64_t>(config.num_features)));
    auto& [lo, hi] = bounds[static_cast<std::size_t>(f)];
    const double threshold = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    const double share = rng.uniform(0.05, 0.95);
    const double left_cover = cover * share;
    const double right_cover = cover - left_cover;
    tree.features[j] = f;
    tree.thresholds[j] = threshold;
    const int l = AddNode();
    const int r = AddNode();
    tree.left[j] = l;
    tree.right[j] = r;

    const auto saved = bounds[static_cast<std::size_t>(f)];
    bounds[static_cast<std::size_t>(f)].second = threshold;
    Grow(l, depth + 1, left_cover);
    bounds[static_cast<std::size_t>(f)] = saved;
    bounds[static_cast<std::size_t>(f)].first = threshold;
    Grow(r, depth + 1, right_cover);
    bounds[static_cast<std::size_t>(f)] = saved;
  }
};

}  // namespace

TreeEnsemble random_ensemble(const RandomEnsembleConfig& config, Rng& rng) {
  if (config.num_features < 1 || config.num_trees < 0 || config.max_depth < 0) {
    throw Error(ErrorKind::kInvalidArgument, "random ensemble needs M >= 1, T >= 0, D >= 0");
  }
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(config.num_trees));
  for (int t = 0; t < config.num_trees; ++t) {
    Builder b{config, rng, {},
              std::vector<std::pair<double, double>>(static_cast<std::size_t>(config.num_features),
                                                     {0.0, 1.0})};
    b.Grow(b.AddNode(), 0, rng.uniform(10.0, 1000.0));
    trees.push_back(std::move(b.tree));
  }
  const double base = rng.uniform(-1.0, 1.0);
  return TreeEnsemble(std::move(trees), base, config.num_features, {},
                      std::max(config.max_depth, kDefaultMaxDepth));
}

std::vector<double> random_input(int num_features, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(num_features));
  for (auto& v : x) v = rng.uniform();
  return x;
}

std::vector<double> random_input(const TreeEnsemble& ensemble, Rng& rng, double tie_probability) {
  const int m = ensemble.num_features();
  std::vector<std::vector<double>> thresholds(static_cast<std::size_t>(m));
  for (const auto& tree : ensemble.trees()) {
    for (std::size_t j = 0; j < tree.size(); ++j) {
      if (tree.features[j] != kLeaf) {
        thresholds[static_cast<std::size_t>(tree.features[j])].push_back(tree.thresholds[j]);
      }
    }
  }
  std::vector<double> x = random_input(m, rng);
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (!thresholds[f].empty() && rng.bernoulli(tie_probability)) {
      x[f] = thresholds[f][rng.index(thresholds[f].size())];
    }
  }
  return x;
}

Dataset random_dataset(int num_features, std::size_t rows, Rng& rng) {
  std::vector<double> values(rows * static_cast<std::size_t>(num_features));
  for (auto& v : values) v = rng.uniform();
  return Dataset(rows, static_cast<std::size_t>(num_features), std::move(values));
}

}  // namespace treexplain

#include "cotype/random_forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cotype/util.h"

namespace cotype {
namespace {

struct Builder {
  const std::vector<std::vector<double>>& rows;
  const std::vector<int>& labels;
  int max_depth;
  size_t mtry;
  Rng& rng;

  double gini(double pos, double total) const {
    if (total <= 0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
  }

  template <typename Tree>
  int32_t grow(Tree& tree, std::vector<size_t>& idx, size_t begin, size_t end, int depth) {
    const size_t n = end - begin;
    double pos = 0;
    for (size_t i = begin; i < end; ++i) pos += labels[idx[i]];
    const int32_t id = static_cast<int32_t>(tree.size());
    tree.emplace_back();
    tree[id].value = pos / static_cast<double>(n);
    if (depth >= max_depth || pos == 0 || pos == static_cast<double>(n) || n < 2) return id;

    const size_t num_features = rows[idx[begin]].size();
    std::vector<size_t> features(num_features);
    std::iota(features.begin(), features.end(), 0);
    for (size_t i = 0; i < mtry && i < num_features; ++i) {
      std::swap(features[i], features[i + rng.uniform_index(num_features - i)]);
    }

    double best_score = gini(pos, static_cast<double>(n)) * static_cast<double>(n) - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> values(n);
    for (size_t fi = 0; fi < std::min(mtry, num_features); ++fi) {
      const size_t f = features[fi];
      for (size_t i = 0; i < n; ++i) values[i] = {rows[idx[begin + i]][f], labels[idx[begin + i]]};
      std::sort(values.begin(), values.end());
      double left_pos = 0;
      for (size_t i = 0; i + 1 < n; ++i) {
        left_pos += values[i].second;
        if (values[i].first == values[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n) - nl;
        const double score = gini(left_pos, nl) * nl + gini(pos - left_pos, nr) * nr;
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (values[i].first + values[i + 1].first);
        }
      }
    }
    if (best_feature < 0) return id;

    auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                              idx.begin() + static_cast<std::ptrdiff_t>(end), [&](size_t r) {
                                return rows[r][static_cast<size_t>(best_feature)] <= best_threshold;
                              });
    const size_t split = static_cast<size_t>(mid - idx.begin());
    tree[id].feature = best_feature;
    tree[id].threshold = best_threshold;
    const int32_t left = grow(tree, idx, begin, split, depth + 1);
    const int32_t right = grow(tree, idx, split, end, depth + 1);
    tree[id].left = left;
    tree[id].right = right;
    return id;
  }
};

}  // namespace

RandomForest RandomForest::train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                 const Options& options) {
  if (rows.empty() || rows.size() != labels.size()) throw Error("random forest: empty or mismatched training set");
  const size_t positives = static_cast<size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0 || positives == labels.size()) throw Error("random forest: single class training set");

  RandomForest forest;
  forest.num_features_ = rows.front().size();
  const size_t mtry = std::max<size_t>(1, static_cast<size_t>(std::lround(std::sqrt(forest.num_features_))));
  Rng rng(options.seed);
  Builder builder{rows, labels, options.max_depth, mtry, rng};
  const size_t n = rows.size();
  for (int t = 0; t < options.num_trees; ++t) {
    std::vector<size_t> idx(n);
    for (auto& i : idx) i = rng.uniform_index(n);
    // A bootstrap sample can be single-class; it simply yields a leaf.
    Tree tree;
    builder.grow(tree, idx, 0, n, 0);
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

double RandomForest::predict(std::span<const double> features) const {
  double sum = 0.0;
  for (const auto& tree : trees_) {
    int32_t node = 0;
    while (tree[static_cast<size_t>(node)].feature >= 0) {
      const auto& nd = tree[static_cast<size_t>(node)];
      node = features[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    sum += tree[static_cast<size_t>(node)].value;
  }
  return trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
}

}  // namespace cotype

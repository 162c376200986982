#ifndef COTYPE_RANDOM_FOREST_H_
#define COTYPE_RANDOM_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

namespace cotype {

// Binary classifier: bagged CART trees (Gini splits, random feature subsets
// of size ~sqrt(F) per node). predict() is the mean leaf positive fraction.
class RandomForest {
 public:
  struct Options {
    int num_trees = 100;
    int max_depth = 8;
    uint64_t seed = 1;
  };

  // rows are feature vectors of equal length; labels are 0/1. Throws Error on
  // an empty or single-class training set.
  static RandomForest train(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                            const Options& options);

  double predict(std::span<const double> features) const;
  size_t num_features() const { return num_features_; }
  size_t num_trees() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;  // positive fraction at this node
  };
  using Tree = std::vector<Node>;

  std::vector<Tree> trees_;
  size_t num_features_ = 0;
};

}  // namespace cotype

#endif  // COTYPE_RANDOM_FOREST_H_

#ifndef COTYPE_ALIAS_TABLE_H_
#define COTYPE_ALIAS_TABLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cotype/util.h"

namespace cotype {

// Walker/Vose alias table: O(n) construction, O(1) draws from a discrete
// distribution proportional to non-negative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  size_t sample(Rng& rng) const {
    const size_t bucket = rng.uniform_index(prob_.size());
    return rng.uniform01() < prob_[bucket] ? bucket : alias_[bucket];
  }

  size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  // Normalized target probability of outcome i.
  double probability(size_t i) const { return weights_[i] / total_; }

  // Probability of outcome i implied by the constructed bucket tables; equals
  // probability(i) up to rounding. Used to verify construction.
  double implied_probability(size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

}  // namespace cotype

#endif  // COTYPE_ALIAS_TABLE_H_

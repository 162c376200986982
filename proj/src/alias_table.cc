#include "cotype/alias_table.h"

#include <cmath>
#include <string>

namespace cotype {

AliasTable::AliasTable(std::span<const double> weights) : weights_(weights.begin(), weights.end()) {
  const size_t n = weights_.size();
  if (n == 0) throw Error("alias table needs at least one outcome");
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("alias table weight must be finite and non-negative");
    total_ += w;
  }
  if (total_ <= 0.0) throw Error("alias table weights sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<uint32_t> small, large;
  for (size_t i = 0; i < n; ++i) {
    scaled[i] = weights_[i] * static_cast<double>(n) / total_;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const uint32_t s = small.back();
    small.pop_back();
    const uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (uint32_t l : large) {
    prob_[l] = 1.0;
    alias_[l] = l;
  }
  for (uint32_t s : small) {
    prob_[s] = 1.0;
    alias_[s] = s;
  }
}

double AliasTable::implied_probability(size_t i) const {
  const double n = static_cast<double>(prob_.size());
  double p = prob_[i];
  for (size_t b = 0; b < prob_.size(); ++b) {
    if (alias_[b] == i && b != i) p += 1.0 - prob_[b];
  }
  return p / n;
}

}  // namespace cotype

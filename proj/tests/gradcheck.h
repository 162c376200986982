#ifndef COTYPE_TESTS_GRADCHECK_H_
#define COTYPE_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace cotype::testing {

inline constexpr double kGradStepAlpha = 1e-7;
inline constexpr double kFiniteDiffStep = 1e-6;

struct Block {
  double* data;
  size_t size;
};

// Reads the analytic gradient off one descent step, (before - after) / alpha,
// and compares it with central differences of the loss over every parameter.
// Returns ||analytic - numeric|| / max(||analytic||, ||numeric||).
inline double gradient_error(const std::vector<Block>& params, const std::function<double()>& loss,
                             const std::function<void(double)>& step) {
  std::vector<std::vector<double>> saved;
  for (const auto& b : params) saved.emplace_back(b.data, b.data + b.size);
  step(kGradStepAlpha);
  std::vector<double> analytic, numeric;
  for (size_t i = 0; i < params.size(); ++i) {
    for (size_t k = 0; k < params[i].size; ++k) analytic.push_back((saved[i][k] - params[i].data[k]) / kGradStepAlpha);
    std::copy(saved[i].begin(), saved[i].end(), params[i].data);
  }
  for (const auto& b : params) {
    for (size_t k = 0; k < b.size; ++k) {
      const double x = b.data[k];
      b.data[k] = x + kFiniteDiffStep;
      const double up = loss();
      b.data[k] = x - kFiniteDiffStep;
      const double down = loss();
      b.data[k] = x;
      numeric.push_back((up - down) / (2.0 * kFiniteDiffStep));
    }
  }
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
}

}  // namespace cotype::testing

#endif  // COTYPE_TESTS_GRADCHECK_H_

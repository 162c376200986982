#ifndef COTYPE_UTIL_H_
#define COTYPE_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cotype {

// Raised for malformed or inconsistent inputs (maps to CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm cannot proceed on otherwise valid input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded generator with platform-independent derived draws. The standard
// distributions are implementation-defined, so they are not used anywhere a
// result must be reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}; n must be positive.
  size_t uniform_index(size_t n) {
    const uint64_t bound = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<size_t>(x % bound);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a salt.
uint64_t mix_seed(uint64_t seed, uint64_t salt);

// 64-bit FNV-1a; stable across platforms, used for config and input hashes.
uint64_t fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(uint64_t value);
uint64_t hash_file(const std::string& path);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);
bool starts_with_upper(std::string_view s);

// Reads a whole file; throws InputError naming the path when it cannot.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Runs fn(i) for i in [0, n) over `threads` workers with static chunking.
// threads <= 1 runs inline in index order.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace cotype

#endif  // COTYPE_UTIL_H_

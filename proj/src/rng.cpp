#include "sbmlab/rng.hpp"

#include <cmath>

namespace sbmlab {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer: a bijective 64-bit mix with full avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(Seed seed, std::uint64_t substream) {
  std::uint64_t k = mix64(seed.value + kGolden);
  k = mix64(k ^ mix64(seed.stream + 2 * kGolden));
  key_ = mix64(k ^ mix64(substream + 3 * kGolden));
}

std::uint64_t Rng::next_u64() {
  counter_ += kGolden;
  return mix64(key_ + counter_);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * m;
  has_cached_normal_ = true;
  return u * m;
}

}  // namespace sbmlab

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symw/tensor.hpp"

namespace symw::test {

// Raw mt19937_64 output is identical on every platform; distributions are
// not, so values are derived from the raw stream directly.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline float uniform_pm1(std::mt19937_64& rng) {
  return static_cast<float>(2.0 * uniform01(rng) - 1.0);
}

inline float gaussian(std::mt19937_64& rng, double sigma = 1.0) {
  // Box-Muller; platform-stable unlike std::normal_distribution.
  double u1 = uniform01(rng);
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return static_cast<float>(sigma * std::sqrt(-2.0 * std::log(u1)) *
                            std::cos(2.0 * 3.141592653589793 * u2));
}

inline WeightTensor random_tensor(std::uint32_t c_out, std::uint32_t c_in, std::uint16_t k,
                                  std::uint64_t seed) {
  WeightTensor w = WeightTensor::zeros(c_out, c_in, k);
  std::mt19937_64 rng(seed);
  for (float& v : w.data) v = uniform_pm1(rng);
  return w;
}

inline ModelBundle random_bundle(
    const std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint16_t>>& shapes,
    std::uint64_t seed) {
  ModelBundle bundle;
  std::uint16_t id = 0;
  for (const auto& [c_out, c_in, k] : shapes) {
    bundle.layers.push_back({id, random_tensor(c_out, c_in, k, seed + id)});
    ++id;
  }
  return bundle;
}

/// Distance in representable binary32 steps (0 means bit-identical up to
/// signed zero).
inline std::int64_t ulp_distance(float a, float b) {
  const auto key = [](float x) -> std::int64_t {
    const auto u = std::bit_cast<std::uint32_t>(x);
    return (u & 0x80000000u) ? -static_cast<std::int64_t>(u & 0x7FFFFFFFu)
                             : static_cast<std::int64_t>(u);
  };
  const std::int64_t d = key(a) - key(b);
  return d < 0 ? -d : d;
}

inline std::int64_t max_ulp_distance(const std::vector<float>& a, const std::vector<float>& b) {
  std::int64_t worst = a.size() == b.size() ? 0 : std::int64_t{1} << 40;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    worst = std::max(worst, ulp_distance(a[i], b[i]));
  }
  return worst;
}

/// Largest |a_i - b_i| measured in units of the float spacing at `scale`.
/// Cancellation-prone comparisons (linear combinations) are judged at the
/// magnitude of the operands rather than of the near-zero result.
inline double max_ulp_gap_at_scale(const std::vector<float>& a, const std::vector<float>& b,
                                   float scale) {
  const float mag = std::fabs(scale);
  const double u = static_cast<double>(
      std::nextafter(mag, std::numeric_limits<float>::infinity()) - mag);
  if (a.size() != b.size() || u <= 0.0) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a[i]) - b[i]) / u);
  }
  return worst;
}

}  // namespace symw::test

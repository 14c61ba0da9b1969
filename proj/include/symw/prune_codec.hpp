#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symw/quant.hpp"
#include "symw/symmetry.hpp"

namespace symw {

/// Sparse COO payload of the magnitude-pruning baseline: the k largest
/// magnitude coefficients of a vectorized layer as (index, code) pairs.
struct CooPayload {
  struct Entry {
    std::uint32_t index = 0;
    std::int32_t code = 0;
    bool operator==(const Entry&) const = default;
  };

  std::uint8_t bits = 8;
  std::uint32_t total_len = 0;  // N, the vectorized length
  float scale = 1.0f;
  std::vector<Entry> entries;  // strictly increasing indices

  std::uint32_t k_budget() const { return static_cast<std::uint32_t>(entries.size()); }

  /// Accounting size: k * (32 + b) bits, the 32-bit index overhead made
  /// explicit.
  std::uint64_t payload_bits() const { return entries.size() * (32ull + bits); }
};

/// Serialized metadata prefix: bits u8, total_len u32, k_budget u32,
/// scale f32.
inline constexpr std::size_t kCooMetadataBytes = 13;

/// Keep the k_budget largest-magnitude entries (ties broken by lower index),
/// quantize the kept values with a symmetric b-bit scale computed over the
/// kept values only. Throws InvariantError when k_budget > w.size().
CooPayload prune_topk(std::span<const float> w, std::size_t k_budget, int bits);

struct CooReconstruction {
  std::vector<float> values;         // dense, zeros at pruned positions
  std::size_t dropped_entries = 0;   // out-of-range indices (post-corruption)
};

CooReconstruction reconstruct_coo(const CooPayload& payload);

/// The DoF count the pruned baseline must match: U_sym = c_out * c_in * M(S).
std::uint64_t pruned_equivalent_budget(SymmetryKind kind, std::uint32_t c_out, std::uint32_t c_in,
                                       int k);

/// COO stream, little-endian: bits u8, total_len u32, k_budget u32,
/// scale f32, then k_budget x (index u32, code packed as in quant).
std::vector<std::uint8_t> serialize_coo(const CooPayload& payload);
CooPayload parse_coo(std::span<const std::uint8_t> bytes);

}  // namespace symw

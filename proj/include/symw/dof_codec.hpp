#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symw/quant.hpp"
#include "symw/symmetry.hpp"
#include "symw/tensor.hpp"

namespace symw {

/// Quantized degrees-of-freedom payload for one layer: one representative per
/// orbit per (c_out, c_in) slice, ordered (c_out, c_in, orbit_id), quantized
/// jointly with a single per-layer scale.
struct DofPayload {
  SymmetryKind symmetry = SymmetryKind::None;
  std::uint8_t bits = 8;
  std::uint32_t c_out = 0;
  std::uint32_t c_in = 0;
  std::uint16_t k = 1;
  float scale = 1.0f;
  std::vector<std::int32_t> codes;

  /// Code bits only (b * c_out * c_in * M); metadata excluded.
  std::uint64_t payload_bits() const { return static_cast<std::uint64_t>(bits) * codes.size(); }
};

/// Serialized metadata prefix: symmetry u8, bits u8, c_out u32, c_in u32,
/// k u16, scale f32.
inline constexpr std::size_t kDofMetadataBytes = 16;

/// Unquantized orbit representatives of every slice, length
/// c_out * c_in * M, ordered (c_out, c_in, orbit_id). Parallel across slices;
/// the serial variant is the bit-identical reference.
std::vector<float> extract_dof(const WeightTensor& w, const OrbitMap& map);
std::vector<float> extract_dof_serial(const WeightTensor& w, const OrbitMap& map);

DofPayload encode_dof(const WeightTensor& w, SymmetryKind kind, int bits);

/// Degenerate codec transmitting all K^2 coefficients (kind = none).
DofPayload encode_full(const WeightTensor& w, int bits);

/// Populate a tensor from real-valued orbit representatives (the map called
/// Phi for central-skew): cell = sign * rep, zero at the skew center.
WeightTensor synth_values(std::span<const float> values, const OrbitMap& map, std::uint32_t c_out,
                          std::uint32_t c_in);

/// Dequantize and expand the payload into a full tensor.
/// Throws FormatError when the code count does not match the shape.
WeightTensor synth(const DofPayload& payload);

/// synth, optionally followed by receive-side projection. On an uncorrupted
/// payload the projection is a no-op up to floating-point rounding.
WeightTensor decode_dof(const DofPayload& payload, bool apply_projection);

/// Layer payload stream, little-endian: symmetry_id u8, bits u8, c_out u32,
/// c_in u32, k u16, scale f32, then packed codes. This byte stream is what
/// the channel packetizes.
std::vector<std::uint8_t> serialize_payload(const DofPayload& payload);
DofPayload parse_payload(std::span<const std::uint8_t> bytes);

}  // namespace symw

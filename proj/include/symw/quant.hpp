#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symw/error.hpp"

namespace symw {

/// Symmetric per-tensor signed b-bit quantization of a real vector.
///
/// The most-negative code -2^(b-1) is never emitted, so every code has a
/// representable negation. Codes of corrupted payloads may fall outside the
/// symmetric range after unpacking; they still dequantize to finite values.
struct QuantizedVector {
  std::uint8_t bits = 8;  // 2..16
  float scale = 1.0f;     // positive, finite
  std::vector<std::int32_t> values;
};

/// Maximum code magnitude for a bit-width: 2^(b-1) - 1.
constexpr std::int32_t code_max(int bits) { return (1 << (bits - 1)) - 1; }

/// scale = max|x| / (2^(b-1)-1), or 1 when the input is all zero;
/// codes = clamp(round_half_to_even(x / scale)). Guarantees
/// |dequantize(quantize(x)) - x|_inf <= scale / 2.
/// Throws InvariantError on non-finite input or bits outside 2..16.
QuantizedVector quantize(std::span<const float> x, int bits);

/// x_i = value_i * scale.
std::vector<float> dequantize(const QuantizedVector& q);

/// Byte serialization of the code array:
///   b = 8  -> one signed byte per code,
///   b = 16 -> two bytes little-endian two's complement,
///   else   -> codes bit-packed MSB-first, zero-padded to a byte boundary.
std::vector<std::uint8_t> pack_codes(const QuantizedVector& q);

/// Exact inverse of pack_codes for `count` codes of width `bits`.
/// Throws FormatError when the stream is too short.
std::vector<std::int32_t> unpack_codes(std::span<const std::uint8_t> bytes, int bits,
                                       std::size_t count);

/// Serialized size of `count` codes, in bytes.
std::size_t packed_size(int bits, std::size_t count);

}  // namespace symw

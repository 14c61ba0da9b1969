#include "symw/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace symw {

namespace {

void require_bits(int bits) {
  if (bits < 2 || bits > 16) {
    throw InvariantError("bit-width must be in [2, 16], got " + std::to_string(bits));
  }
}

// Independent of the ambient FP rounding mode, unlike std::nearbyint.
double round_half_to_even(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  if (frac > 0.5) return f + 1.0;
  if (frac < 0.5) return f;
  return (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
}

}  // namespace

QuantizedVector quantize(std::span<const float> x, int bits) {
  require_bits(bits);
  double max_abs = 0.0;
  for (float v : x) {
    if (!std::isfinite(v)) throw InvariantError("quantize: non-finite input");
    max_abs = std::max(max_abs, std::fabs(static_cast<double>(v)));
  }
  const std::int32_t qmax = code_max(bits);
  QuantizedVector q;
  q.bits = static_cast<std::uint8_t>(bits);
  q.scale = (max_abs == 0.0) ? 1.0f : static_cast<float>(max_abs / qmax);
  q.values.resize(x.size());
  const double scale = static_cast<double>(q.scale);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = round_half_to_even(static_cast<double>(x[i]) / scale);
    q.values[i] = static_cast<std::int32_t>(std::clamp<double>(c, -qmax, qmax));
  }
  return q;
}

std::vector<float> dequantize(const QuantizedVector& q) {
  std::vector<float> out(q.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(q.values[i]) * static_cast<double>(q.scale));
  }
  return out;
}

std::size_t packed_size(int bits, std::size_t count) {
  require_bits(bits);
  if (bits == 8) return count;
  if (bits == 16) return 2 * count;
  return (count * static_cast<std::size_t>(bits) + 7) / 8;
}

std::vector<std::uint8_t> pack_codes(const QuantizedVector& q) {
  const int bits = q.bits;
  require_bits(bits);
  std::vector<std::uint8_t> out;
  out.reserve(packed_size(bits, q.values.size()));
  if (bits == 8) {
    for (std::int32_t v : q.values) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    return out;
  }
  if (bits == 16) {
    for (std::int32_t v : q.values) {
      out.push_back(static_cast<std::uint8_t>(v & 0xFF));
      out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    }
    return out;
  }
  std::uint32_t bitbuf = 0;
  int nbits = 0;
  const std::uint32_t mask = (1u << bits) - 1;
  for (std::int32_t v : q.values) {
    bitbuf = (bitbuf << bits) | (static_cast<std::uint32_t>(v) & mask);
    nbits += bits;
    while (nbits >= 8) {
      out.push_back(static_cast<std::uint8_t>((bitbuf >> (nbits - 8)) & 0xFF));
      nbits -= 8;
    }
  }
  if (nbits > 0) out.push_back(static_cast<std::uint8_t>((bitbuf << (8 - nbits)) & 0xFF));
  return out;
}

std::vector<std::int32_t> unpack_codes(std::span<const std::uint8_t> bytes, int bits,
                                       std::size_t count) {
  require_bits(bits);
  const std::size_t need = packed_size(bits, count);
  if (bytes.size() < need) {
    throw FormatError("code stream truncated: need " + std::to_string(need) + " bytes, have " +
                      std::to_string(bytes.size()));
  }
  std::vector<std::int32_t> out(count);
  if (bits == 8) {
    for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<std::int8_t>(bytes[i]);
    return out;
  }
  if (bits == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto u = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
      out[i] = static_cast<std::int16_t>(u);
    }
    return out;
  }
  std::uint32_t bitbuf = 0;
  int nbits = 0;
  std::size_t pos = 0;
  const std::uint32_t sign_bit = 1u << (bits - 1);
  for (std::size_t i = 0; i < count; ++i) {
    while (nbits < bits) {
      bitbuf = (bitbuf << 8) | bytes[pos++];
      nbits += 8;
    }
    std::uint32_t field = (bitbuf >> (nbits - bits)) & ((1u << bits) - 1);
    nbits -= bits;
    out[i] = (field & sign_bit) ? static_cast<std::int32_t>(field) - (1 << bits)
                                : static_cast<std::int32_t>(field);
  }
  return out;
}

}  // namespace symw

#include "symw/prune_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "symw/bytes.hpp"

namespace symw {

CooPayload prune_topk(std::span<const float> w, std::size_t k_budget, int bits) {
  if (k_budget > w.size()) {
    throw InvariantError("prune budget " + std::to_string(k_budget) + " exceeds vector length " +
                         std::to_string(w.size()));
  }
  std::vector<std::uint32_t> order(w.size());
  std::iota(order.begin(), order.end(), 0u);
  const auto by_magnitude = [&](std::uint32_t a, std::uint32_t b) {
    const float ma = std::fabs(w[a]);
    const float mb = std::fabs(w[b]);
    if (ma != mb) return ma > mb;
    return a < b;  // deterministic tie-break
  };
  if (k_budget < w.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_budget),
                     order.end(), by_magnitude);
    order.resize(k_budget);
  }
  std::sort(order.begin(), order.end());

  std::vector<float> kept(k_budget);
  for (std::size_t i = 0; i < k_budget; ++i) kept[i] = w[order[i]];
  QuantizedVector q = quantize(kept, bits);

  CooPayload payload;
  payload.bits = static_cast<std::uint8_t>(bits);
  payload.total_len = static_cast<std::uint32_t>(w.size());
  payload.scale = q.scale;
  payload.entries.resize(k_budget);
  for (std::size_t i = 0; i < k_budget; ++i) payload.entries[i] = {order[i], q.values[i]};
  return payload;
}

CooReconstruction reconstruct_coo(const CooPayload& payload) {
  CooReconstruction out;
  out.values.assign(payload.total_len, 0.0f);
  const double scale = static_cast<double>(payload.scale);
  for (const auto& entry : payload.entries) {
    if (entry.index >= payload.total_len) {
      ++out.dropped_entries;
      continue;
    }
    out.values[entry.index] = static_cast<float>(entry.code * scale);
  }
  return out;
}

std::uint64_t pruned_equivalent_budget(SymmetryKind kind, std::uint32_t c_out, std::uint32_t c_in,
                                       int k) {
  return static_cast<std::uint64_t>(c_out) * c_in * dof_count(kind, k);
}

std::vector<std::uint8_t> serialize_coo(const CooPayload& payload) {
  ByteWriter w;
  w.u8(payload.bits);
  w.u32le(payload.total_len);
  w.u32le(payload.k_budget());
  w.f32le(payload.scale);
  QuantizedVector one;
  one.bits = payload.bits;
  one.scale = payload.scale;
  one.values.resize(1);
  for (const auto& entry : payload.entries) {
    w.u32le(entry.index);
    one.values[0] = entry.code;
    w.raw(pack_codes(one));
  }
  return w.take();
}

CooPayload parse_coo(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  CooPayload payload;
  const std::uint8_t bits = r.u8();
  if (bits < 2 || bits > 16) {
    throw FormatError("COO bit-width out of range: " + std::to_string(bits));
  }
  payload.bits = bits;
  payload.total_len = r.u32le();
  const std::uint32_t k_budget = r.u32le();
  if (k_budget > payload.total_len) {
    throw FormatError("COO budget " + std::to_string(k_budget) + " exceeds length " +
                      std::to_string(payload.total_len));
  }
  payload.scale = r.f32le();
  if (!std::isfinite(payload.scale) || payload.scale <= 0.0f) {
    throw FormatError("COO scale must be positive and finite");
  }
  const std::size_t code_bytes = packed_size(bits, 1);
  if (r.remaining() != static_cast<std::size_t>(k_budget) * (4 + code_bytes)) {
    throw FormatError("COO entry section has unexpected size");
  }
  payload.entries.resize(k_budget);
  for (std::uint32_t i = 0; i < k_budget; ++i) {
    payload.entries[i].index = r.u32le();
    payload.entries[i].code = unpack_codes(r.raw(code_bytes), bits, 1)[0];
  }
  return payload;
}

}  // namespace symw

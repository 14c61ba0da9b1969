#include "symw/dof_codec.hpp"

#include <cmath>
#include <string>

#include "symw/bytes.hpp"

namespace symw {

namespace {

std::vector<float> extract_impl(const WeightTensor& w, const OrbitMap& map, bool parallel) {
  if (w.k != map.k) {
    throw ShapeError("extract_dof: tensor k=" + std::to_string(w.k) + " vs orbit map k=" +
                     std::to_string(map.k));
  }
  const auto slices = static_cast<std::int64_t>(w.slice_count());
  const std::size_t vol = w.slice_volume();
  std::vector<float> reps(static_cast<std::size_t>(slices) * map.m);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t s = 0; s < slices; ++s) {
    orbit_reduce_slice(std::span<const float>(w.data.data() + s * vol, vol), map,
                       std::span<float>(reps.data() + s * map.m, map.m));
  }
  return reps;
}

}  // namespace

std::vector<float> extract_dof(const WeightTensor& w, const OrbitMap& map) {
  return extract_impl(w, map, true);
}

std::vector<float> extract_dof_serial(const WeightTensor& w, const OrbitMap& map) {
  return extract_impl(w, map, false);
}

DofPayload encode_dof(const WeightTensor& w, SymmetryKind kind, int bits) {
  w.validate();
  const OrbitMap map = orbit_map(kind, w.k);
  const std::vector<float> reps = extract_dof(w, map);
  QuantizedVector q = quantize(reps, bits);
  DofPayload payload;
  payload.symmetry = kind;
  payload.bits = static_cast<std::uint8_t>(bits);
  payload.c_out = w.c_out;
  payload.c_in = w.c_in;
  payload.k = w.k;
  payload.scale = q.scale;
  payload.codes = std::move(q.values);
  return payload;
}

DofPayload encode_full(const WeightTensor& w, int bits) {
  return encode_dof(w, SymmetryKind::None, bits);
}

WeightTensor synth_values(std::span<const float> values, const OrbitMap& map, std::uint32_t c_out,
                          std::uint32_t c_in) {
  WeightTensor out = WeightTensor::zeros(c_out, c_in, map.k);
  const auto slices = static_cast<std::int64_t>(out.slice_count());
  if (values.size() != static_cast<std::size_t>(slices) * map.m) {
    throw FormatError("synth: value count " + std::to_string(values.size()) + " does not match " +
                      std::to_string(slices) + " slices x M=" + std::to_string(map.m));
  }
  const std::size_t vol = out.slice_volume();
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < slices; ++s) {
    orbit_expand_slice(std::span<const float>(values.data() + s * map.m, map.m), map,
                       std::span<float>(out.data.data() + s * vol, vol));
  }
  return out;
}

WeightTensor synth(const DofPayload& payload) {
  const OrbitMap map = orbit_map(payload.symmetry, payload.k);
  QuantizedVector q;
  q.bits = payload.bits;
  q.scale = payload.scale;
  q.values = payload.codes;
  const std::vector<float> values = dequantize(q);
  return synth_values(values, map, payload.c_out, payload.c_in);
}

WeightTensor decode_dof(const DofPayload& payload, bool apply_projection) {
  WeightTensor out = synth(payload);
  if (apply_projection) {
    return project(out, orbit_map(payload.symmetry, payload.k));
  }
  return out;
}

std::vector<std::uint8_t> serialize_payload(const DofPayload& payload) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(payload.symmetry));
  w.u8(payload.bits);
  w.u32le(payload.c_out);
  w.u32le(payload.c_in);
  w.u16le(payload.k);
  w.f32le(payload.scale);
  QuantizedVector q;
  q.bits = payload.bits;
  q.scale = payload.scale;
  q.values = payload.codes;
  const auto packed = pack_codes(q);
  w.raw(packed);
  return w.take();
}

DofPayload parse_payload(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  DofPayload payload;
  payload.symmetry = symmetry_from_id(r.u8());
  const std::uint8_t bits = r.u8();
  if (bits < 2 || bits > 16) {
    throw FormatError("payload bit-width out of range: " + std::to_string(bits));
  }
  payload.bits = bits;
  payload.c_out = r.u32le();
  payload.c_in = r.u32le();
  payload.k = r.u16le();
  if (payload.k == 0 || payload.k % 2 == 0 || payload.k > 4095) {
    throw FormatError("payload k must be odd and plausible, got " + std::to_string(payload.k));
  }
  const std::uint64_t slices = static_cast<std::uint64_t>(payload.c_out) * payload.c_in;
  if (slices > (1ull << 32)) {
    throw FormatError("payload slice count implausibly large");
  }
  payload.scale = r.f32le();
  if (!std::isfinite(payload.scale) || payload.scale <= 0.0f) {
    throw FormatError("payload scale must be positive and finite");
  }
  const std::uint64_t count = slices * dof_count(payload.symmetry, payload.k);
  if (r.remaining() != packed_size(bits, count)) {
    throw FormatError("payload code section has " + std::to_string(r.remaining()) +
                      " bytes, expected " + std::to_string(packed_size(bits, count)));
  }
  payload.codes = unpack_codes(r.raw(r.remaining()), bits, count);
  return payload;
}

}  // namespace symw

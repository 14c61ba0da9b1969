#include "symw/tensor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "symw/bytes.hpp"

namespace symw {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'Y', 'M', 'W'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

WeightTensor WeightTensor::zeros(std::uint32_t c_out, std::uint32_t c_in, std::uint16_t k) {
  WeightTensor w;
  w.c_out = c_out;
  w.c_in = c_in;
  w.k = k;
  w.data.assign(w.volume(), 0.0f);
  return w;
}

void WeightTensor::validate() const {
  if (k == 0 || k % 2 == 0) {
    throw InvariantError("kernel side length must be odd and >= 1, got " + std::to_string(k));
  }
  if (data.size() != volume()) {
    throw InvariantError("data length " + std::to_string(data.size()) + " does not match shape (" +
                         std::to_string(c_out) + "," + std::to_string(c_in) + "," + std::to_string(k) +
                         "," + std::to_string(k) + ")");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw InvariantError("tensor contains a non-finite entry");
  }
}

void ModelBundle::validate() const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights.validate();
    if (i > 0 && layers[i].layer_id <= layers[i - 1].layer_id) {
      throw InvariantError("layer ids must be strictly increasing");
    }
  }
}

double frobenius_distance(const WeightTensor& a, const WeightTensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("frobenius_distance: shape mismatch (" + std::to_string(a.c_out) + "," +
                     std::to_string(a.c_in) + "," + std::to_string(a.k) + ") vs (" +
                     std::to_string(b.c_out) + "," + std::to_string(b.c_in) + "," +
                     std::to_string(b.k) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<std::uint8_t> serialize_bundle(const ModelBundle& bundle) {
  bundle.validate();
  ByteWriter w;
  w.raw(kMagic);
  w.u16le(kVersion);
  w.u32le(static_cast<std::uint32_t>(bundle.layers.size()));
  for (const auto& layer : bundle.layers) {
    w.u16le(layer.layer_id);
    w.u32le(layer.weights.c_out);
    w.u32le(layer.weights.c_in);
    w.u16le(layer.weights.k);
    for (float v : layer.weights.data) w.f32le(v);
  }
  return w.take();
}

ModelBundle parse_bundle(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw FormatError("not a SYMW container (bad magic)");
  }
  const std::uint16_t version = r.u16le();
  if (version != kVersion) {
    throw FormatError("unsupported SYMW version " + std::to_string(version));
  }
  const std::uint32_t layer_count = r.u32le();
  ModelBundle bundle;
  bundle.layers.reserve(layer_count);
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    ModelBundle::Layer layer;
    layer.layer_id = r.u16le();
    layer.weights.c_out = r.u32le();
    layer.weights.c_in = r.u32le();
    layer.weights.k = r.u16le();
    const std::size_t n = layer.weights.volume();
    layer.weights.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) layer.weights.data[i] = r.f32le();
    bundle.layers.push_back(std::move(layer));
  }
  if (!r.done()) throw FormatError("trailing bytes after last layer");
  bundle.validate();
  return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("read failed: " + path.string());
  return parse_bundle(bytes);
}

}  // namespace symw

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "symw/error.hpp"

namespace symw {

/// A 4-D convolution weight array (c_out, c_in, k, k) of binary32 reals,
/// stored row-major. K must be odd; the central-pair constructions assume a
/// center cell.
struct WeightTensor {
  std::uint32_t c_out = 0;
  std::uint32_t c_in = 0;
  std::uint16_t k = 1;
  std::vector<float> data;

  static WeightTensor zeros(std::uint32_t c_out, std::uint32_t c_in, std::uint16_t k);

  std::size_t slice_count() const { return static_cast<std::size_t>(c_out) * c_in; }
  std::size_t slice_volume() const { return static_cast<std::size_t>(k) * k; }
  std::size_t volume() const { return slice_count() * slice_volume(); }

  float* slice(std::size_t s) { return data.data() + s * slice_volume(); }
  const float* slice(std::size_t s) const { return data.data() + s * slice_volume(); }

  bool same_shape(const WeightTensor& other) const {
    return c_out == other.c_out && c_in == other.c_in && k == other.k;
  }

  /// Throws InvariantError if k is even/zero, the data length is wrong, or
  /// any entry is non-finite.
  void validate() const;

  bool operator==(const WeightTensor&) const = default;
};

/// Ordered list of (layer_id, tensor); ids must be unique and strictly
/// increasing. This is the serialization unit the channel transmits.
struct ModelBundle {
  struct Layer {
    std::uint16_t layer_id = 0;
    WeightTensor weights;
    bool operator==(const Layer&) const = default;
  };

  std::vector<Layer> layers;

  void validate() const;

  bool operator==(const ModelBundle&) const = default;
};

/// sqrt(sum((a - b)^2)) over all entries; zero iff a == b.
/// Throws ShapeError when shapes differ.
double frobenius_distance(const WeightTensor& a, const WeightTensor& b);

/// SYMW container, all little-endian:
///   magic "SYMW", version u16 = 1, layer_count u32,
///   per layer: layer_id u16, c_out u32, c_in u32, k u16,
///              c_out*c_in*k*k float32 values row-major (c_out, c_in, i, j).
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::span<const std::uint8_t> bytes);

}  // namespace symw

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "symw/tensor.hpp"

namespace symw {

/// The ten supported symmetry families. Enumeration order fixes the one-byte
/// wire id used in payload metadata.
enum class SymmetryKind : std::uint8_t {
  None = 0,
  CentralEven,
  CentralSkew,
  Horizontal,
  Vertical,
  MainDiagonal,
  AntiDiagonal,
  Rot90,
  Radial,
  Toeplitz,
};

inline constexpr std::array<SymmetryKind, 10> kAllSymmetries = {
    SymmetryKind::None,         SymmetryKind::CentralEven,  SymmetryKind::CentralSkew,
    SymmetryKind::Horizontal,   SymmetryKind::Vertical,     SymmetryKind::MainDiagonal,
    SymmetryKind::AntiDiagonal, SymmetryKind::Rot90,        SymmetryKind::Radial,
    SymmetryKind::Toeplitz,
};

std::string_view to_string(SymmetryKind kind);
SymmetryKind symmetry_from_string(std::string_view name);  // FormatError on unknown name
SymmetryKind symmetry_from_id(std::uint8_t id);            // FormatError on id > 9

/// Partition of the K x K index grid into orbits for one symmetry kind.
///
/// Orbit ids are assigned in row-major order of first occurrence, which fixes
/// the serialization order of the DoF representatives. `sign` is +1
/// everywhere for the even kinds; under CentralSkew each 180-degree pair
/// carries (+1, -1) with +1 on the first-occurrence member, and the center
/// cell carries sign 0 with orbit id -1 (it is pinned to zero and excluded
/// from the orbit count).
struct OrbitMap {
  std::uint16_t k = 1;
  SymmetryKind kind = SymmetryKind::None;
  std::vector<std::int32_t> orbit_id;     // K*K, -1 only at the CentralSkew center
  std::vector<std::int8_t> sign;          // +1 / -1 / 0
  std::uint32_t m = 0;                    // orbit count M(S)
  std::vector<std::uint32_t> orbit_sizes; // n_m, length m

  void validate() const;
};

/// Build the orbit partition for (kind, k). k must be odd and >= 1.
OrbitMap orbit_map(SymmetryKind kind, int k);

/// Number of degrees of freedom M(S) for one k x k slice.
std::uint32_t dof_count(SymmetryKind kind, int k);

/// Collapse one k*k slice to its m orbit representatives: the signed orbit
/// mean. For even kinds this is the plain orbit average; for CentralSkew it
/// is (w_p - w_q) / 2 over each pair.
void orbit_reduce_slice(std::span<const float> slice, const OrbitMap& map, std::span<float> reps);

/// Populate one k*k slice from orbit representatives: cell = sign * rep, and
/// 0 at the CentralSkew center.
void orbit_expand_slice(std::span<const float> reps, const OrbitMap& map, std::span<float> slice);

/// Orthogonal projection onto the symmetry-invariant subspace, applied
/// independently per (c_out, c_in) slice. Parallelized across slices; the
/// serial variant computes bit-identical output and is kept as the reference
/// for tests and benchmarks.
WeightTensor project(const WeightTensor& w, const OrbitMap& map);
WeightTensor project_serial(const WeightTensor& w, const OrbitMap& map);

}  // namespace symw

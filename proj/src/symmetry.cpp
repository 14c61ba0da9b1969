#include "symw/symmetry.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>

namespace symw {

namespace {

struct Cell {
  int i;
  int j;
};

using Transform = Cell (*)(Cell, int);

Cell identity(Cell c, int) { return c; }
Cell rot180(Cell c, int k) { return {k - 1 - c.i, k - 1 - c.j}; }
Cell flip_rows(Cell c, int k) { return {k - 1 - c.i, c.j}; }
Cell flip_cols(Cell c, int k) { return {c.i, k - 1 - c.j}; }
Cell transpose(Cell c, int) { return {c.j, c.i}; }
Cell anti_transpose(Cell c, int k) { return {k - 1 - c.j, k - 1 - c.i}; }
Cell rot90(Cell c, int k) { return {c.j, k - 1 - c.i}; }
Cell rot270(Cell c, int k) { return {k - 1 - c.j, c.i}; }

std::vector<Transform> group_elements(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::None:
      return {identity};
    case SymmetryKind::CentralEven:
      return {identity, rot180};
    case SymmetryKind::Horizontal:
      return {identity, flip_rows};
    case SymmetryKind::Vertical:
      return {identity, flip_cols};
    case SymmetryKind::MainDiagonal:
      return {identity, transpose};
    case SymmetryKind::AntiDiagonal:
      return {identity, anti_transpose};
    case SymmetryKind::Rot90:
      return {identity, rot90, rot180, rot270};
    default:
      return {};
  }
}

void require_odd(int k) {
  if (k < 1 || k % 2 == 0) {
    throw InvariantError("kernel side length must be odd and >= 1, got " + std::to_string(k));
  }
}

// Orbits induced by a finite group acting on cells.
void build_group_orbits(OrbitMap& map, int k, const std::vector<Transform>& transforms) {
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * k + j;
      if (map.orbit_id[idx] >= 0) continue;
      const auto id = static_cast<std::int32_t>(map.m++);
      std::uint32_t size = 0;
      for (Transform t : transforms) {
        const Cell c = t({i, j}, k);
        const std::size_t cidx = static_cast<std::size_t>(c.i) * k + c.j;
        if (map.orbit_id[cidx] < 0) {
          map.orbit_id[cidx] = id;
          ++size;
        }
      }
      map.orbit_sizes.push_back(size);
    }
  }
}

// Orbits given by a per-cell class key (radial bins, Toeplitz diagonals).
template <typename KeyFn>
void build_partition_orbits(OrbitMap& map, int k, KeyFn key_of) {
  std::map<long, std::int32_t> ids;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const long key = key_of(i, j);
      auto [it, inserted] = ids.try_emplace(key, static_cast<std::int32_t>(map.m));
      if (inserted) {
        ++map.m;
        map.orbit_sizes.push_back(0);
      }
      map.orbit_id[static_cast<std::size_t>(i) * k + j] = it->second;
      ++map.orbit_sizes[static_cast<std::size_t>(it->second)];
    }
  }
}

// 180-degree signed pairs; the center cell is pinned to zero and excluded.
void build_skew_orbits(OrbitMap& map, int k) {
  const int c = (k - 1) / 2;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * k + j;
      if (i == c && j == c) {
        map.sign[idx] = 0;
        continue;
      }
      if (map.orbit_id[idx] >= 0) continue;
      const Cell p = rot180({i, j}, k);
      const std::size_t pidx = static_cast<std::size_t>(p.i) * k + p.j;
      const auto id = static_cast<std::int32_t>(map.m++);
      map.orbit_id[idx] = id;
      map.sign[idx] = 1;
      map.orbit_id[pidx] = id;
      map.sign[pidx] = -1;
      map.orbit_sizes.push_back(2);
    }
  }
}

}  // namespace

std::string_view to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::None: return "none";
    case SymmetryKind::CentralEven: return "central-even";
    case SymmetryKind::CentralSkew: return "central-skew";
    case SymmetryKind::Horizontal: return "horizontal";
    case SymmetryKind::Vertical: return "vertical";
    case SymmetryKind::MainDiagonal: return "main-diagonal";
    case SymmetryKind::AntiDiagonal: return "anti-diagonal";
    case SymmetryKind::Rot90: return "rot90";
    case SymmetryKind::Radial: return "radial";
    case SymmetryKind::Toeplitz: return "toeplitz";
  }
  throw InvariantError("invalid SymmetryKind");
}

SymmetryKind symmetry_from_string(std::string_view name) {
  for (SymmetryKind kind : kAllSymmetries) {
    if (to_string(kind) == name) return kind;
  }
  throw FormatError("unknown symmetry name: " + std::string(name));
}

SymmetryKind symmetry_from_id(std::uint8_t id) {
  if (id >= kAllSymmetries.size()) {
    throw FormatError("symmetry id out of range: " + std::to_string(id));
  }
  return static_cast<SymmetryKind>(id);
}

void OrbitMap::validate() const {
  const std::size_t cells = static_cast<std::size_t>(k) * k;
  if (orbit_id.size() != cells || sign.size() != cells || orbit_sizes.size() != m) {
    throw InvariantError("OrbitMap: inconsistent field sizes");
  }
  std::uint64_t total = 0;
  for (std::uint32_t n : orbit_sizes) total += n;
  const std::uint64_t expected = (kind == SymmetryKind::CentralSkew) ? cells - 1 : cells;
  if (total != expected) throw InvariantError("OrbitMap: orbit sizes do not cover the grid");
}

OrbitMap orbit_map(SymmetryKind kind, int k) {
  require_odd(k);
  OrbitMap map;
  map.k = static_cast<std::uint16_t>(k);
  map.kind = kind;
  const std::size_t cells = static_cast<std::size_t>(k) * k;
  map.orbit_id.assign(cells, -1);
  map.sign.assign(cells, 1);

  const int c = (k - 1) / 2;
  switch (kind) {
    case SymmetryKind::Radial:
      build_partition_orbits(map, k, [c](int i, int j) {
        return static_cast<long>(i - c) * (i - c) + static_cast<long>(j - c) * (j - c);
      });
      break;
    case SymmetryKind::Toeplitz:
      build_partition_orbits(map, k, [](int i, int j) { return static_cast<long>(i - j); });
      break;
    case SymmetryKind::CentralSkew:
      build_skew_orbits(map, k);
      break;
    default:
      build_group_orbits(map, k, group_elements(kind));
      break;
  }
  map.validate();
  return map;
}

std::uint32_t dof_count(SymmetryKind kind, int k) { return orbit_map(kind, k).m; }

void orbit_reduce_slice(std::span<const float> slice, const OrbitMap& map, std::span<float> reps) {
  std::vector<double> acc(map.m, 0.0);
  for (std::size_t idx = 0; idx < map.orbit_id.size(); ++idx) {
    const std::int32_t id = map.orbit_id[idx];
    if (id < 0) continue;
    acc[static_cast<std::size_t>(id)] += map.sign[idx] * static_cast<double>(slice[idx]);
  }
  for (std::size_t m = 0; m < map.m; ++m) {
    reps[m] = static_cast<float>(acc[m] / map.orbit_sizes[m]);
  }
}

void orbit_expand_slice(std::span<const float> reps, const OrbitMap& map, std::span<float> slice) {
  for (std::size_t idx = 0; idx < map.orbit_id.size(); ++idx) {
    const std::int32_t id = map.orbit_id[idx];
    slice[idx] = (id < 0) ? 0.0f : map.sign[idx] * reps[static_cast<std::size_t>(id)];
  }
}

namespace {

WeightTensor project_impl(const WeightTensor& w, const OrbitMap& map, bool parallel) {
  if (w.k != map.k) {
    throw ShapeError("project: tensor k=" + std::to_string(w.k) + " vs orbit map k=" +
                     std::to_string(map.k));
  }
  WeightTensor out = WeightTensor::zeros(w.c_out, w.c_in, w.k);
  const auto slices = static_cast<std::int64_t>(w.slice_count());
  const std::size_t vol = w.slice_volume();
#pragma omp parallel if (parallel)
  {
    std::vector<float> reps(map.m);
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < slices; ++s) {
      std::span<const float> in(w.data.data() + s * vol, vol);
      std::span<float> dst(out.data.data() + s * vol, vol);
      orbit_reduce_slice(in, map, reps);
      orbit_expand_slice(reps, map, dst);
    }
  }
  return out;
}

}  // namespace

WeightTensor project(const WeightTensor& w, const OrbitMap& map) { return project_impl(w, map, true); }

WeightTensor project_serial(const WeightTensor& w, const OrbitMap& map) {
  return project_impl(w, map, false);
}

}  // namespace symw

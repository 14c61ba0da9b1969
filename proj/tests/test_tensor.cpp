#include "symw/tensor.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace symw;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / (std::string("symw_tensor_") + name);
}

}  // namespace

TEST_CASE("save/load round trip is byte exact") {
  ModelBundle bundle;
  WeightTensor w = WeightTensor::zeros(1, 1, 3);
  for (int i = 0; i < 9; ++i) w.data[static_cast<std::size_t>(i)] = static_cast<float>(i);
  bundle.layers.push_back({0, w});

  const auto path = temp_file("roundtrip.symw");
  save_bundle(bundle, path);
  const ModelBundle loaded = load_bundle(path);
  CHECK(loaded == bundle);

  // byte-exact: saving the loaded bundle reproduces the same file
  const auto again = temp_file("roundtrip2.symw");
  save_bundle(loaded, again);
  std::ifstream a(path, std::ios::binary), b(again, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  fs::remove(path);
  fs::remove(again);
}

TEST_CASE("random bundles round trip through bytes") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ModelBundle bundle = test::random_bundle({{2, 3, 5}, {4, 1, 3}, {1, 1, 7}}, seed);
    CHECK(parse_bundle(serialize_bundle(bundle)) == bundle);
  }
}

TEST_CASE("bad magic is a FormatError") {
  const auto path = temp_file("badmagic.symw");
  std::ofstream(path, std::ios::binary) << "XXXX rest does not matter";
  CHECK_THROWS_AS(load_bundle(path), FormatError);
  fs::remove(path);
}

TEST_CASE("truncated file is a FormatError") {
  const ModelBundle bundle = test::random_bundle({{2, 3, 5}}, 9);
  auto bytes = serialize_bundle(bundle);
  bytes.resize(bytes.size() - 7);
  CHECK_THROWS_AS(parse_bundle(bytes), FormatError);
}

TEST_CASE("even K is rejected on save") {
  ModelBundle bundle;
  WeightTensor w;
  w.c_out = 1;
  w.c_in = 1;
  w.k = 4;
  w.data.assign(16, 0.0f);
  bundle.layers.push_back({0, w});
  const auto path = temp_file("evenk.symw");
  CHECK_THROWS_AS(save_bundle(bundle, path), InvariantError);
}

TEST_CASE("non-finite entries are rejected") {
  WeightTensor w = WeightTensor::zeros(1, 1, 3);
  w.data[4] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(w.validate(), InvariantError);
}

TEST_CASE("empty bundle serializes to the bare header") {
  const ModelBundle empty;
  const auto bytes = serialize_bundle(empty);
  CHECK(bytes.size() == 10);  // magic + version + layer_count
  CHECK(parse_bundle(bytes).layers.empty());
}

TEST_CASE("layer ids must be strictly increasing") {
  ModelBundle bundle;
  bundle.layers.push_back({3, WeightTensor::zeros(1, 1, 3)});
  bundle.layers.push_back({3, WeightTensor::zeros(1, 1, 3)});
  CHECK_THROWS_AS(bundle.validate(), InvariantError);
  bundle.layers[1].layer_id = 2;
  CHECK_THROWS_AS(bundle.validate(), InvariantError);
  bundle.layers[1].layer_id = 5;
  CHECK_NOTHROW(bundle.validate());
}

TEST_CASE("(2,3,5) layer stores exactly 600 payload bytes") {
  const ModelBundle bundle = test::random_bundle({{2, 3, 5}}, 4);
  const auto bytes = serialize_bundle(bundle);
  // container header 10 + layer header 12 + 2*3*25 float32
  CHECK(bytes.size() == 10 + 12 + 600);
}

TEST_CASE("frobenius_distance basics") {
  const WeightTensor zeros = WeightTensor::zeros(1, 1, 3);
  WeightTensor ones = zeros;
  ones.data.assign(9, 1.0f);

  CHECK(frobenius_distance(zeros, zeros) == 0.0);
  CHECK(frobenius_distance(zeros, ones) == doctest::Approx(3.0));

  const WeightTensor other = WeightTensor::zeros(1, 1, 5);
  CHECK_THROWS_AS(frobenius_distance(zeros, other), ShapeError);
}

TEST_CASE("frobenius_distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = test::random_tensor(2, 2, 3, rng());
    const auto b = test::random_tensor(2, 2, 3, rng());
    const auto c = test::random_tensor(2, 2, 3, rng());
    const double ab = frobenius_distance(a, b);
    const double ba = frobenius_distance(b, a);
    CHECK(ab == ba);
    CHECK(frobenius_distance(a, c) <= ab + frobenius_distance(b, c) + 1e-12);
  }
}

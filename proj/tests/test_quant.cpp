#include "symw/quant.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace symw;

TEST_CASE("all-zero input quantizes to scale 1 and zero codes") {
  const std::vector<float> x(16, 0.0f);
  const QuantizedVector q = quantize(x, 8);
  CHECK(q.scale == 1.0f);
  for (auto v : q.values) CHECK(v == 0);
}

TEST_CASE("extrema map to the code extremes") {
  const std::vector<float> x = {-1.0f, 1.0f};
  const QuantizedVector q = quantize(x, 8);
  CHECK(q.scale == doctest::Approx(1.0 / 127.0).epsilon(1e-7));
  CHECK(q.values == std::vector<std::int32_t>{-127, 127});
}

TEST_CASE("round-trip error is bounded by scale/2") {
  std::mt19937_64 rng(3);
  for (int bits : {2, 3, 8, 11, 16}) {
    CAPTURE(bits);
    std::vector<float> x(100);
    for (float& v : x) v = test::uniform_pm1(rng);
    const QuantizedVector q = quantize(x, bits);
    const double bound = 0.5 * static_cast<double>(q.scale) * (1.0 + 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // definition check in double: |code * scale - x| <= scale / 2
      const double err =
          std::abs(static_cast<double>(q.values[i]) * static_cast<double>(q.scale) - x[i]);
      CHECK(err <= bound);
    }
    // and the emitted binary32 reconstruction is the rounded exact product
    const auto back = dequantize(q);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(static_cast<double>(back[i]) - x[i]) <=
            bound + std::abs(back[i]) * 1e-7);
    }
  }
}

TEST_CASE("codes never reach the most-negative value") {
  std::mt19937_64 rng(5);
  for (int bits : {2, 8, 16}) {
    std::vector<float> x(257);
    for (float& v : x) v = test::uniform_pm1(rng) * 3.0f;
    x[0] = -3.5f;  // make the extremum negative
    const QuantizedVector q = quantize(x, bits);
    for (auto v : q.values) {
      CHECK(v >= -code_max(bits));
      CHECK(v <= code_max(bits));
    }
  }
}

TEST_CASE("quantization is odd-symmetric") {
  std::mt19937_64 rng(7);
  std::vector<float> x(64), neg(64);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = test::uniform_pm1(rng);
    neg[i] = -x[i];
  }
  for (int bits : {4, 8, 12}) {
    const QuantizedVector qp = quantize(x, bits);
    const QuantizedVector qn = quantize(neg, bits);
    CHECK(qp.scale == qn.scale);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(qp.values[i] == -qn.values[i]);
  }
}

TEST_CASE("dequantize basics") {
  QuantizedVector q;
  q.bits = 8;
  q.scale = 0.5f;
  q.values = {0, 0};
  CHECK(dequantize(q) == std::vector<float>{0.0f, 0.0f});

  q.scale = 1.0f / 127.0f;
  q.values = {127};
  const float back = dequantize(q)[0];
  CHECK(test::ulp_distance(back, 1.0f) <= 1);
}

TEST_CASE("rounding is half-to-even") {
  // exact .5 multiples of the scale land on even codes
  QuantizedVector q;
  std::vector<float> x = {0.5f, 1.5f, 2.5f, -0.5f, -1.5f, 127.0f};
  q = quantize(x, 8);  // max|x| = 127 -> scale = 1.0
  CHECK(q.scale == 1.0f);
  CHECK(q.values == std::vector<std::int32_t>{0, 2, 2, 0, -2, 127});
}

TEST_CASE("non-finite input and bad widths are rejected") {
  std::vector<float> x = {1.0f, std::numeric_limits<float>::infinity()};
  CHECK_THROWS_AS(quantize(x, 8), InvariantError);
  x[1] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(quantize(x, 8), InvariantError);
  x[1] = 0.0f;
  CHECK_THROWS_AS(quantize(x, 1), InvariantError);
  CHECK_THROWS_AS(quantize(x, 17), InvariantError);
}

TEST_CASE("pack_codes golden bytes") {
  QuantizedVector q;
  q.bits = 8;
  q.scale = 1.0f;
  q.values = {-1, 5};
  CHECK(pack_codes(q) == std::vector<std::uint8_t>{0xFF, 0x05});

  q.bits = 16;
  q.values = {258};
  CHECK(pack_codes(q) == std::vector<std::uint8_t>{0x02, 0x01});
}

TEST_CASE("sub-byte widths pack MSB-first") {
  QuantizedVector q;
  q.scale = 1.0f;
  q.bits = 4;
  q.values = {1, -1};  // fields 0001 1111
  CHECK(pack_codes(q) == std::vector<std::uint8_t>{0x1F});

  q.bits = 3;
  q.values = {3, -3};  // fields 011 101, padded -> 01110100
  CHECK(pack_codes(q) == std::vector<std::uint8_t>{0x74});
  CHECK(unpack_codes(std::vector<std::uint8_t>{0x74}, 3, 2) == q.values);
}

TEST_CASE("pack/unpack round-trips every width") {
  std::mt19937_64 rng(11);
  for (int bits = 2; bits <= 16; ++bits) {
    CAPTURE(bits);
    QuantizedVector q;
    q.bits = static_cast<std::uint8_t>(bits);
    q.scale = 1.0f;
    const std::size_t count = 97;  // odd count exercises padding
    q.values.resize(count);
    const std::int32_t qmax = code_max(bits);
    for (auto& v : q.values) {
      v = static_cast<std::int32_t>(rng() % (2 * static_cast<std::uint32_t>(qmax) + 1)) - qmax;
    }
    const auto bytes = pack_codes(q);
    CHECK(bytes.size() == packed_size(bits, count));
    CHECK(unpack_codes(bytes, bits, count) == q.values);
  }
}

TEST_CASE("unpack of a truncated stream is a FormatError") {
  QuantizedVector q;
  q.bits = 8;
  q.scale = 1.0f;
  q.values = {1, 2, 3};
  auto bytes = pack_codes(q);
  bytes.pop_back();
  CHECK_THROWS_AS(unpack_codes(bytes, 8, 3), FormatError);
}

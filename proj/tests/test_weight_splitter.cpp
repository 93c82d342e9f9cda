#include <cmath>
#include <random>

#include "doctest.h"
#include "tab/error.hpp"
#include "tab/weight_splitter.hpp"

using namespace tab;

TEST_CASE("splitter fractions") {
  CHECK(splitter_fraction({1U << 12, 13}) == 0.5);
  CHECK(splitter_fraction({0, 13}) == 0.0);
  // 8191/8192, exact rational
  CHECK(splitter_fraction({8191, 13}) == 0.9998779296875);
  CHECK(splitter_fraction({0b101, 3}) == 0.625);
  CHECK_THROWS_AS(splitter_fraction({8192, 13}), InvalidParameter);
  CHECK_THROWS_AS(splitter_fraction({0, 0}), InvalidParameter);
  CHECK_THROWS_AS(splitter_fraction({0, 25}), InvalidParameter);
}

TEST_CASE("current routing") {
  auto r = route_current(1e-9, {0, 13});
  CHECK(r.good == 0.0);
  CHECK(r.dump == 1e-9);
  r = route_current(2e-9, {1U << 12, 13});
  CHECK(r.good == doctest::Approx(1e-9).epsilon(1e-15));
  CHECK_THROWS_AS(route_current(-1e-9, {0, 13}), InvalidParameter);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> current(0.0, 1e-8);
  std::uniform_int_distribution<int> width(1, 24);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = width(rng);
    const SplitterCode code{static_cast<std::uint32_t>(rng() % (SplitterCode::max_code(n) + 1)), n};
    const double i_in = current(rng);
    const auto out = route_current(i_in, code);
    CHECK(std::abs(out.good + out.dump - i_in) <= 1e-15 * i_in);
    // linear in the input current
    const auto doubled = route_current(2 * i_in, code);
    CHECK(doubled.good == 2 * out.good);
  }
}

TEST_CASE("quantize examples") {
  auto q = quantize(0.5, 13);
  CHECK(q.sign == 1);
  CHECK(q.code.bits == 4096);

  q = quantize(-1.0 + std::ldexp(1.0, -14), 13);
  CHECK(q.sign == -1);
  CHECK(q.code.bits == 8191);

  // nearest 13-bit code to 0.3 is 2458 (exact rational search); error 4.8828125e-5
  q = quantize(0.3, 13);
  CHECK(q.code.bits == 2458);
  CHECK(std::abs(dequantize(q) - 0.3) <= std::ldexp(1.0, -14));

  CHECK(quantize(0.0, 13).sign == 1);
  CHECK(quantize(-0.0, 13).sign == 1);
  CHECK(quantize(1.0, 13).code.bits == 8191);
  CHECK_THROWS_AS(quantize(1.01, 13), InvalidParameter);
  CHECK_THROWS_AS(quantize(NAN, 13), InvalidParameter);
  CHECK_THROWS_AS(quantize(0.2, 0), InvalidParameter);
}

TEST_CASE("round trip bound and monotonicity") {
  std::mt19937_64 rng(21);
  for (int n : {1, 4, 8, 13, 20, 24}) {
    const double lsb = std::ldexp(1.0, -n);
    std::uniform_real_distribution<double> w(-1.0 + lsb, 1.0 - lsb);
    for (int trial = 0; trial < 2000; ++trial) {
      const double a = w(rng), b = w(rng);
      CHECK(std::abs(dequantize(quantize(a, n)) - a) <= std::ldexp(1.0, -(n + 1)));
      const double lo = std::min(a, b), hi = std::max(a, b);
      CHECK(dequantize(quantize(lo, n)) <= dequantize(quantize(hi, n)));
    }
  }
}

TEST_CASE("dyadic weights round trip exactly") {
  const int n = 10;
  for (int m = -1023; m <= 1023; ++m) {
    const double w = std::ldexp(static_cast<double>(m), -n);
    CHECK(dequantize(quantize(w, n)) == w);
  }
}

TEST_CASE("weight vectors carry a global scale") {
  const std::vector<double> w{0.2, -0.8, 0.4};
  const auto q = quantize_vector(w, 13);
  CHECK(q.scale == 0.8);
  CHECK(q.weights[1].sign == -1);
  CHECK(q.weights[1].code.bits == 8191);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(q.value(i) - w[i]) <= q.scale * std::ldexp(1.0, -13) * (1 + 1e-12));
  }
  const std::vector<double> zeros(4, 0.0);
  const auto z = quantize_vector(zeros, 8);
  CHECK(z.scale == 1.0);
  for (double v : z.values()) CHECK(v == 0.0);
}

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/error.hpp"
#include "gl3lab/moments.hpp"
#include "gl3lab/random_model.hpp"
#include "gl3lab/rng.hpp"

using namespace gl3lab;

TEST_CASE("diagonal solutions") {
  const auto two = diagonal_solutions(2, 6);
  CHECK(two.size() == 12);
  for (std::size_t s = 0; s < two.size(); ++s) {
    CHECK(two.indices(s)[0] == two.indices(s)[1]);
    CHECK(two.signs(s)[0] == -two.signs(s)[1]);
  }

  const std::vector<std::uint64_t> idx = {27, 1, 8};
  const std::vector<int> sgn = {1, -1, -1};
  CHECK(is_diagonal(idx, sgn));
  CHECK(std::fabs(3.0 - 1.0 - 2.0) < 1e-12);
  const auto three = diagonal_solutions(3, 27);
  bool found = false;
  for (std::size_t s = 0; s < three.size(); ++s) {
    if (std::vector<std::uint64_t>(three.indices(s).begin(), three.indices(s).end()) == idx &&
        std::vector<int>(three.signs(s).begin(), three.signs(s).end()) == sgn) {
      found = true;
    }
  }
  CHECK(found);

  // With M = 7 every index is its own kernel with r = 1, so a vanishing
  // kernel sum needs two equal indices of opposite sign.
  const auto seven = diagonal_solutions(3, 7);
  CHECK(seven.size() == 0);

  CHECK_THROWS_AS(diagonal_solutions(9, 2), ResourceError);
  CHECK_THROWS_AS(diagonal_solutions(8, 64), ResourceError);
  CHECK_NOTHROW(diagonal_solutions(2, 256));
}

TEST_CASE("diagonal solutions agree with floating point and the gap bound") {
  const unsigned h = 4;
  const std::uint64_t M = 12;
  const auto sys = diagonal_solutions(h, M);
  for (std::size_t s = 0; s < sys.size(); ++s) {
    long double sum = 0.0L;
    for (unsigned j = 0; j < h; ++j) {
      sum += sys.signs(s)[j] * std::cbrt(static_cast<long double>(sys.indices(s)[j]));
    }
    CHECK(std::fabs(static_cast<double>(sum)) < 1e-10);
  }
  const auto gap = lemma62_min_gap(h, M);
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::uint64_t> pick(1, M);
  int trials = 0;
  while (trials < 10000) {
    std::vector<std::uint64_t> idx(h);
    std::vector<int> sgn(h);
    for (unsigned j = 0; j < h; ++j) {
      idx[j] = pick(gen);
      sgn[j] = gen() & 1 ? 1 : -1;
    }
    if (is_diagonal(idx, sgn)) continue;
    ++trials;
    long double sum = 0.0L;
    for (unsigned j = 0; j < h; ++j) sum += sgn[j] * std::cbrt(static_cast<long double>(idx[j]));
    CHECK(std::fabs(sum) > gap.bound);
  }
}

TEST_CASE("minimum gaps") {
  const auto one = lemma62_min_gap(1, 5);
  CHECK(one.min_gap == 1.0L);
  CHECK(one.bound == 1.0L);

  const auto two = lemma62_min_gap(2, 9);
  CHECK(static_cast<double>(two.min_gap) ==
        doctest::Approx(std::cbrt(9.0) - 2.0).epsilon(1e-12));
  CHECK(static_cast<double>(two.min_gap) == doctest::Approx(0.080084).epsilon(1e-5));
  CHECK(static_cast<double>(two.bound) == doctest::Approx(0.057780).epsilon(1e-5));
  CHECK(two.min_gap >= two.bound);
  CHECK(two.witness == std::vector<std::uint64_t>({8, 9}));

  const auto three = lemma62_min_gap(3, 12);
  MESSAGE("m = 3, M = 12: gap " << static_cast<double>(three.min_gap) << " bound "
                                << static_cast<double>(three.bound));
  CHECK(three.min_gap >= three.bound);
  CHECK_THROWS_AS(lemma62_min_gap(5, 4), ResourceError);
  CHECK_THROWS_AS(lemma62_min_gap(2, 17), ResourceError);
}

TEST_CASE("time averages") {
  const std::vector<double> single = {1.0};
  for (double T : {1e3, 1e5, 1e7}) {
    CHECK(std::fabs(time_average_power(single, 1.0, 1, T)) <= 1.0 * std::pow(T, -1.0 / 3.0));
  }
  CHECK(time_average_power(single, 1.0, 2, 1e6) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::fabs(time_average_power(single, 1.0, 2, 1e6) - 0.5) <= 1e-2);
  CHECK(time_average_power(single, -1.0, 2, 1e6) == time_average_power(single, 1.0, 2, 1e6));
}

TEST_CASE("exact time average against brute-force quadrature") {
  // Direct composite Simpson in t with a step far below the shortest period.
  const std::vector<double> a = {1.0, 0.5, -0.3, 0.2, 0.7};
  const double T = 2000.0;
  for (unsigned h : {1u, 2u, 3u}) {
    const int steps = 400000;
    const double step = T / steps;
    long double acc = 0.0L;
    for (int i = 0; i <= steps; ++i) {
      const double t = T + i * step;
      double s = 0.0;
      for (std::size_t m = 1; m <= a.size(); ++m) {
        s += a[m - 1] * std::cos(6.0 * std::numbers::pi * std::cbrt(m * t));
      }
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * std::pow(s, h);
    }
    const double simpson = static_cast<double>(acc * step / 3.0L / T);
    CHECK(time_average_power(a, 1.0, h, T) == doctest::Approx(simpson).epsilon(1e-9).scale(1.0));

    TimeAverageOptions quad;
    quad.term_limit = 1.0;
    quad.allow_quadrature = true;
    CHECK(time_average_power(a, 1.0, h, T, quad) ==
          doctest::Approx(simpson).epsilon(1e-7).scale(1.0));
  }
  TimeAverageOptions strict;
  strict.term_limit = 1.0;
  CHECK_THROWS_AS(time_average_power(a, 1.0, 2, T, strict), ResourceError);
}

TEST_CASE("model moments") {
  const std::vector<double> a = {0.4, -0.2, 0.3, 0.1, 0.5, 0.0, 0.2, 0.6};
  CHECK(model_moment_exact(a, 1) == 0.0);
  double half = 0.0;
  for (double v : a) half += 0.5 * v * v;
  CHECK(model_moment_exact(a, 2) == doctest::Approx(half).epsilon(1e-14));
  for (unsigned h : {2u, 3u, 4u, 5u}) {
    CHECK(model_moment_exact(a, h) == doctest::Approx(diagonal_moment(a, h)).epsilon(1e-12));
  }

  // Kernel-1 relation 3 - 1 - 2 = 0 with a_1 = a_8 = a_27 = 1.
  std::vector<double> cube(27, 0.0);
  cube[0] = cube[7] = cube[26] = 1.0;
  const double m3 = model_moment_exact(cube, 3);
  CHECK(m3 > 0.0);
  CHECK(m3 == doctest::Approx(diagonal_moment(cube, 3)).epsilon(1e-14));
  // Hand count of zero-sum harmonic triples from {+-1, +-2, +-3}: the
  // 3 - 1 - 2 relation gives 2 * 3! = 12 ordered patterns, 1 + 1 - 2 gives
  // 2 * 3 = 6; each carries 2^{-3}.
  CHECK(m3 == doctest::Approx(18.0 / 8.0).epsilon(1e-14));

  const std::uint64_t draws = 10000000;
  double s = 0.0, s2 = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double x = keyed_uniform(3, i, 1);
    double f = 0.0;
    for (int r = 1; r <= 3; ++r) f += std::cos(6.0 * std::numbers::pi * r * x);
    const double f3 = f * f * f;
    s += f3;
    s2 += f3 * f3;
  }
  const double mean = s / draws;
  const double se = std::sqrt((s2 / draws - mean * mean) / draws);
  CHECK(std::fabs(mean - m3) <= 3.0 * se);
}

TEST_CASE("model moments of the random model coefficients") {
  const auto model = build_model(sieve_divisor3(5000), 4, 4);
  const auto coeffs = index_coefficients(model);
  CHECK(model_moment_exact(coeffs, 2) == doctest::Approx(exact_second_moment(model)).epsilon(1e-12));
  CHECK(model_moment_exact(coeffs, 4) == doctest::Approx(diagonal_moment(coeffs, 4)).epsilon(1e-12));
}

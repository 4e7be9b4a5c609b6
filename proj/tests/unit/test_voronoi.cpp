#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/error.hpp"
#include "gl3lab/error_term.hpp"
#include "gl3lab/voronoi.hpp"

using namespace gl3lab;

namespace {

constexpr double kPi = std::numbers::pi;
const double kScale = 1.0 / (kPi * std::sqrt(3.0));

CoefficientTable unit_table(std::size_t n) {
  std::vector<double> v(n, 0.0);
  v[0] = 1.0;
  return CoefficientTable(std::move(v), Provider::kExternal, std::nullopt, "unit");
}

}  // namespace

TEST_CASE("Voronoi configuration") {
  CHECK_NOTHROW(validate(VoronoiConfig{}));
  CHECK_THROWS_AS(validate(VoronoiConfig{0.5}), DomainError);
  CHECK_THROWS_AS(validate(VoronoiConfig{2.0 / 3.0}), DomainError);
  CHECK(voronoi_length(1e5, 0.6) == doctest::Approx(std::pow(1e5, 0.8) / (8 * kPi * kPi * kPi)));
}

TEST_CASE("truncated Voronoi sum") {
  const auto table = unit_table(100);
  const double x = 2000.5;
  REQUIRE(voronoi_length(x, 0.6) >= 1.0);
  const double expect = std::cbrt(x) * kScale * std::cos(6.0 * kPi * std::cbrt(x));
  CHECK(truncated_voronoi(table, x) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(truncated_voronoi(table, 100.5) == 0.0);

  VoronoiConfig dbl;
  dbl.precision = ArgumentPrecision::kDouble;
  CHECK(truncated_voronoi(table, x, dbl) == doctest::Approx(expect).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(truncated_voronoi(unit_table(10), 1e7 + 0.5), doctest::Contains("length"),
                       RangeError);
}

TEST_CASE("d3 truncation tracks Delta near 10^5") {
  const auto table = sieve_divisor3(200000);
  const auto series = build_series(table);
  double C = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = 100000.5 + 7 * i;
    const double err = std::fabs(delta_at(series, x) - truncated_voronoi(table, x));
    C = std::max(C, err / std::pow(x, 0.45));
  }
  MESSAGE("fitted Voronoi constant C = " << C << " at alpha = 0.6");
  CHECK(C < 5.0);
}

TEST_CASE("a_n building blocks") {
  const auto unit = unit_table(10);
  CHECK(a_n_eval(unit, 1, 0.0, 1) == doctest::Approx(kScale).epsilon(1e-15));
  CHECK(kScale == doctest::Approx(0.183776).epsilon(1e-6));
  CHECK_THROWS_AS(a_n_eval(unit, 8, 0.0, 1), DomainError);
  CHECK_THROWS_AS(a_n_eval(unit, 2, 0.0, 2), RangeError);

  const auto d3 = sieve_divisor3(3000);
  // Term-by-term oracle in extended precision.
  long double direct = 0.0L;
  for (int r = 1; r <= 10; ++r) {
    const long double m = 2.0L * r * r * r;
    direct += d3[static_cast<std::uint64_t>(m)] / std::pow(m, 2.0L / 3.0L) *
              std::cos(6.0L * std::numbers::pi_v<long double> * r * 0.25L);
  }
  direct /= std::numbers::pi_v<long double> * std::sqrt(3.0L);
  CHECK(a_n_eval(d3, 2, 0.25, 10) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-13));

  for (std::uint64_t n : {1, 2, 3, 5, 6, 7, 9, 10}) {
    const auto rmax = max_harmonic(d3, n);
    double trap = 0.0;
    for (int j = 0; j < 2048; ++j) trap += a_n_eval(d3, n, j / 2048.0, rmax);
    CHECK(std::fabs(trap / 2048.0) <= 1e-12);
    for (double t : {0.125, 0.375, 0.90625}) {
      CHECK(a_n_eval(d3, n, t, rmax) == a_n_eval(d3, n, t + 1.0, rmax));
    }
    // Parseval against the trapezoid rule (exact for these trigonometric
    // polynomials once 2048 exceeds twice the top frequency).
    double sq = 0.0;
    for (int j = 0; j < 2048; ++j) {
      const double v = a_n_eval(d3, n, j / 2048.0, rmax);
      sq += v * v;
    }
    CHECK(sq / 2048.0 == doctest::Approx(a_n_mean_square(d3, n, rmax)).epsilon(1e-12));
  }
}

TEST_CASE("double truncation F_N") {
  const auto unit = unit_table(10);
  const double t = 12345.6;
  CHECK(truncated_F_N(unit, t, 1) ==
        doctest::Approx(kScale * std::cos(6.0 * kPi * std::cbrt(t))).epsilon(1e-10));
  CHECK(truncated_F_N(unit, 27.0 * 27.0 * 27.0, 1) == doctest::Approx(kScale).epsilon(1e-15));
  CHECK_THROWS_AS(truncated_F_N(unit, t, 2), RangeError);

  const auto d3 = sieve_divisor3(20000);
  for (double tt : {1e4 + 0.3, 5e5 + 0.7, 1e8 + 0.1}) {
    for (std::uint64_t nt : {4, 8, 11}) {
      double sum = 0.0;
      for (std::uint64_t n = 1; n <= nt; ++n) {
        if (!is_cube_free(n)) continue;
        // a_n has period 1, so pass the phase already reduced in extended
        // precision.
        const long double gamma_t = std::cbrt(static_cast<long double>(n) * tt);
        sum += a_n_eval(d3, n, static_cast<double>(gamma_t - std::floor(gamma_t)), nt);
      }
      CHECK(truncated_F_N(d3, tt, nt) == doctest::Approx(sum).epsilon(1e-12).scale(1.0));
    }
  }

  CHECK(truncation_in_proven_range(1, 10.0));
  CHECK_FALSE(truncation_in_proven_range(2, 1e10));
}

TEST_CASE("window error of the double truncation decreases with N") {
  const auto d3 = sieve_divisor3(100000);
  const auto series = build_series(d3);
  std::vector<double> averages;
  for (std::uint64_t nt : {4, 8, 16}) {
    double total = 0.0;
    const int points = 2000;
    for (int j = 0; j < points; ++j) {
      const double t = 1e4 * (1.0 + (j + 0.5) / points);
      total += std::fabs(normalized_F(series, t) - truncated_F_N(d3, t, nt));
    }
    averages.push_back(total / points);
  }
  MESSAGE("window mean |F - F_N| for N = 4, 8, 16: " << averages[0] << ", " << averages[1]
                                                      << ", " << averages[2]);
  CHECK(averages[1] < averages[0]);
  CHECK(averages[2] < averages[1]);
}

#include "gl3lab/voronoi.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gl3lab/error.hpp"
#include "gl3lab/summation.hpp"

namespace gl3lab {

namespace {

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;
const double kInvPiSqrt3 = 1.0 / (std::numbers::pi * std::numbers::sqrt3);

// cos(2 pi y) with y reduced to its fractional part first.
double cos_turns(long double y) {
  const long double frac = y - std::floor(y);
  return static_cast<double>(std::cos(kTwoPi * frac));
}

// cos(6 pi (m x)^{1/3}).
double cube_root_phase(double m, double x, ArgumentPrecision precision) {
  if (precision == ArgumentPrecision::kDouble) {
    return std::cos(6.0 * std::numbers::pi * std::cbrt(m * x));
  }
  const long double c = std::cbrt(static_cast<long double>(m) * static_cast<long double>(x));
  return cos_turns(3.0L * c);
}

std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  while (r > 0 && r * r * r > n) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

void validate(const VoronoiConfig& cfg) {
  if (!(cfg.alpha > 0.5 && cfg.alpha < 2.0 / 3.0)) {
    throw DomainError("voronoi alpha must lie strictly inside (1/2, 2/3), got " +
                      std::to_string(cfg.alpha));
  }
}

double voronoi_length(double x, double alpha) {
  const double pi = std::numbers::pi;
  return std::pow(x, 3.0 * alpha - 1.0) / (8.0 * pi * pi * pi);
}

double truncated_voronoi(const CoefficientTable& table, double x, const VoronoiConfig& cfg) {
  validate(cfg);
  if (!(x > 0.0)) throw DomainError("truncated_voronoi: x must be positive");
  const double length = voronoi_length(x, cfg.alpha);
  if (length < 1.0) return 0.0;
  const auto terms = static_cast<std::uint64_t>(std::floor(length));
  if (terms > table.size()) {
    throw RangeError("truncated_voronoi: x = " + std::to_string(x) + " needs table length " +
                     std::to_string(terms) + ", have " + std::to_string(table.size()));
  }
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= terms; ++n) {
    const double a = table[n];
    if (a == 0.0) continue;
    const double nd = static_cast<double>(n);
    acc += a / std::cbrt(nd * nd) * cube_root_phase(nd, x, cfg.precision);
  }
  return std::cbrt(x) * kInvPiSqrt3 * acc.value();
}

std::uint64_t max_harmonic(const CoefficientTable& table, std::uint64_t n) {
  if (n == 0) return 0;
  return icbrt(table.size() / n);
}

double a_n_eval(const CoefficientTable& table, std::uint64_t n, double t, std::uint64_t rmax) {
  if (n == 0 || !is_cube_free(n)) {
    throw DomainError("a_n_eval: n = " + std::to_string(n) + " is not cube-free");
  }
  if (rmax > max_harmonic(table, n)) {
    throw RangeError("a_n_eval: n r^3 = " + std::to_string(n * rmax * rmax * rmax) +
                     " exceeds table length " + std::to_string(table.size()));
  }
  const long double frac = static_cast<long double>(t) - std::floor(static_cast<long double>(t));
  CompensatedSum acc;
  for (std::uint64_t r = 1; r <= rmax; ++r) {
    const std::uint64_t m = n * r * r * r;
    const double a = table[m];
    if (a == 0.0) continue;
    const double md = static_cast<double>(m);
    acc += a / std::cbrt(md * md) * cos_turns(3.0L * static_cast<long double>(r) * frac);
  }
  return kInvPiSqrt3 * acc.value();
}

double a_n_mean_square(const CoefficientTable& table, std::uint64_t n, std::uint64_t rmax) {
  if (rmax > max_harmonic(table, n)) {
    throw RangeError("a_n_mean_square: harmonic bound exceeds table");
  }
  CompensatedSum acc;
  for (std::uint64_t r = 1; r <= rmax; ++r) {
    const std::uint64_t m = n * r * r * r;
    const double a = table[m];
    acc += a * a / std::pow(static_cast<double>(m), 4.0 / 3.0);
  }
  return acc.value() / (6.0 * std::numbers::pi * std::numbers::pi);
}

double truncated_F_N(const CoefficientTable& table, double t, std::uint64_t n_trunc) {
  if (!(t > 0.0)) throw DomainError("truncated_F_N: t must be positive");
  const long double need = std::pow(static_cast<long double>(n_trunc), 4.0L);
  if (need > static_cast<long double>(table.size())) {
    throw RangeError("truncated_F_N: N_trunc = " + std::to_string(n_trunc) +
                     " needs table length N_trunc^4 = " +
                     std::to_string(static_cast<unsigned long long>(need)) + ", have " +
                     std::to_string(table.size()));
  }
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= n_trunc; ++n) {
    if (!is_cube_free(n)) continue;
    const long double root =
        std::cbrt(static_cast<long double>(n) * static_cast<long double>(t));
    const double scale = 1.0 / std::cbrt(static_cast<double>(n * n));
    for (std::uint64_t r = 1; r <= n_trunc; ++r) {
      const double a = table[n * r * r * r];
      if (a == 0.0) continue;
      const double rd = static_cast<double>(r);
      acc += scale * a / (rd * rd) * cos_turns(3.0L * static_cast<long double>(r) * root);
    }
  }
  return kInvPiSqrt3 * acc.value();
}

bool truncation_in_proven_range(std::uint64_t n_trunc, double T) {
  return static_cast<double>(n_trunc) <= std::pow(T, 1.0 / 162.0);
}

}  // namespace gl3lab

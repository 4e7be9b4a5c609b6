#pragma once

#include <cstdint>

#include "gl3lab/coeffs.hpp"

namespace gl3lab {

enum class ArgumentPrecision { kDouble, kExtended };

struct VoronoiConfig {
  double alpha = 0.6;  // must lie strictly inside (1/2, 2/3)
  std::size_t sample_count = 100;
  ArgumentPrecision precision = ArgumentPrecision::kExtended;
};

// Throws DomainError unless 1/2 < alpha < 2/3.
void validate(const VoronoiConfig& cfg);

// Truncation length X = x^{3 alpha - 1} / (8 pi^3).
double voronoi_length(double x, double alpha);

// (x^{1/3} / (pi sqrt 3)) sum_{n <= X} a(n) n^{-2/3} cos(6 pi (n x)^{1/3}).
// Empty when X < 1.
double truncated_voronoi(const CoefficientTable& table, double x, const VoronoiConfig& cfg = {});

// a_n(t) = (1 / (pi sqrt 3)) sum_{r <= rmax} a(n r^3) (n r^3)^{-2/3} cos(6 pi r t)
// for cube-free n. Periodic in t with period 1.
double a_n_eval(const CoefficientTable& table, std::uint64_t n, double t, std::uint64_t rmax);

// int_0^1 a_n(t)^2 dt = (1 / (6 pi^2)) sum_{r <= rmax} a(n r^3)^2 (n r^3)^{-4/3}.
double a_n_mean_square(const CoefficientTable& table, std::uint64_t n, std::uint64_t rmax);

// Largest r with n r^3 <= N.
std::uint64_t max_harmonic(const CoefficientTable& table, std::uint64_t n);

// Double truncation over cube-free n <= n_trunc and r <= n_trunc:
// (1/(pi sqrt 3)) sum_n n^{-2/3} sum_r a(n r^3) r^{-2} cos(6 pi r (n t)^{1/3}).
// Needs n_trunc^4 <= N.
double truncated_F_N(const CoefficientTable& table, double t, std::uint64_t n_trunc);

// Whether n_trunc satisfies the admissible range n_trunc <= T^{1/162} under
// which the averaged truncation error is known to decay; evaluation does not
// depend on it.
bool truncation_in_proven_range(std::uint64_t n_trunc, double T);

}  // namespace gl3lab

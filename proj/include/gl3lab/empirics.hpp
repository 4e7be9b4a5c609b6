#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/error_term.hpp"
#include "gl3lab/voronoi.hpp"

namespace gl3lab {

// Weighted sample sorted ascending; weights sum to one.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples, std::vector<double> weights = {},
                                 std::optional<std::pair<double, double>> window = std::nullopt);

  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double weight(std::size_t i) const {
    return weights_.empty() ? 1.0 / static_cast<double>(samples_.size()) : weights_[i];
  }
  bool uniform_weights() const { return weights_.empty(); }
  const std::optional<std::pair<double, double>>& window() const { return window_; }

  // P(X <= u).
  double cdf(double u) const;
  double mean() const;
  double variance() const;

 private:
  std::vector<double> samples_;
  std::vector<double> weights_;
  std::optional<std::pair<double, double>> window_;
};

struct SamplingStrategy {
  enum class Kind { kGrid, kUniform };
  Kind kind = Kind::kGrid;
  std::uint64_t seed = 0;

  static SamplingStrategy grid() { return {Kind::kGrid, 0}; }
  static SamplingStrategy uniform(std::uint64_t seed) { return {Kind::kUniform, seed}; }
};

// Samples evaluator(t) on [T, 2T]: grid points t_j = T (1 + (j - 1/2)/count)
// or count keyed uniforms.
EmpiricalDistribution empirical_distribution(const std::function<double(double)>& evaluator,
                                             double T, std::size_t count,
                                             SamplingStrategy strategy, unsigned threads = 1);

// F(t) = t^{-1/3} Delta(t) from exact prefix sums when t <= N, and from the
// truncated Voronoi expansion above the table range.
class WindowEvaluator {
 public:
  WindowEvaluator(const CoefficientTable& table, const ErrorTermSeries& series,
                  VoronoiConfig voronoi = {});

  double operator()(double t) const;
  // Whether a window [T, 2T] is served entirely by exact prefix sums.
  bool exact_on(double T) const { return 2.0 * T <= static_cast<double>(series_.size()); }

 private:
  const CoefficientTable& table_;
  const ErrorTermSeries& series_;
  VoronoiConfig voronoi_;
};

// sup_u |CDF_a(u) - CDF_b(u)| over the merged jump set.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

// Gaussian kernel density estimate on the grid points.
std::vector<std::pair<double, double>> density_estimate(const EmpiricalDistribution& dist,
                                                        double bandwidth,
                                                        std::span<const double> grid);

enum class TailSide { kAbove, kBelow };

// Weighted fraction with sample > V (kAbove) or sample < -V (kBelow).
double tail_probability(const EmpiricalDistribution& dist, double V, TailSide side);

struct EnvelopeConstants {
  double b1 = 1.0;
  double b2 = 1.0;
  double b3 = 1.0;
  double b4 = 1.0;
};

struct EnvelopePoint {
  double V = 0.0;
  double lower = 0.0;  // exp(-b3 V^{35/2 + eps1})
  double upper = 0.0;  // exp(-b4 V^{5/3 - eps2})
};

struct BoundCurves {
  double T = 0.0;
  double rate = 0.0;   // (log log log T)^{5/3} / (log log T)^{1/3}
  double v_min = 0.0;  // b1
  double v_max = 0.0;  // b2 (log log T)^{1/21} (log log log T)^{-5/21}
  std::vector<EnvelopePoint> envelope;
};

// Requires T >= 16 so that log log log T > 0.
BoundCurves bound_curves(double T, std::span<const double> v_grid, double eps1, double eps2,
                         const EnvelopeConstants& b = {});

using CharacteristicFn = std::function<std::complex<double>(double)>;

std::complex<double> empirical_characteristic(const EmpiricalDistribution& dist, double alpha);

// 1/R + int_{-R}^{R} |phi_F(a) - phi_X(a)| / |a| da by the trapezoid rule on
// the grid a_j = j R / quad_points. On the window |a| < R / quad_points the
// integrand is replaced by a central-difference estimate of |(phi_F - phi_X)'(0)|.
double berry_esseen_bound(const CharacteristicFn& phi_F, const CharacteristicFn& phi_X,
                          double R, std::size_t quad_points);

}  // namespace gl3lab

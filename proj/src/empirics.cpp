#include "gl3lab/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gl3lab/error.hpp"
#include "gl3lab/parallel.hpp"
#include "gl3lab/rng.hpp"
#include "gl3lab/summation.hpp"

namespace gl3lab {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples,
                                             std::vector<double> weights,
                                             std::optional<std::pair<double, double>> window)
    : window_(window) {
  if (!weights.empty() && weights.size() != samples.size()) {
    throw DimensionError("empirical distribution: " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(samples.size()) + " samples");
  }
  if (weights.empty()) {
    samples_ = std::move(samples);
    std::sort(samples_.begin(), samples_.end());
    return;
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return samples[i] < samples[j]; });
  CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("empirical distribution: negative weight");
    total += w;
  }
  if (!(total.value() > 0.0)) throw DomainError("empirical distribution: zero total weight");
  samples_.reserve(order.size());
  weights_.reserve(order.size());
  for (std::size_t i : order) {
    samples_.push_back(samples[i]);
    weights_.push_back(weights[i] / total.value());
  }
}

double EmpiricalDistribution::cdf(double u) const {
  const auto end = std::upper_bound(samples_.begin(), samples_.end(), u);
  const auto count = static_cast<std::size_t>(end - samples_.begin());
  if (weights_.empty()) return static_cast<double>(count) / static_cast<double>(samples_.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < count; ++i) acc += weights_[i];
  return acc.value();
}

double EmpiricalDistribution::mean() const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples_.size(); ++i) acc += weight(i) * samples_[i];
  return acc.value();
}

double EmpiricalDistribution::variance() const {
  const double m = mean();
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double d = samples_[i] - m;
    acc += weight(i) * d * d;
  }
  return acc.value();
}

EmpiricalDistribution empirical_distribution(const std::function<double(double)>& evaluator,
                                             double T, std::size_t count,
                                             SamplingStrategy strategy, unsigned threads) {
  if (count == 0) throw DomainError("empirical_distribution: count must be positive");
  if (!(T > 0.0)) throw DomainError("empirical_distribution: T must be positive");
  std::vector<double> values(count);
  parallel_for(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      double t = 0.0;
      if (strategy.kind == SamplingStrategy::Kind::kGrid) {
        t = T * (1.0 + (static_cast<double>(j) + 0.5) / static_cast<double>(count));
      } else {
        t = T * (1.0 + keyed_uniform(strategy.seed, j, 0));
      }
      values[j] = evaluator(t);
    }
  });
  return EmpiricalDistribution(std::move(values), {}, std::make_pair(T, 2.0 * T));
}

WindowEvaluator::WindowEvaluator(const CoefficientTable& table, const ErrorTermSeries& series,
                                 VoronoiConfig voronoi)
    : table_(table), series_(series), voronoi_(voronoi) {
  validate(voronoi_);
}

double WindowEvaluator::operator()(double t) const {
  if (t <= static_cast<double>(series_.size())) return normalized_F(series_, t);
  return truncated_voronoi(table_, t, voronoi_) / std::cbrt(t);
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.size() == 0 || b.size() == 0) throw DomainError("ks_distance: empty distribution");
  const auto xs = a.samples();
  const auto ys = b.samples();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double best = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double u = 0.0;
    if (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      u = xs[i];
    } else {
      u = ys[j];
    }
    // Absorb every jump at u, then compare the right limits. Left limits at
    // u equal the right limits at the previous jump point.
    while (i < xs.size() && xs[i] == u) fa += a.weight(i++);
    while (j < ys.size() && ys[j] == u) fb += b.weight(j++);
    if (i == xs.size()) fa = 1.0;
    if (j == ys.size()) fb = 1.0;
    best = std::max(best, std::fabs(fa - fb));
  }
  return best;
}

std::vector<std::pair<double, double>> density_estimate(const EmpiricalDistribution& dist,
                                                        double bandwidth,
                                                        std::span<const double> grid) {
  if (!(bandwidth > 0.0)) throw DomainError("density_estimate: bandwidth must be positive");
  const auto xs = dist.samples();
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  const double reach = 9.0 * bandwidth;  // exp(-40.5) is below double resolution of the sum
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double g : grid) {
    const auto lo = std::lower_bound(xs.begin(), xs.end(), g - reach);
    const auto hi = std::upper_bound(xs.begin(), xs.end(), g + reach);
    CompensatedSum acc;
    for (auto it = lo; it != hi; ++it) {
      const double z = (g - *it) / bandwidth;
      acc += dist.weight(static_cast<std::size_t>(it - xs.begin())) * std::exp(-0.5 * z * z);
    }
    out.emplace_back(g, norm * acc.value());
  }
  return out;
}

double tail_probability(const EmpiricalDistribution& dist, double V, TailSide side) {
  const auto xs = dist.samples();
  std::size_t begin = 0;
  std::size_t end = 0;
  if (side == TailSide::kAbove) {
    begin = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), V) - xs.begin());
    end = xs.size();
  } else {
    begin = 0;
    end = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), -V) - xs.begin());
  }
  if (dist.uniform_weights()) {
    return static_cast<double>(end - begin) / static_cast<double>(xs.size());
  }
  CompensatedSum acc;
  for (std::size_t i = begin; i < end; ++i) acc += dist.weight(i);
  return acc.value();
}

BoundCurves bound_curves(double T, std::span<const double> v_grid, double eps1, double eps2,
                         const EnvelopeConstants& b) {
  if (!(T >= 16.0)) {
    throw DomainError("bound_curves: T must be >= 16 for log log log T > 0, got " +
                      std::to_string(T));
  }
  const double ll = std::log(std::log(T));
  const double lll = std::log(ll);
  BoundCurves out;
  out.T = T;
  out.rate = std::pow(lll, 5.0 / 3.0) / std::cbrt(ll);
  out.v_min = b.b1;
  out.v_max = b.b2 * std::pow(ll, 1.0 / 21.0) * std::pow(lll, -5.0 / 21.0);
  for (double v : v_grid) {
    out.envelope.push_back(EnvelopePoint{v, std::exp(-b.b3 * std::pow(v, 17.5 + eps1)),
                                         std::exp(-b.b4 * std::pow(v, 5.0 / 3.0 - eps2))});
  }
  return out;
}

std::complex<double> empirical_characteristic(const EmpiricalDistribution& dist, double alpha) {
  CompensatedSum re;
  CompensatedSum im;
  const auto xs = dist.samples();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double w = dist.weight(i);
    re += w * std::cos(alpha * xs[i]);
    im += w * std::sin(alpha * xs[i]);
  }
  return {re.value(), im.value()};
}

double berry_esseen_bound(const CharacteristicFn& phi_F, const CharacteristicFn& phi_X,
                          double R, std::size_t quad_points) {
  if (!(R > 0.0)) throw DomainError("berry_esseen_bound: R must be positive");
  if (quad_points < 2) throw DomainError("berry_esseen_bound: need at least 2 quadrature points");
  const double delta = R / static_cast<double>(quad_points);
  auto diff = [&](double a) { return phi_F(a) - phi_X(a); };
  auto integrand = [&](double a) { return std::abs(diff(a)) / std::fabs(a); };

  // Trapezoid on [delta, R] and [-R, -delta] with step delta.
  CompensatedSum acc;
  for (int sign : {1, -1}) {
    double prev = integrand(sign * delta);
    for (std::size_t j = 2; j <= quad_points; ++j) {
      const double cur = integrand(sign * static_cast<double>(j) * delta);
      acc += 0.5 * delta * (prev + cur);
      prev = cur;
    }
  }
  const double slope = std::abs(diff(delta) - diff(-delta)) / (2.0 * delta);
  acc += 2.0 * delta * slope;
  return 1.0 / R + acc.value();
}

}  // namespace gl3lab

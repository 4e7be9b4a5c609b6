#include "gl3lab/error_term.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gl3lab/error.hpp"
#include "gl3lab/parallel.hpp"
#include "gl3lab/summation.hpp"

namespace gl3lab {

namespace {

// Regenerate with scripts/regen_main_term.py.
constexpr double kD3MainC2 = 0.5;
constexpr double kD3MainC1 = 0.731646994704598581819536270247;
constexpr double kD3MainC0 = 0.486334313169587615717351266443;

// Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {
    0.0, -0.5384693101056830910363144, 0.5384693101056830910363144,
    -0.9061798459386639927976269, 0.9061798459386639927976269};
constexpr std::array<double, 5> kGaussWeights = {
    0.5688888888888888888888889, 0.4786286704993664680412915, 0.4786286704993664680412915,
    0.2369268850561890875142640, 0.2369268850561890875142640};

void require_in_range(const ErrorTermSeries& series, double x, const char* what) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(what) + ": x must be nonnegative, got " + std::to_string(x));
  }
  if (x > static_cast<double>(series.size())) {
    throw RangeError(std::string(what) + ": x = " + std::to_string(x) +
                     " exceeds table length " + std::to_string(series.size()));
  }
}

}  // namespace

MainTerm main_term_d3_coefficients() { return MainTerm{kD3MainC2, kD3MainC1, kD3MainC0}; }

SeriesConstant series_constant(const CoefficientTable& table, std::uint64_t cutoff) {
  if (cutoff == 0 || cutoff > table.size()) {
    throw RangeError("series_constant: cutoff " + std::to_string(cutoff) +
                     " outside [1, " + std::to_string(table.size()) + "]");
  }
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= cutoff; ++n) {
    const double a = table[n];
    acc += a * a / std::pow(static_cast<double>(n), 4.0 / 3.0);
  }
  return SeriesConstant{acc.value(), cutoff,
                        3.0 * table.rankin_selberg_constant() /
                            std::cbrt(static_cast<double>(cutoff))};
}

ErrorTermSeries::ErrorTermSeries(const CoefficientTable& table)
    : prefix_(table.size() + 1, 0.0),
      main_term_(table.main_term()),
      source_(table.source()),
      provider_(table.provider()) {
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= table.size(); ++n) {
    acc += table[n];
    prefix_[n] = acc.value();
  }
  if (!table.empty()) constant_ = series_constant(table, table.size());
}

ErrorTermSeries build_series(const CoefficientTable& table) { return ErrorTermSeries(table); }

double delta_at(const ErrorTermSeries& series, double x) {
  require_in_range(series, x, "delta_at");
  const double sum = series.prefix(static_cast<std::uint64_t>(std::floor(x)));
  if (series.main_term()) return sum - (*series.main_term())(x);
  return sum;
}

double normalized_F(const ErrorTermSeries& series, double t) {
  if (t < 1.0) throw DomainError("normalized_F: t must be >= 1, got " + std::to_string(t));
  return delta_at(series, t) / std::cbrt(t);
}

MeanSquare mean_square_integral(const ErrorTermSeries& series, double x, unsigned threads) {
  require_in_range(series, x, "mean_square_integral");
  const auto whole = static_cast<std::uint64_t>(std::floor(x));
  const std::uint64_t pieces = whole + (x > static_cast<double>(whole) ? 1 : 0);

  // Piece k covers [k, min(k+1, x)], on which the partial sum is prefix(k).
  auto piece = [&](std::uint64_t k) {
    const double lo = static_cast<double>(k);
    const double hi = std::min(lo + 1.0, x);
    const double len = hi - lo;
    const double s = series.prefix(k);
    if (!series.main_term()) return s * s * len;
    const MainTerm& main = *series.main_term();
    const double mid = 0.5 * (lo + hi);
    double acc = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      const double d = s - main(mid + 0.5 * len * kGaussNodes[i]);
      acc += kGaussWeights[i] * d * d;
    }
    return 0.5 * len * acc;
  };

  constexpr std::uint64_t kBlock = 1 << 14;
  const std::uint64_t blocks = (pieces + kBlock - 1) / kBlock;
  std::vector<CompensatedSum> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const std::uint64_t lo = b * kBlock;
      const std::uint64_t hi = std::min(pieces, lo + kBlock);
      for (std::uint64_t k = lo; k < hi; ++k) partial[b] += piece(k);
    }
  });
  CompensatedSum total;
  for (const auto& p : partial) total += p;

  MeanSquare out;
  out.x = x;
  out.integral = total.value();
  out.predicted = series.constant().value * std::pow(x, 5.0 / 3.0) /
                  (10.0 * std::numbers::pi * std::numbers::pi);
  out.ratio = out.predicted > 0.0 ? out.integral / out.predicted : 0.0;
  return out;
}

}  // namespace gl3lab

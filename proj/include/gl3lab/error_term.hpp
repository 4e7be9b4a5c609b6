#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gl3lab/coeffs.hpp"

namespace gl3lab {

// C_f = sum_{n <= cutoff} a(n)^2 / n^{4/3}, with tail_bound = 3 K cutoff^{-1/3}
// from partial summation against the Rankin-Selberg constant K.
struct SeriesConstant {
  double value = 0.0;
  std::uint64_t cutoff = 0;
  double tail_bound = 0.0;
};

SeriesConstant series_constant(const CoefficientTable& table, std::uint64_t cutoff);

// Coefficients of the residue of zeta(s)^3 x^s / s at s = 1.
MainTerm main_term_d3_coefficients();

// Prefix sums of a coefficient table with the main term (if any) subtracted
// on query. Immutable once built.
class ErrorTermSeries {
 public:
  explicit ErrorTermSeries(const CoefficientTable& table);

  std::uint64_t size() const { return prefix_.size() - 1; }
  // prefix(k) = sum_{n <= k} a(n), k in [0, N].
  double prefix(std::uint64_t k) const { return prefix_[k]; }
  const std::optional<MainTerm>& main_term() const { return main_term_; }
  const std::string& source() const { return source_; }
  Provider provider() const { return provider_; }
  // Series constant evaluated at cutoff N, captured at build time.
  const SeriesConstant& constant() const { return constant_; }

 private:
  std::vector<double> prefix_;
  std::optional<MainTerm> main_term_;
  std::string source_;
  Provider provider_;
  SeriesConstant constant_;
};

ErrorTermSeries build_series(const CoefficientTable& table);

// Delta(x) = sum_{n <= x} a(n) - main(x). Half-integer x avoids the jump
// ambiguity; at an integer the sum includes n = x.
double delta_at(const ErrorTermSeries& series, double x);

// F(t) = t^{-1/3} Delta(t), t in [1, N].
double normalized_F(const ErrorTermSeries& series, double t);

struct MeanSquare {
  double x = 0.0;
  double integral = 0.0;   // int_0^x Delta(y)^2 dy
  double predicted = 0.0;  // C_f x^{5/3} / (10 pi^2)
  double ratio = 0.0;
};

// Exact piecewise-constant integral when the table has no pole; otherwise
// five-point Gauss-Legendre on every unit interval. The interval range is
// split across `threads` workers and recombined in a fixed order.
MeanSquare mean_square_integral(const ErrorTermSeries& series, double x,
                                unsigned threads = 1);

}  // namespace gl3lab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gl3lab {

// Index tuples (n_1..n_h) in [1, M]^h with signs e_j such that
// sum_j e_j n_j^{1/3} = 0. Since cube roots of distinct cube-free integers
// are linearly independent over Q, this holds exactly when, writing
// n_j = k_j r_j^3 with k_j cube-free, sum_{j : k_j = k} e_j r_j = 0 for every
// kernel k. All decisions are made in integer arithmetic.
class DiagonalSystem {
 public:
  DiagonalSystem(unsigned h, std::uint64_t M) : h_(h), M_(M) {}

  unsigned h() const { return h_; }
  std::uint64_t M() const { return M_; }
  std::size_t size() const { return h_ == 0 ? 0 : indices_.size() / h_; }
  std::span<const std::uint64_t> indices(std::size_t s) const {
    return std::span<const std::uint64_t>(indices_).subspan(s * h_, h_);
  }
  std::span<const int> signs(std::size_t s) const {
    return std::span<const int>(signs_).subspan(s * h_, h_);
  }

  void add(std::span<const std::uint64_t> idx, std::span<const int> sgn) {
    indices_.insert(indices_.end(), idx.begin(), idx.end());
    signs_.insert(signs_.end(), sgn.begin(), sgn.end());
  }

 private:
  unsigned h_;
  std::uint64_t M_;
  std::vector<std::uint64_t> indices_;
  std::vector<int> signs_;
};

// Exact test of sum_j signs[j] indices[j]^{1/3} == 0.
bool is_diagonal(std::span<const std::uint64_t> indices, std::span<const int> signs);

// Work guard shared by the enumerating routines: (2M)^h candidate tuples.
inline constexpr double kEnumerationLimit = 1u << 26;

// All solutions in lexicographic order of (indices, signs). Refuses h > 8,
// or more than kEnumerationLimit candidates, with a ResourceError.
DiagonalSystem diagonal_solutions(unsigned h, std::uint64_t M);

struct GapResult {
  long double min_gap = 0.0L;
  long double bound = 0.0L;  // (m M^{1/3})^{-(3^{m-1} - 1)}
  std::vector<std::uint64_t> witness;
  std::vector<int> witness_signs;
};

// Smallest nonzero |sum_{j<=m} e_j n_j^{1/3}| over n_j <= M, in extended
// precision. Guard: m <= 4, M <= 16.
GapResult lemma62_min_gap(unsigned m, std::uint64_t M);

struct TimeAverageOptions {
  double term_limit = 1e7;  // (2M)^h product terms on the exact path
  bool allow_quadrature = false;
};

// (1/T) int_T^{2T} (sum_{m<=M} a_m cos(6 pi alpha0 (m t)^{1/3}))^h dt, with
// coeffs[m - 1] = a_m. The exact path substitutes t = u^3, expands the power
// into cosines cos(2 pi beta u) grouped by their integer kernel signature and
// integrates u^2 cos(2 pi beta u) in closed form.
double time_average_power(std::span<const double> coeffs, double alpha0, unsigned h, double T,
                          const TimeAverageOptions& options = {});

// E[(sum_{m<=M} a_m cos(6 pi r X_k))^h] with m = k r^3 and independent
// uniform X_k per cube-free kernel k. Uses per-kernel exact moments (the
// constant term of a Laurent polynomial power) combined binomially across
// independent kernels.
double model_moment_exact(std::span<const double> coeffs, unsigned h);

// Same expectation by explicit enumeration of diagonal tuples over the
// support of coeffs: 2^{-h} sum over solutions of prod a_{n_j}.
double diagonal_moment(std::span<const double> coeffs, unsigned h);

}  // namespace gl3lab

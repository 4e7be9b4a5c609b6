#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gl3lab {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{8} << 30;

enum class Provider { kDivisor3, kSymSquare, kExternal };

std::string_view to_string(Provider provider);
// Throws ValidationError listing the accepted names.
Provider provider_from_string(std::string_view name);

// main(x) = x (c2 log^2 x + c1 log x + c0).
struct MainTerm {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double x) const;
};

// A sealed, immutable sequence a(1..N) of Hecke-normalised coefficients
// A(n,1). Self-duality A(n,1) = A(1,n) means one sequence serves both.
class CoefficientTable {
 public:
  CoefficientTable(std::vector<double> values, Provider provider,
                   std::optional<MainTerm> main_term, std::string source);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // 1-based access; n must lie in [1, size()].
  double operator[](std::uint64_t n) const { return values_[n - 1]; }
  double at(std::uint64_t n) const;

  // values()[n - 1] holds a(n).
  std::span<const double> values() const { return values_; }

  Provider provider() const { return provider_; }
  bool has_pole() const { return main_term_.has_value(); }
  const std::optional<MainTerm>& main_term() const { return main_term_; }
  const std::string& source() const { return source_; }

  // K with sum_{n<=x} a(n)^2 <= K x, recorded as the largest ratio over
  // x in {N/8, N/4, N/2, N}.
  double rankin_selberg_constant() const { return rankin_selberg_; }

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

 private:
  std::vector<double> values_;
  Provider provider_;
  std::optional<MainTerm> main_term_;
  std::string source_;
  double rankin_selberg_ = 0.0;
  std::vector<std::string> warnings_;
};

// Normalised GL(2) Hecke eigenvalues lambda(1..M).
struct GL2Eigenvalues {
  std::vector<double> lambda;  // lambda[n - 1] = lambda(n)

  std::size_t size() const { return lambda.size(); }
  double operator[](std::uint64_t n) const { return lambda[n - 1]; }
};

// Largest relative violation of lambda(m)lambda(n) = sum_{d|(m,n)}
// lambda(mn/d^2) over mn <= size().
double gl2_hecke_violation(const GL2Eigenvalues& gl2);

// d3(n) for n in [0, N]; entry 0 is unused and zero.
std::vector<std::uint32_t> divisor3_exact(std::uint64_t n_max,
                                          std::size_t memory_budget = kDefaultMemoryBudget);

CoefficientTable sieve_divisor3(std::uint64_t n_max,
                                std::size_t memory_budget = kDefaultMemoryBudget);

// Largest n for which ramanujan_tau() is exact.
inline constexpr std::size_t kTauLimit = 1'000'000;

// tau(n) for n in [0, limit], entry 0 unused. Computed exactly from the
// q-expansion q * prod (1 - q^n)^24 modulo four 30-bit primes and recombined
// by CRT.
std::vector<__int128> ramanujan_tau(std::size_t limit);

// lambda(n) = tau(n) / n^{11/2} for n <= M.
GL2Eigenvalues ramanujan_eigenvalues(std::size_t m);

// Symmetric-square lift by the Dirichlet identity
// L(s, sym^2 f) = zeta(2s) sum lambda(n^2) n^{-s}, i.e.
// a(n) = sum_{d^2 | n} lambda((n/d^2)^2). Needs gl2.size() >= N^2.
CoefficientTable lift_sym_square(const GL2Eigenvalues& gl2, std::uint64_t n_max);

// Same lift from prime eigenvalues only: lambda(p^k) by the Hecke recursion,
// then a(p^k) = sum_j lambda(p^{2k-4j}) and multiplicative extension.
// Needs gl2.size() >= N.
CoefficientTable lift_sym_square_hecke(const GL2Eigenvalues& gl2, std::uint64_t n_max);

// sym^2 lift of the Ramanujan Delta function, N <= kTauLimit.
CoefficientTable sym_square_tau_table(std::uint64_t n_max);

// Text format: "n value" per line, n contiguous from 1, '#' comments, and the
// header comment "# normalization: hecke-unitary" required.
CoefficientTable load_coefficients(const std::filesystem::path& path);
void save_coefficients(const CoefficientTable& table, const std::filesystem::path& path);

// n = kernel * r^3 with kernel cube-free.
struct CubeFreeSplit {
  std::uint64_t kernel = 1;
  std::uint64_t r = 1;
};

CubeFreeSplit cubefree_decompose(std::uint64_t n);
bool is_cube_free(std::uint64_t n);
// Flags for 0..n_max (entry 0 false).
std::vector<bool> cube_free_flags(std::uint64_t n_max);

// A(a, b) for 1 <= a, b <= bound derived from the table by
// A(a,1)A(1,b) = sum_{d | (a,b)} A(a/d, b/d), in order of increasing a*b.
class HeckeMatrix {
 public:
  HeckeMatrix(const CoefficientTable& table, std::uint64_t bound);

  std::uint64_t bound() const { return bound_; }
  double operator()(std::uint64_t a, std::uint64_t b) const {
    return entries_[(a - 1) * bound_ + (b - 1)];
  }

 private:
  std::uint64_t bound_;
  std::vector<double> entries_;
};

struct IdentityCheck {
  std::string identity;
  double max_violation = 0.0;  // |lhs - rhs| / (1 + |lhs|)
  std::uint64_t worst_m1 = 0;
  std::uint64_t worst_m2 = 0;
};

struct HeckeReport {
  std::vector<IdentityCheck> checks;
  double max_violation() const;
};

// Checks, for m1, m2 <= bound:
//   "hecke_pair"          A(m1,1)A(1,m2) = sum_{d|(m1,m2)} A(m1/d, m2/d)
//   "coprime_factorization" A(m1,m2) = prod_p A(p^a, p^b)
//   "self_duality"        A(m1,m2) = A(m2,m1)
//   "hecke_triple"        A(m,1)A(m1,m2) = sum_{c1c2c3=m, c1|m1, c2|m2}
//                         A(m1 c3/c1, m2 c1/c2), where every argument <= bound
HeckeReport hecke_consistency_check(const CoefficientTable& table, std::uint64_t bound);

// sum_{n<=x} a(n)^2 / x for x in {N/8, N/4, N/2, N}.
std::vector<double> rankin_selberg_ratios(const CoefficientTable& table);

// S(x) = sum_{r<=x, n r^3 <= N} a(n r^3) for x = 1..floor((N/n)^{1/3}).
std::vector<double> kernel_partial_sums(const CoefficientTable& table, std::uint64_t n);

}  // namespace gl3lab

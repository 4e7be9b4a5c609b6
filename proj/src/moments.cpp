#include "gl3lab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/error.hpp"
#include "gl3lab/summation.hpp"

namespace gl3lab {

namespace {

// Kernel slot and cube part of each index in [1, M].
struct KernelMap {
  std::vector<std::uint64_t> kernel_values;  // distinct kernels, ascending
  std::vector<std::size_t> slot;             // slot[m] -> position in kernel_values
  std::vector<int> r;                        // r[m]

  explicit KernelMap(std::uint64_t M) : slot(M + 1, 0), r(M + 1, 0) {
    std::map<std::uint64_t, std::size_t> seen;
    for (std::uint64_t m = 1; m <= M; ++m) {
      const auto split = cubefree_decompose(m);
      seen.emplace(split.kernel, 0);
    }
    std::size_t next = 0;
    for (auto& [k, pos] : seen) {
      pos = next++;
      kernel_values.push_back(k);
    }
    for (std::uint64_t m = 1; m <= M; ++m) {
      const auto split = cubefree_decompose(m);
      slot[m] = seen[split.kernel];
      r[m] = static_cast<int>(split.r);
    }
  }
};

void guard_enumeration(unsigned h, double support, const char* what) {
  if (h > 8 || std::pow(2.0 * support, static_cast<double>(h)) > kEnumerationLimit) {
    throw ResourceError(std::string(what) + ": enumeration of (2M)^h = (2*" +
                        std::to_string(static_cast<unsigned long long>(support)) + ")^" +
                        std::to_string(h) +
                        " tuples exceeds the guard; use the Monte Carlo path in random_model");
  }
}

// Depth-first enumeration over `support` with running per-kernel sums.
template <typename Visit>
void enumerate_diagonal(unsigned h, std::span<const std::uint64_t> support, const KernelMap& km,
                        Visit&& visit) {
  std::vector<std::uint64_t> idx(h);
  std::vector<int> sgn(h);
  std::vector<int> sums(km.kernel_values.size(), 0);
  int nonzero = 0;
  auto rec = [&](auto&& self, unsigned depth) -> void {
    if (depth == h) {
      if (nonzero == 0) visit(std::span<const std::uint64_t>(idx), std::span<const int>(sgn));
      return;
    }
    for (std::uint64_t m : support) {
      for (int s : {-1, 1}) {
        const std::size_t k = km.slot[m];
        const int before = sums[k];
        sums[k] += s * km.r[m];
        nonzero += (sums[k] != 0) - (before != 0);
        idx[depth] = m;
        sgn[depth] = s;
        self(self, depth + 1);
        nonzero -= (sums[k] != 0) - (before != 0);
        sums[k] = before;
      }
    }
  };
  rec(rec, 0);
}

// int_a^b u^2 cos(k u) du in extended precision.
long double integral_u2_cos(long double k, long double a, long double b) {
  if (k == 0.0L) return (b * b * b - a * a * a) / 3.0L;
  if (std::fabs(k) * b < 1.0L) {
    // Taylor series of cos; converges to full precision in a few dozen terms.
    long double total = 0.0L;
    long double coeff = 1.0L;  // (-1)^j k^{2j} / (2j)!
    long double pa = a * a * a;
    long double pb = b * b * b;
    for (int j = 0; j < 60; ++j) {
      const long double term = coeff * (pb - pa) / static_cast<long double>(2 * j + 3);
      total += term;
      if (std::fabs(term) < 1e-22L * std::fabs(total)) break;
      coeff *= -k * k / static_cast<long double>((2 * j + 1) * (2 * j + 2));
      pa *= a * a;
      pb *= b * b;
    }
    return total;
  }
  auto anti = [k](long double u) {
    const long double s = std::sin(k * u);
    const long double c = std::cos(k * u);
    return u * u * s / k + 2.0L * u * c / (k * k) - 2.0L * s / (k * k * k);
  };
  return anti(b) - anti(a);
}

// Constant term of (sum_r b_r (z^r + z^{-r}) / 2)^j for j = 0..h.
std::vector<double> kernel_moments(std::span<const double> b, unsigned h) {
  const std::size_t R = b.size();
  std::vector<double> out(h + 1, 0.0);
  out[0] = 1.0;
  std::vector<double> poly(1, 1.0);  // coefficients of z^{-deg..deg}
  std::size_t deg = 0;
  for (unsigned j = 1; j <= h; ++j) {
    const std::size_t nd = deg + R;
    std::vector<double> next(2 * nd + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (poly[i] == 0.0) continue;
      const long e = static_cast<long>(i) - static_cast<long>(deg);
      for (std::size_t r = 1; r <= R; ++r) {
        const double half = 0.5 * b[r - 1] * poly[i];
        next[static_cast<std::size_t>(e + static_cast<long>(r) + static_cast<long>(nd))] += half;
        next[static_cast<std::size_t>(e - static_cast<long>(r) + static_cast<long>(nd))] += half;
      }
    }
    poly = std::move(next);
    deg = nd;
    out[j] = poly[deg];
  }
  return out;
}

}  // namespace

bool is_diagonal(std::span<const std::uint64_t> indices, std::span<const int> signs) {
  std::map<std::uint64_t, long long> sums;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto split = cubefree_decompose(indices[j]);
    sums[split.kernel] += signs[j] * static_cast<long long>(split.r);
  }
  return std::all_of(sums.begin(), sums.end(), [](const auto& kv) { return kv.second == 0; });
}

DiagonalSystem diagonal_solutions(unsigned h, std::uint64_t M) {
  if (h == 0 || M == 0) throw DomainError("diagonal_solutions: h and M must be positive");
  guard_enumeration(h, static_cast<double>(M), "diagonal_solutions");
  const KernelMap km(M);
  std::vector<std::uint64_t> support(M);
  for (std::uint64_t m = 1; m <= M; ++m) support[m - 1] = m;
  DiagonalSystem system(h, M);
  // The loop order visits signs -1 before +1 at each depth, which is
  // lexicographic in (index, sign).
  enumerate_diagonal(h, support, km, [&](auto idx, auto sgn) { system.add(idx, sgn); });
  return system;
}

GapResult lemma62_min_gap(unsigned m, std::uint64_t M) {
  if (m == 0 || M == 0) throw DomainError("lemma62_min_gap: m and M must be positive");
  if (m > 4 || M > 16) {
    throw ResourceError("lemma62_min_gap: enumeration guard is m <= 4, M <= 16; got m = " +
                        std::to_string(m) + ", M = " + std::to_string(M));
  }
  GapResult result;
  result.min_gap = std::numeric_limits<long double>::infinity();
  const long double exponent = std::pow(3.0L, static_cast<long double>(m - 1)) - 1.0L;
  result.bound = std::pow(static_cast<long double>(m) * std::cbrt(static_cast<long double>(M)),
                          -exponent);

  std::vector<long double> roots(M + 1);
  for (std::uint64_t n = 1; n <= M; ++n) roots[n] = std::cbrt(static_cast<long double>(n));

  // Nondecreasing index tuples cover every multiset; all 2^m sign patterns.
  std::vector<std::uint64_t> idx(m, 1);
  std::vector<int> sgn(m);
  while (true) {
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      long double sum = 0.0L;
      for (unsigned j = 0; j < m; ++j) {
        sgn[j] = (mask >> j & 1u) ? -1 : 1;
        sum += sgn[j] * roots[idx[j]];
      }
      if (is_diagonal(idx, sgn)) continue;
      const long double gap = std::fabs(sum);
      if (gap < result.min_gap) {
        result.min_gap = gap;
        result.witness = idx;
        result.witness_signs = sgn;
      }
    }
    int pos = static_cast<int>(m) - 1;
    while (pos >= 0 && idx[pos] == M) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (unsigned j = pos + 1; j < m; ++j) idx[j] = idx[pos];
  }
  return result;
}

double time_average_power(std::span<const double> coeffs, double alpha0, unsigned h, double T,
                          const TimeAverageOptions& options) {
  if (alpha0 == 0.0) throw DomainError("time_average_power: alpha0 must be nonzero");
  if (!(T > 0.0)) throw DomainError("time_average_power: T must be positive");
  if (h == 0) return 1.0;
  const long double scale = std::fabs(static_cast<long double>(alpha0));
  const std::uint64_t M = coeffs.size();
  if (M == 0) return 0.0;

  const long double lo = std::cbrt(static_cast<long double>(T));
  const long double hi = std::cbrt(2.0L * static_cast<long double>(T));
  const double terms = std::pow(2.0 * static_cast<double>(M), static_cast<double>(h));

  if (terms > options.term_limit) {
    if (!options.allow_quadrature) {
      throw ResourceError("time_average_power: (2M)^h = " + std::to_string(terms) +
                          " product terms exceed the limit; enable quadrature fallback");
    }
    std::vector<double> freq(M);
    for (std::uint64_t m = 1; m <= M; ++m) {
      freq[m - 1] = static_cast<double>(2.0L * std::numbers::pi_v<long double> * 3.0L * scale *
                                        std::cbrt(static_cast<long double>(m)));
    }
    auto f = [&](double u) {
      double s = 0.0;
      for (std::uint64_t m = 0; m < M; ++m) s += coeffs[m] * std::cos(freq[m] * u);
      return 3.0 * u * u * std::pow(s, static_cast<double>(h));
    };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, static_cast<double>(lo), static_cast<double>(hi), 30, 1e-9, &error);
    return value / T;
  }

  const KernelMap km(M);
  std::vector<std::uint64_t> support;
  for (std::uint64_t m = 1; m <= M; ++m) {
    if (coeffs[m - 1] != 0.0) support.push_back(m);
  }
  if (support.empty()) return 0.0;

  // Group product terms by their per-kernel signature sum_j e_j r_j. The
  // first sign is fixed to +1 and the total doubled (cos is even).
  std::map<std::vector<int>, long double> groups;
  std::vector<int> sums(km.kernel_values.size(), 0);
  auto rec = [&](auto&& self, unsigned depth, long double weight) -> void {
    if (depth == h) {
      groups[sums] += weight;
      return;
    }
    for (std::uint64_t m : support) {
      for (int s : {1, -1}) {
        if (depth == 0 && s < 0) continue;
        sums[km.slot[m]] += s * km.r[m];
        self(self, depth + 1, weight * coeffs[m - 1]);
        sums[km.slot[m]] -= s * km.r[m];
      }
    }
  };
  rec(rec, 0, 1.0L);

  const long double norm = 2.0L / std::pow(2.0L, static_cast<long double>(h));
  const long double window = 3.0L / static_cast<long double>(T);
  CompensatedSum total;
  for (const auto& [signature, weight] : groups) {
    long double beta = 0.0L;
    bool diagonal = true;
    for (std::size_t k = 0; k < signature.size(); ++k) {
      if (signature[k] == 0) continue;
      diagonal = false;
      beta += signature[k] * std::cbrt(static_cast<long double>(km.kernel_values[k]));
    }
    long double average = 1.0L;
    if (!diagonal) {
      const long double freq = 2.0L * std::numbers::pi_v<long double> * 3.0L * scale * beta;
      average = window * integral_u2_cos(freq, lo, hi);
    }
    total += static_cast<double>(norm * weight * average);
  }
  return total.value();
}

double model_moment_exact(std::span<const double> coeffs, unsigned h) {
  const std::uint64_t M = coeffs.size();
  std::vector<double> total(h + 1, 0.0);
  total[0] = 1.0;
  if (M == 0) return h == 0 ? 1.0 : 0.0;

  // Binomial table.
  std::vector<std::vector<double>> binom(h + 1, std::vector<double>(h + 1, 0.0));
  for (unsigned n = 0; n <= h; ++n) {
    binom[n][0] = 1.0;
    for (unsigned k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
  }

  const auto flags = cube_free_flags(M);
  for (std::uint64_t kernel = 1; kernel <= M; ++kernel) {
    if (!flags[kernel]) continue;
    std::vector<double> b;
    bool any = false;
    for (std::uint64_t r = 1; kernel * r * r * r <= M; ++r) {
      b.push_back(coeffs[kernel * r * r * r - 1]);
      any = any || b.back() != 0.0;
    }
    if (!any) continue;
    const auto mu = kernel_moments(b, h);
    std::vector<double> next(h + 1, 0.0);
    for (unsigned j = 0; j <= h; ++j) {
      for (unsigned i = 0; i <= j; ++i) next[j] += binom[j][i] * total[i] * mu[j - i];
    }
    total = std::move(next);
  }
  return total[h];
}

double diagonal_moment(std::span<const double> coeffs, unsigned h) {
  if (h == 0) return 1.0;
  const std::uint64_t M = coeffs.size();
  std::vector<std::uint64_t> support;
  for (std::uint64_t m = 1; m <= M; ++m) {
    if (coeffs[m - 1] != 0.0) support.push_back(m);
  }
  if (support.empty()) return 0.0;
  guard_enumeration(h, static_cast<double>(support.size()), "diagonal_moment");
  const KernelMap km(M);
  CompensatedSum acc;
  enumerate_diagonal(h, support, km, [&](auto idx, auto) {
    double prod = 1.0;
    for (auto m : idx) prod *= coeffs[m - 1];
    acc += prod;
  });
  return acc.value() / std::pow(2.0, static_cast<double>(h));
}

}  // namespace gl3lab

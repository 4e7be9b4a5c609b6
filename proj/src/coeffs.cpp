#include "gl3lab/coeffs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <new>
#include <numeric>
#include <sstream>

#include "gl3lab/error.hpp"
#include "gl3lab/error_term.hpp"

namespace gl3lab {

namespace {

std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  while (r > 0 && r * r * r > n) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

double rankin_selberg_max(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  double best = 0.0;
  for (std::size_t div : {8u, 4u, 2u, 1u}) {
    const std::size_t x = n / div;
    if (x == 0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < x; ++i) s += values[i] * values[i];
    best = std::max(best, s / static_cast<double>(x));
  }
  return best;
}

void check_budget(std::uint64_t n_max, std::size_t bytes_per_entry,
                  std::size_t budget, const char* what) {
  const long double requested =
      static_cast<long double>(n_max + 1) * static_cast<long double>(bytes_per_entry);
  if (requested > static_cast<long double>(budget)) {
    std::ostringstream msg;
    msg << what << ": requested " << static_cast<unsigned long long>(requested)
        << " bytes for N = " << n_max << " exceeds memory budget of " << budget
        << " bytes";
    throw ResourceError(msg.str());
  }
}

// Smallest prime factor for 0..n.
std::vector<std::uint32_t> smallest_prime_factors(std::uint64_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::uint64_t j = i; j <= n; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

}  // namespace

std::string_view to_string(Provider provider) {
  switch (provider) {
    case Provider::kDivisor3:
      return "divisor3";
    case Provider::kSymSquare:
      return "sym_square";
    case Provider::kExternal:
      return "external";
  }
  return "unknown";
}

Provider provider_from_string(std::string_view name) {
  if (name == "divisor3") return Provider::kDivisor3;
  if (name == "sym_square") return Provider::kSymSquare;
  if (name == "external") return Provider::kExternal;
  throw ValidationError("unknown provider '" + std::string(name) +
                        "'; allowed values: divisor3, sym_square, external");
}

double MainTerm::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  const double l = std::log(x);
  return x * ((c2 * l + c1) * l + c0);
}

CoefficientTable::CoefficientTable(std::vector<double> values, Provider provider,
                                   std::optional<MainTerm> main_term,
                                   std::string source)
    : values_(std::move(values)),
      provider_(provider),
      main_term_(main_term),
      source_(std::move(source)) {
  rankin_selberg_ = rankin_selberg_max(values_);
}

double CoefficientTable::at(std::uint64_t n) const {
  if (n == 0 || n > values_.size()) {
    throw RangeError("coefficient index " + std::to_string(n) +
                     " outside table of length " + std::to_string(values_.size()));
  }
  return values_[n - 1];
}

double gl2_hecke_violation(const GL2Eigenvalues& gl2) {
  const std::uint64_t m_max = gl2.size();
  double worst = 0.0;
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    for (std::uint64_t n = 1; m * n <= m_max; ++n) {
      const std::uint64_t g = std::gcd(m, n);
      double rhs = 0.0;
      for (std::uint64_t d = 1; d <= g; ++d) {
        if (g % d == 0) rhs += gl2[m * n / (d * d)];
      }
      const double lhs = gl2[m] * gl2[n];
      worst = std::max(worst, std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)));
    }
  }
  return worst;
}

std::vector<std::uint32_t> divisor3_exact(std::uint64_t n_max, std::size_t memory_budget) {
  if (n_max == 0) throw DomainError("sieve_divisor3 requires N >= 1");
  check_budget(n_max, 2 * sizeof(std::uint32_t) + sizeof(double), memory_budget,
               "sieve_divisor3");
  try {
    // d = 1 * 1, then d3 = 1 * d.
    std::vector<std::uint32_t> d(n_max + 1, 0);
    for (std::uint64_t a = 1; a <= n_max; ++a) {
      for (std::uint64_t m = a; m <= n_max; m += a) ++d[m];
    }
    std::vector<std::uint32_t> d3(n_max + 1, 0);
    for (std::uint64_t a = 1; a <= n_max; ++a) {
      for (std::uint64_t k = 1, m = a; m <= n_max; ++k, m += a) d3[m] += d[k];
    }
    return d3;
  } catch (const std::bad_alloc&) {
    throw ResourceError("sieve_divisor3: allocation of " +
                        std::to_string((n_max + 1) * 2 * sizeof(std::uint32_t)) +
                        " bytes failed");
  }
}

CoefficientTable sieve_divisor3(std::uint64_t n_max, std::size_t memory_budget) {
  const auto exact = divisor3_exact(n_max, memory_budget);
  std::vector<double> values(exact.begin() + 1, exact.end());
  return CoefficientTable(std::move(values), Provider::kDivisor3,
                          main_term_d3_coefficients(),
                          "divisor3(N=" + std::to_string(n_max) + ")");
}

CoefficientTable lift_sym_square(const GL2Eigenvalues& gl2, std::uint64_t n_max) {
  if (n_max == 0) throw DomainError("lift_sym_square requires N >= 1");
  const long double need = static_cast<long double>(n_max) * n_max;
  if (static_cast<long double>(gl2.size()) < need) {
    throw DimensionError("lift_sym_square: GL(2) eigenvalue table has length " +
                         std::to_string(gl2.size()) + ", required length N^2 = " +
                         std::to_string(n_max * n_max));
  }
  std::vector<double> values(n_max, 0.0);
  for (std::uint64_t d = 1; d * d <= n_max; ++d) {
    const std::uint64_t d2 = d * d;
    for (std::uint64_t m = 1; m * d2 <= n_max; ++m) values[m * d2 - 1] += gl2[m * m];
  }
  return CoefficientTable(std::move(values), Provider::kSymSquare, std::nullopt,
                          "sym_square(direct, N=" + std::to_string(n_max) + ")");
}

CoefficientTable lift_sym_square_hecke(const GL2Eigenvalues& gl2, std::uint64_t n_max) {
  if (n_max == 0) throw DomainError("lift_sym_square requires N >= 1");
  if (gl2.size() < n_max) {
    throw DimensionError("lift_sym_square_hecke: GL(2) eigenvalue table has length " +
                         std::to_string(gl2.size()) + ", required length N = " +
                         std::to_string(n_max));
  }
  const auto spf = smallest_prime_factors(n_max);
  std::vector<double> values(n_max, 0.0);
  values[0] = 1.0;
  std::vector<double> lam;  // lambda(p^j)
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    const std::uint64_t p = spf[n];
    std::uint64_t rest = n;
    int k = 0;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    const double lp = gl2[p];
    lam.assign(2 * k + 1, 0.0);
    lam[0] = 1.0;
    lam[1] = lp;
    for (int j = 1; j < 2 * k; ++j) lam[j + 1] = lp * lam[j] - lam[j - 1];
    double apk = 0.0;
    for (int j = 0; 2 * j <= k; ++j) apk += lam[2 * k - 4 * j];
    values[n - 1] = apk * values[rest - 1];
  }
  return CoefficientTable(std::move(values), Provider::kSymSquare, std::nullopt,
                          "sym_square(hecke, N=" + std::to_string(n_max) + ")");
}

CoefficientTable sym_square_tau_table(std::uint64_t n_max) {
  if (n_max > kTauLimit) {
    throw ResourceError("sym_square_tau_table: N = " + std::to_string(n_max) +
                        " exceeds the exact tau range " + std::to_string(kTauLimit) +
                        "; supply prime eigenvalues through an external table");
  }
  const auto gl2 = ramanujan_eigenvalues(std::max<std::uint64_t>(n_max, 1));
  return lift_sym_square_hecke(gl2, n_max);
}

CoefficientTable load_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open coefficient file " + path.string());
  std::vector<double> values;
  bool normalization = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::string body = line.substr(first + 1);
      body.erase(0, body.find_first_not_of(" \t"));
      if (body.rfind("normalization:", 0) == 0) {
        std::string value = body.substr(14);
        value.erase(0, value.find_first_not_of(" \t"));
        value.erase(value.find_last_not_of(" \t") + 1);
        if (value != "hecke-unitary") {
          throw FormatError(path.string() + ":" + std::to_string(line_no) +
                            ": unsupported normalization '" + value + "'");
        }
        normalization = true;
      }
      continue;
    }
    std::istringstream fields(line);
    std::string index_text;
    std::string value_text;
    std::string extra;
    fields >> index_text >> value_text;
    if (value_text.empty() || (fields >> extra)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'n value', got '" + line + "'");
    }
    std::uint64_t index = 0;
    const auto [iptr, iec] =
        std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
    if (iec != std::errc{} || iptr != index_text.data() + index_text.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": invalid index '" + index_text + "'");
    }
    double value = 0.0;
    const auto [vptr, vec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (vec != std::errc{} || vptr != value_text.data() + value_text.size() ||
        !std::isfinite(value)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": invalid value '" + value_text + "'");
    }
    if (values.empty() && index != 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": index must start at 1");
    }
    if (index != values.size() + 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": non-contiguous index " + std::to_string(index) + ", expected " +
                        std::to_string(values.size() + 1));
    }
    values.push_back(value);
  }
  if (values.empty()) throw FormatError(path.string() + ": empty coefficient file");
  if (!normalization) {
    throw FormatError(path.string() +
                      ": missing header comment '# normalization: hecke-unitary'");
  }

  CoefficientTable table(std::move(values), Provider::kExternal, std::nullopt,
                         "external(" + path.string() + ")");
  if (std::fabs(table[1] - 1.0) > 1e-12) {
    table.add_warning("a(1) = " + std::to_string(table[1]) +
                      " differs from the Hecke normalisation a(1) = 1");
  }
  const auto ratios = rankin_selberg_ratios(table);
  if (ratios.size() == 4 && ratios.front() > 0.0 && ratios.back() > 4.0 * ratios.front()) {
    table.add_warning("Rankin-Selberg ratio grows from " + std::to_string(ratios.front()) +
                      " at N/8 to " + std::to_string(ratios.back()) + " at N");
  }
  return table;
}

void save_coefficients(const CoefficientTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write coefficient file " + path.string());
  out << "# normalization: hecke-unitary\n";
  out << "# provider: " << to_string(table.provider()) << "\n";
  out << "# source: " << table.source() << "\n";
  std::array<char, 64> buf{};
  for (std::size_t n = 1; n <= table.size(); ++n) {
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), table[n]);
    out << n << ' ' << std::string_view(buf.data(), res.ptr - buf.data()) << '\n';
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

CubeFreeSplit cubefree_decompose(std::uint64_t n) {
  if (n == 0) throw DomainError("cubefree_decompose requires n >= 1");
  CubeFreeSplit split{n, 1};
  for (std::uint64_t p = 2; p * p * p <= split.kernel; ++p) {
    const std::uint64_t cube = p * p * p;
    while (split.kernel % cube == 0) {
      split.kernel /= cube;
      split.r *= p;
    }
  }
  return split;
}

bool is_cube_free(std::uint64_t n) { return cubefree_decompose(n).r == 1; }

std::vector<bool> cube_free_flags(std::uint64_t n_max) {
  std::vector<bool> flags(n_max + 1, true);
  flags[0] = false;
  for (std::uint64_t p = 2; p * p * p <= n_max; ++p) {
    const std::uint64_t cube = p * p * p;
    for (std::uint64_t m = cube; m <= n_max; m += cube) flags[m] = false;
  }
  return flags;
}

HeckeMatrix::HeckeMatrix(const CoefficientTable& table, std::uint64_t bound)
    : bound_(bound), entries_(bound * bound, 0.0) {
  if (bound == 0) throw DomainError("hecke bound must be positive");
  if (bound > table.size()) {
    throw DimensionError("hecke_consistency_check: bound " + std::to_string(bound) +
                         " exceeds table length " + std::to_string(table.size()));
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> order;
  order.reserve(bound * bound);
  for (std::uint64_t a = 1; a <= bound; ++a) {
    for (std::uint64_t b = 1; b <= bound; ++b) order.emplace_back(a, b);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    return x.first * x.second < y.first * y.second;
  });
  auto at = [&](std::uint64_t a, std::uint64_t b) -> double& {
    return entries_[(a - 1) * bound_ + (b - 1)];
  };
  for (const auto& [a, b] : order) {
    const std::uint64_t g = std::gcd(a, b);
    double value = table[a] * table[b];
    for (std::uint64_t d = 2; d <= g; ++d) {
      if (g % d == 0) value -= at(a / d, b / d);
    }
    at(a, b) = value;
  }
}

double HeckeReport::max_violation() const {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.max_violation);
  return worst;
}

HeckeReport hecke_consistency_check(const CoefficientTable& table, std::uint64_t bound) {
  const HeckeMatrix a(table, bound);
  auto record = [](IdentityCheck& check, double lhs, double rhs, std::uint64_t m1,
                   std::uint64_t m2) {
    const double v = std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs));
    if (v > check.max_violation || check.worst_m1 == 0) {
      check.max_violation = v;
      check.worst_m1 = m1;
      check.worst_m2 = m2;
    }
  };

  IdentityCheck pair{"hecke_pair"};
  IdentityCheck factor{"coprime_factorization"};
  IdentityCheck dual{"self_duality"};
  IdentityCheck triple{"hecke_triple"};

  for (std::uint64_t m1 = 1; m1 <= bound; ++m1) {
    for (std::uint64_t m2 = 1; m2 <= bound; ++m2) {
      const std::uint64_t g = std::gcd(m1, m2);
      double rhs = 0.0;
      for (std::uint64_t d = 1; d <= g; ++d) {
        if (g % d == 0) rhs += a(m1 / d, m2 / d);
      }
      record(pair, table[m1] * table[m2], rhs, m1, m2);

      double product = 1.0;
      std::uint64_t x = m1;
      std::uint64_t y = m2;
      for (std::uint64_t p = 2; x > 1 || y > 1; ++p) {
        std::uint64_t px = 1;
        std::uint64_t py = 1;
        while (x % p == 0) {
          x /= p;
          px *= p;
        }
        while (y % p == 0) {
          y /= p;
          py *= p;
        }
        if (px > 1 || py > 1) product *= a(px, py);
      }
      record(factor, a(m1, m2), product, m1, m2);
      record(dual, a(m1, m2), a(m2, m1), m1, m2);
    }
  }

  for (std::uint64_t m = 1; m <= bound; ++m) {
    for (std::uint64_t m1 = 1; m * m1 <= bound; ++m1) {
      for (std::uint64_t m2 = 1; m * m2 <= bound; ++m2) {
        double rhs = 0.0;
        for (std::uint64_t c1 = 1; c1 <= m; ++c1) {
          if (m % c1 != 0 || m1 % c1 != 0) continue;
          for (std::uint64_t c2 = 1; c2 <= m / c1; ++c2) {
            if ((m / c1) % c2 != 0 || m2 % c2 != 0) continue;
            const std::uint64_t c3 = m / (c1 * c2);
            rhs += a(m1 * c3 / c1, m2 * c1 / c2);
          }
        }
        record(triple, table[m] * a(m1, m2), rhs, m1, m2);
      }
    }
  }

  return HeckeReport{{pair, factor, dual, triple}};
}

std::vector<double> rankin_selberg_ratios(const CoefficientTable& table) {
  std::vector<double> ratios;
  const std::size_t n = table.size();
  double s = 0.0;
  std::size_t done = 0;
  for (std::size_t div : {8u, 4u, 2u, 1u}) {
    const std::size_t x = n / div;
    if (x == 0) continue;
    for (; done < x; ++done) s += table.values()[done] * table.values()[done];
    ratios.push_back(s / static_cast<double>(x));
  }
  return ratios;
}

std::vector<double> kernel_partial_sums(const CoefficientTable& table, std::uint64_t n) {
  if (n == 0) throw DomainError("kernel index must be positive");
  const std::uint64_t rmax = icbrt(table.size() / n);
  std::vector<double> sums;
  sums.reserve(rmax);
  double s = 0.0;
  for (std::uint64_t r = 1; r <= rmax; ++r) {
    s += table[n * r * r * r];
    sums.push_back(s);
  }
  return sums;
}

}  // namespace gl3lab

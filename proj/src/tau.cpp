#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "gl3lab/coeffs.hpp"
#include "gl3lab/error.hpp"

namespace gl3lab {

namespace {

// Product ~2^120. |tau(n)| <= d(n) n^{11/2} < 2^118 for n <= 10^6, so the
// symmetric residue recovers tau(n) exactly.
constexpr std::array<std::uint64_t, 4> kPrimes = {1073741723, 1073741741, 1073741783,
                                                  1073741789};

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::vector<__int128> ramanujan_tau(std::size_t limit) {
  if (limit > kTauLimit) {
    throw ResourceError("ramanujan_tau: limit " + std::to_string(limit) +
                        " exceeds exact range " + std::to_string(kTauLimit));
  }
  std::vector<__int128> tau(limit + 1, 0);
  if (limit == 0) return tau;

  // Delta = q P(q)^8 with P = prod (1-q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}.
  // For F = P^8 and P(0) = 1: n F_n = sum_{j>=1} (9j - n) P_j F_{n-j}.
  const std::size_t len = limit;  // F_0 .. F_{limit-1}
  constexpr std::size_t kLanes = kPrimes.size();
  std::vector<std::uint64_t> tri;
  std::vector<std::uint64_t> g0;  // P_j mod p, interleaved by lane
  std::vector<std::uint64_t> g1;  // 9 j P_j mod p
  for (std::uint64_t k = 1;; ++k) {
    const std::uint64_t j = k * (k + 1) / 2;
    if (j >= len) break;
    tri.push_back(j);
    const std::int64_t pj = (k % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(2 * k + 1);
    for (std::size_t l = 0; l < kLanes; ++l) {
      const auto p = static_cast<std::int64_t>(kPrimes[l]);
      std::int64_t a = pj % p;
      if (a < 0) a += p;
      std::int64_t b = (9 * static_cast<std::int64_t>(j) % p) * a % p;
      g0.push_back(static_cast<std::uint64_t>(a));
      g1.push_back(static_cast<std::uint64_t>(b));
    }
  }

  std::vector<std::uint32_t> inv(len * kLanes, 0);
  for (std::size_t l = 0; l < kLanes; ++l) {
    const std::uint64_t p = kPrimes[l];
    if (len > 1) inv[1 * kLanes + l] = 1;
    for (std::uint64_t i = 2; i < len; ++i) {
      inv[i * kLanes + l] =
          static_cast<std::uint32_t>((p - (p / i) * inv[(p % i) * kLanes + l] % p) % p);
    }
  }

  std::vector<std::uint32_t> f(len * kLanes, 0);
  for (std::size_t l = 0; l < kLanes; ++l) f[l] = 1;
  for (std::uint64_t n = 1; n < len; ++n) {
    std::array<std::uint64_t, kLanes> a{};
    std::array<std::uint64_t, kLanes> b{};
    int pending = 0;
    for (std::size_t k = 0; k < tri.size() && tri[k] <= n; ++k) {
      const std::uint32_t* fp = &f[(n - tri[k]) * kLanes];
      const std::uint64_t* p0 = &g0[k * kLanes];
      const std::uint64_t* p1 = &g1[k * kLanes];
      for (std::size_t l = 0; l < kLanes; ++l) {
        a[l] += p1[l] * fp[l];
        b[l] += p0[l] * fp[l];
      }
      if (++pending == 7) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          a[l] %= kPrimes[l];
          b[l] %= kPrimes[l];
        }
        pending = 0;
      }
    }
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::uint64_t p = kPrimes[l];
      const std::uint64_t av = a[l] % p;
      const std::uint64_t nb = (n % p) * (b[l] % p) % p;
      const std::uint64_t num = (av + p - nb) % p;
      f[n * kLanes + l] = static_cast<std::uint32_t>(num * inv[n * kLanes + l] % p);
    }
  }

  // Garner recombination.
  std::array<std::array<std::uint64_t, kLanes>, kLanes> inverse{};
  for (std::size_t i = 0; i < kLanes; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      inverse[j][i] = pow_mod(kPrimes[j] % kPrimes[i], kPrimes[i] - 2, kPrimes[i]);
    }
  }
  unsigned __int128 modulus = 1;
  for (auto p : kPrimes) modulus *= p;
  for (std::size_t n = 0; n < len; ++n) {
    std::array<std::uint64_t, kLanes> digit{};
    for (std::size_t i = 0; i < kLanes; ++i) {
      std::uint64_t x = f[n * kLanes + i];
      for (std::size_t j = 0; j < i; ++j) {
        x = (x + kPrimes[i] - digit[j] % kPrimes[i]) % kPrimes[i];
        x = x * inverse[j][i] % kPrimes[i];
      }
      digit[i] = x;
    }
    unsigned __int128 value = 0;
    unsigned __int128 radix = 1;
    for (std::size_t i = 0; i < kLanes; ++i) {
      value += radix * digit[i];
      radix *= kPrimes[i];
    }
    __int128 signed_value = value > modulus / 2
                                ? -static_cast<__int128>(modulus - value)
                                : static_cast<__int128>(value);
    tau[n + 1] = signed_value;
  }
  return tau;
}

GL2Eigenvalues ramanujan_eigenvalues(std::size_t m) {
  // The tau recursion costs seconds at 10^6; keep the longest table built so
  // far and serve shorter requests from its prefix.
  static std::mutex mutex;
  static std::vector<double> cache;
  std::lock_guard lock(mutex);
  if (cache.size() < m) {
    const auto tau = ramanujan_tau(m);
    cache.resize(m);
    for (std::size_t n = 1; n <= m; ++n) {
      const long double t = static_cast<long double>(tau[n]);
      cache[n - 1] = static_cast<double>(t / std::pow(static_cast<long double>(n), 5.5L));
    }
  }
  return GL2Eigenvalues{std::vector<double>(cache.begin(), cache.begin() + m)};
}

}  // namespace gl3lab

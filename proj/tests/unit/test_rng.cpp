#include "doctest.h"

#include <set>

#include "gl3lab/rng.hpp"

using gl3lab::Philox4x32;

TEST_CASE("philox known-answer vectors") {
  // Reference outputs of the Random123 distribution (kat_vectors).
  auto zero = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  auto pi = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("keyed uniforms are pure functions of their key") {
  CHECK(gl3lab::keyed_uniform(7, 3, 11) == gl3lab::keyed_uniform(7, 3, 11));
  std::set<double> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = gl3lab::keyed_uniform(42, i, 5);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    seen.insert(u);
  }
  CHECK(seen.size() == 1000);
  CHECK(gl3lab::keyed_uniform(1, 0, 0) != gl3lab::keyed_uniform(2, 0, 0));
  CHECK(gl3lab::keyed_uniform(1, 0, 0) != gl3lab::keyed_uniform(1, 0, 1));
}

TEST_CASE("keyed uniforms have the moments of U(0,1)") {
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = gl3lab::keyed_uniform(99, static_cast<std::uint64_t>(i), 1);
    s += u;
    s2 += u * u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.005));
}

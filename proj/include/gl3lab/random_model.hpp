#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gl3lab/coeffs.hpp"

namespace gl3lab {

// The truncated random series
//   F = sum_{n <= N_model, n cube-free} sum_{r <= R_model} w(n, r) cos(6 pi r X_n),
//   w(n, r) = a(n r^3) / (pi sqrt 3 n^{2/3} r^2),
// with one independent uniform phase X_n per kernel shared by all harmonics.
class TruncatedModel {
 public:
  TruncatedModel(std::vector<std::uint64_t> kernels, std::uint64_t r_model,
                 std::vector<double> coefficients, std::uint64_t n_model,
                 Provider provider, std::string source);

  std::uint64_t n_model() const { return n_model_; }
  std::uint64_t r_model() const { return r_model_; }
  Provider provider() const { return provider_; }
  const std::string& source() const { return source_; }

  std::span<const std::uint64_t> kernels() const { return kernels_; }
  // w(kernels()[i], r) for r = 1..R_model.
  std::span<const double> weights(std::size_t i) const {
    return std::span<const double>(weights_).subspan(i * r_model_, r_model_);
  }
  // a(kernels()[i] r^3) for r = 1..R_model.
  std::span<const double> coefficients(std::size_t i) const {
    return std::span<const double>(coefficients_).subspan(i * r_model_, r_model_);
  }

 private:
  std::vector<std::uint64_t> kernels_;
  std::uint64_t r_model_;
  std::vector<double> coefficients_;
  std::vector<double> weights_;
  std::uint64_t n_model_;
  Provider provider_;
  std::string source_;
};

// r_model = 0 selects floor((N / N_model)^{1/3}).
TruncatedModel build_model(const CoefficientTable& table, std::uint64_t n_model,
                           std::uint64_t r_model = 0);

// Coefficients indexed by m = n r^3: out[m - 1] = w(n, r) for every model
// term, zero elsewhere. Length N_model R_model^3.
std::vector<double> index_coefficients(const TruncatedModel& model);

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
};

// Draw i uses X_n = keyed_uniform(seed, i, n) for every kernel n.
SampleBatch sample_batch(const TruncatedModel& model, std::uint64_t seed, std::uint64_t count,
                         unsigned threads = 1);

// (1 / (6 pi^2)) sum a(n r^3)^2 / (n r^3)^{4/3} = sum w^2 / 2.
double exact_second_moment(const TruncatedModel& model);

struct Estimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Mean of exp(lambda F) with jackknife standard error. |lambda| <= 50.
Estimate laplace_transform(const SampleBatch& batch, double lambda);
Estimate laplace_transform(const TruncatedModel& model, double lambda, std::uint64_t seed,
                           std::uint64_t draws, unsigned threads = 1);

// log E(exp(lambda F)) without sampling: kernels are independent, so the
// transform factors into one periodic integral per kernel, each evaluated by
// the trapezoid rule (spectrally accurate for these analytic integrands) with
// the node count doubled until the total settles to ~1e-13 relative.
double log_laplace_exact(const TruncatedModel& model, double lambda);

struct CharacteristicValue {
  double re = 0.0;
  double im = 0.0;
  double stderr_ = 0.0;
};

CharacteristicValue characteristic_function(const SampleBatch& batch, double alpha);
CharacteristicValue characteristic_function(const TruncatedModel& model, double alpha,
                                            std::uint64_t seed, std::uint64_t draws,
                                            unsigned threads = 1);

// Sample mean of F^k (absolute = true: |F|^k) with its standard error.
Estimate monte_carlo_moment(const SampleBatch& batch, unsigned k, bool absolute = false);

// min{(c1 k^{2/3} log(2k)^{2/3})^k, (c2 k N^{-1/3})^{k/2}}, N the smallest
// kernel index of the sum.
double moment_bound(unsigned k, double c1, double c2, double n_lower);

struct MomentBoundFit {
  unsigned k = 0;
  double moment = 0.0;  // E|F|^k
  double c1 = 0.0;      // smallest c1 with the first branch >= moment
  double c2 = 0.0;      // smallest c2 with the second branch >= moment
};

MomentBoundFit fit_moment_bound(const SampleBatch& batch, unsigned k, double n_lower);

}  // namespace gl3lab

#include "gl3lab/random_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gl3lab/error.hpp"
#include "gl3lab/parallel.hpp"
#include "gl3lab/rng.hpp"
#include "gl3lab/summation.hpp"

namespace gl3lab {

namespace {

std::uint64_t icbrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
  while (r > 0 && r * r * r > n) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

double sample_mean(std::span<const double> values) {
  return values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
}

// Jackknife standard error of a sample mean: the leave-one-out means
// (S - x_i) / (n - 1) have spread sqrt((n-1)/n sum (theta_i - theta)^2).
double jackknife_stderr(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double total = pairwise_sum(values);
  const double full = total / static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double loo = (total - values[i]) / static_cast<double>(n - 1);
    dev[i] = (loo - full) * (loo - full);
  }
  return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * pairwise_sum(dev));
}

}  // namespace

TruncatedModel::TruncatedModel(std::vector<std::uint64_t> kernels, std::uint64_t r_model,
                               std::vector<double> coefficients, std::uint64_t n_model,
                               Provider provider, std::string source)
    : kernels_(std::move(kernels)),
      r_model_(r_model),
      coefficients_(std::move(coefficients)),
      weights_(coefficients_.size()),
      n_model_(n_model),
      provider_(provider),
      source_(std::move(source)) {
  const double inv = 1.0 / (std::numbers::pi * std::numbers::sqrt3);
  for (std::size_t i = 0; i < kernels_.size(); ++i) {
    const double n23 = std::cbrt(static_cast<double>(kernels_[i] * kernels_[i]));
    for (std::uint64_t r = 1; r <= r_model_; ++r) {
      const std::size_t at = i * r_model_ + (r - 1);
      const double rd = static_cast<double>(r);
      weights_[at] = inv * coefficients_[at] / (n23 * rd * rd);
    }
  }
}

TruncatedModel build_model(const CoefficientTable& table, std::uint64_t n_model,
                           std::uint64_t r_model) {
  if (n_model == 0) throw DomainError("build_model: N_model must be positive");
  if (r_model == 0) r_model = icbrt(table.size() / n_model);
  if (r_model == 0) {
    throw RangeError("build_model: table of length " + std::to_string(table.size()) +
                     " is shorter than N_model = " + std::to_string(n_model));
  }
  const long double need = static_cast<long double>(n_model) * r_model * r_model * r_model;
  if (need > static_cast<long double>(table.size())) {
    std::ostringstream msg;
    msg << "build_model: N_model R_model^3 = " << static_cast<unsigned long long>(need)
        << " exceeds table length " << table.size();
    throw RangeError(msg.str());
  }
  const auto flags = cube_free_flags(n_model);
  std::vector<std::uint64_t> kernels;
  std::vector<double> coefficients;
  for (std::uint64_t n = 1; n <= n_model; ++n) {
    if (!flags[n]) continue;
    kernels.push_back(n);
    for (std::uint64_t r = 1; r <= r_model; ++r) coefficients.push_back(table[n * r * r * r]);
  }
  return TruncatedModel(std::move(kernels), r_model, std::move(coefficients), n_model,
                        table.provider(), table.source());
}

std::vector<double> index_coefficients(const TruncatedModel& model) {
  const std::uint64_t r = model.r_model();
  std::vector<double> out(model.n_model() * r * r * r, 0.0);
  for (std::size_t i = 0; i < model.kernels().size(); ++i) {
    const auto w = model.weights(i);
    for (std::uint64_t j = 1; j <= r; ++j) out[model.kernels()[i] * j * j * j - 1] = w[j - 1];
  }
  return out;
}

SampleBatch sample_batch(const TruncatedModel& model, std::uint64_t seed, std::uint64_t count,
                         unsigned threads) {
  if (count == 0) throw DomainError("sample_batch: count must be positive");
  SampleBatch batch{std::vector<double>(count, 0.0), seed, count};
  const auto kernels = model.kernels();
  const std::uint64_t r_model = model.r_model();
  // Draws are processed in blocks, kernel by kernel, so that the harmonic
  // recurrence runs across independent draws instead of as one serial
  // chain. Each draw still accumulates its kernels in list order.
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t block_begin, std::size_t block_end) {
    std::array<double, kBlock> total, c1, prev, cur, term;
    for (std::size_t block = block_begin; block < block_end; ++block) {
      const std::size_t first = block * kBlock;
      const std::size_t width = std::min<std::size_t>(kBlock, count - first);
      total.fill(0.0);
      for (std::size_t i = 0; i < kernels.size(); ++i) {
        const auto w = model.weights(i);
        for (std::size_t j = 0; j < width; ++j) {
          const double x = keyed_uniform(seed, first + j, kernels[i]);
          c1[j] = std::cos(6.0 * std::numbers::pi * x);
          prev[j] = 1.0;
          cur[j] = c1[j];
          term[j] = w[0] * c1[j];
        }
        // cos(6 pi r x) by the Chebyshev recurrence in r.
        for (std::uint64_t r = 2; r <= r_model; ++r) {
          const double wr = w[r - 1];
          for (std::size_t j = 0; j < width; ++j) {
            const double next = 2.0 * c1[j] * cur[j] - prev[j];
            prev[j] = cur[j];
            cur[j] = next;
            term[j] += wr * next;
          }
        }
        for (std::size_t j = 0; j < width; ++j) total[j] += term[j];
      }
      std::copy_n(total.begin(), width, batch.values.begin() + static_cast<std::ptrdiff_t>(first));
    }
  });
  return batch;
}

double exact_second_moment(const TruncatedModel& model) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < model.kernels().size(); ++i) {
    for (double w : model.weights(i)) acc += w * w;
  }
  return 0.5 * acc.value();
}

Estimate laplace_transform(const SampleBatch& batch, double lambda) {
  if (!(std::fabs(lambda) <= 50.0)) {
    throw DomainError("laplace_transform: |lambda| must be <= 50, got " + std::to_string(lambda));
  }
  double max_abs = 0.0;
  for (double v : batch.values) max_abs = std::max(max_abs, std::fabs(v));
  std::vector<double> terms(batch.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = std::exp(lambda * batch.values[i]);
    if (!std::isfinite(terms[i])) {
      std::ostringstream msg;
      msg << "laplace_transform: exp(lambda F) overflows at lambda = " << lambda
          << ", max |F| sample = " << max_abs;
      throw NumericError(msg.str());
    }
  }
  return Estimate{sample_mean(terms), jackknife_stderr(terms)};
}

Estimate laplace_transform(const TruncatedModel& model, double lambda, std::uint64_t seed,
                           std::uint64_t draws, unsigned threads) {
  return laplace_transform(sample_batch(model, seed, draws, threads), lambda);
}

double log_laplace_exact(const TruncatedModel& model, double lambda) {
  const std::uint64_t r_model = model.r_model();
  auto kernel_log = [&](std::size_t i, std::size_t nodes) {
    const auto w = model.weights(i);
    std::vector<double> expo(nodes);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nodes; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(nodes);
      const double c1 = std::cos(6.0 * std::numbers::pi * x);
      double prev = 1.0, cur = c1, g = w[0] * c1;
      for (std::uint64_t r = 2; r <= r_model; ++r) {
        const double next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
        g += w[r - 1] * cur;
      }
      expo[j] = lambda * g;
      top = std::max(top, expo[j]);
    }
    // log-sum-exp keeps large lambda finite.
    CompensatedSum acc;
    for (double e : expo) acc += std::exp(e - top);
    return top + std::log(acc.value() / static_cast<double>(nodes));
  };
  CompensatedSum total;
  for (std::size_t i = 0; i < model.kernels().size(); ++i) {
    std::size_t nodes = 16 * r_model + 16;
    double value = kernel_log(i, nodes);
    for (int refine = 0; refine < 12; ++refine) {
      nodes *= 2;
      const double next = kernel_log(i, nodes);
      const bool settled = std::fabs(next - value) <= 1e-13 * std::max(1.0, std::fabs(next));
      value = next;
      if (settled) break;
    }
    total += value;
  }
  return total.value();
}

CharacteristicValue characteristic_function(const SampleBatch& batch, double alpha) {
  std::vector<double> re(batch.values.size());
  std::vector<double> im(batch.values.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = std::cos(alpha * batch.values[i]);
    im[i] = std::sin(alpha * batch.values[i]);
  }
  const double se_re = jackknife_stderr(re);
  const double se_im = jackknife_stderr(im);
  return CharacteristicValue{sample_mean(re), sample_mean(im),
                             std::sqrt(se_re * se_re + se_im * se_im)};
}

CharacteristicValue characteristic_function(const TruncatedModel& model, double alpha,
                                            std::uint64_t seed, std::uint64_t draws,
                                            unsigned threads) {
  return characteristic_function(sample_batch(model, seed, draws, threads), alpha);
}

Estimate monte_carlo_moment(const SampleBatch& batch, unsigned k, bool absolute) {
  std::vector<double> powers(batch.values.size());
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const double v = absolute ? std::fabs(batch.values[i]) : batch.values[i];
    powers[i] = std::pow(v, static_cast<double>(k));
  }
  return Estimate{sample_mean(powers), jackknife_stderr(powers)};
}

double moment_bound(unsigned k, double c1, double c2, double n_lower) {
  const double kd = static_cast<double>(k);
  const double first = std::pow(c1 * std::pow(kd, 2.0 / 3.0) *
                                    std::pow(std::log(2.0 * kd), 2.0 / 3.0),
                                kd);
  const double second = std::pow(c2 * kd / std::cbrt(n_lower), kd / 2.0);
  return std::min(first, second);
}

MomentBoundFit fit_moment_bound(const SampleBatch& batch, unsigned k, double n_lower) {
  MomentBoundFit fit;
  fit.k = k;
  fit.moment = monte_carlo_moment(batch, k, true).estimate;
  const double kd = static_cast<double>(k);
  fit.c1 = std::pow(fit.moment, 1.0 / kd) /
           (std::pow(kd, 2.0 / 3.0) * std::pow(std::log(2.0 * kd), 2.0 / 3.0));
  fit.c2 = std::pow(fit.moment, 2.0 / kd) * std::cbrt(n_lower) / kd;
  return fit;
}

}  // namespace gl3lab

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace gl3lab {

// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
// when an addend is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  CompensatedSum& operator+=(double value) {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      correction_ += (sum_ - t) + value;
    } else {
      correction_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other) {
    *this += other.sum_;
    *this += other.correction_;
    return *this;
  }

  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

// Pairwise (cascade) summation in a fixed tree, so the result depends only on
// the input order and never on how the work was scheduled.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace gl3lab

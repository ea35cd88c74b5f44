#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"

namespace hyperbc {

/// Welford mean/variance with Chan's pairwise merge, so chunk results can be
/// combined in a fixed order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }

  void merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double delta = other.mean_ - mean_;
    const double total = na + nb;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    n_ += other.n_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
  }

  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  [[nodiscard]] double stderr_of_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  [[nodiscard]] double min() const { return min_; }
  [[nodiscard]] double max() const { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

class ComplexStats {
 public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  void merge(const ComplexStats& other) {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }
  [[nodiscard]] cplx mean() const { return {re_.mean(), im_.mean()}; }
  /// sqrt(se_re^2 + se_im^2): the standard error of |estimate - target|
  /// in the worst direction is bounded by this.
  [[nodiscard]] double stderr_of_mean() const {
    return std::hypot(re_.stderr_of_mean(), im_.stderr_of_mean());
  }
  [[nodiscard]] std::size_t count() const { return re_.count(); }
  [[nodiscard]] const RunningStats& real() const { return re_; }
  [[nodiscard]] const RunningStats& imag() const { return im_; }

 private:
  RunningStats re_;
  RunningStats im_;
};

/// Two-sample z statistic for a difference of independent means.
inline double two_sample_z(const RunningStats& a, const RunningStats& b) {
  const double se = std::hypot(a.stderr_of_mean(), b.stderr_of_mean());
  const double diff = a.mean() - b.mean();
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

/// z statistic of a sample mean against an exact value.
inline double one_sample_z(const RunningStats& a, double target) {
  const double se = a.stderr_of_mean();
  const double diff = a.mean() - target;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

/// Fixed angular frequencies of the bounded test functions
/// cos(a theta) prod_j sech d_j used in distribution comparisons.
inline constexpr std::array<double, 3> kMomentFrequencies = {0.5, 1.0, 2.0};

/// Feature vector for comparing two sampled measures on C_q x R: the
/// coordinates (d_1..d_q, theta), all their products of order two, and the
/// three bounded test functions above.
class MomentFeatures {
 public:
  explicit MomentFeatures(int q) : q_(q), stats_(feature_count(q)) {}

  static std::size_t feature_count(int q) {
    const std::size_t m = static_cast<std::size_t>(q) + 1;
    return m + m * (m + 1) / 2 + kMomentFrequencies.size();
  }

  void add(std::span<const double> d, double theta) {
    const std::size_t m = static_cast<std::size_t>(q_) + 1;
    double x[kMaxRank + 1];
    for (std::size_t i = 0; i < m - 1; ++i) x[i] = d[i];
    x[m - 1] = theta;
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) stats_[k++].add(x[i]);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) stats_[k++].add(x[i] * x[j]);
    }
    double sech = 1.0;
    for (std::size_t i = 0; i < m - 1; ++i) sech /= std::cosh(d[i]);
    for (double a : kMomentFrequencies) stats_[k++].add(std::cos(a * theta) * sech);
  }

  void merge(const MomentFeatures& other) {
    for (std::size_t i = 0; i < stats_.size(); ++i) stats_[i].merge(other.stats_[i]);
  }

  [[nodiscard]] int rank() const { return q_; }
  [[nodiscard]] const std::vector<RunningStats>& stats() const { return stats_; }

 private:
  int q_;
  std::vector<RunningStats> stats_;
};

/// max_i |z_i| over the per-feature two-sample statistics.
inline double max_abs_z(const MomentFeatures& a, const MomentFeatures& b) {
  detail::require(a.rank() == b.rank(), "max_abs_z: rank mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.stats().size(); ++i) {
    worst = std::max(worst, std::abs(two_sample_z(a.stats()[i], b.stats()[i])));
  }
  return worst;
}

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hyperbc

#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "hyperbc/chamber.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"
#include "hyperbc/statistics.hpp"

namespace hyperbc {

/// A finite weighted point cloud on C_q x R. Storage is columnar: the chamber
/// coordinates of atom i are d[i*q .. i*q+q).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;

  /// n atoms at the origin with uniform weights 1/n.
  EmpiricalMeasure(int q, std::size_t n)
      : q_(q), d_(n * static_cast<std::size_t>(q), 0.0), theta_(n, 0.0),
        weight_(n, cplx(n == 0 ? 0.0 : 1.0 / static_cast<double>(n), 0.0)) {
    detail::require(q >= 1, "EmpiricalMeasure: q must be positive");
  }

  [[nodiscard]] int rank() const { return q_; }
  [[nodiscard]] std::size_t size() const { return theta_.size(); }

  [[nodiscard]] std::span<const double> chamber(std::size_t i) const {
    return {d_.data() + i * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  [[nodiscard]] std::span<double> chamber(std::size_t i) {
    return {d_.data() + i * static_cast<std::size_t>(q_), static_cast<std::size_t>(q_)};
  }
  [[nodiscard]] double theta(std::size_t i) const { return theta_[i]; }
  [[nodiscard]] double& theta(std::size_t i) { return theta_[i]; }
  [[nodiscard]] cplx weight(std::size_t i) const { return weight_[i]; }
  [[nodiscard]] cplx& weight(std::size_t i) { return weight_[i]; }

  [[nodiscard]] HypergroupElement point(std::size_t i) const {
    const auto c = chamber(i);
    return {ChamberPoint(std::vector<double>(c.begin(), c.end())), theta_[i]};
  }

  [[nodiscard]] cplx total_mass() const {
    CompensatedSum re;
    CompensatedSum im;
    for (const cplx& w : weight_) {
      re.add(w.real());
      im.add(w.imag());
    }
    return {re.value(), im.value()};
  }

  [[nodiscard]] double total_variation() const {
    CompensatedSum acc;
    for (const cplx& w : weight_) acc.add(std::abs(w));
    return acc.value();
  }

  /// sum_i w_i f(d_i, theta_i) for f(span<const double>, double) -> cplx or double.
  template <class F>
  [[nodiscard]] cplx integrate(F&& f) const {
    CompensatedSum re;
    CompensatedSum im;
    for (std::size_t i = 0; i < size(); ++i) {
      const cplx v = weight_[i] * cplx(f(chamber(i), theta_[i]));
      re.add(v.real());
      im.add(v.imag());
    }
    return {re.value(), im.value()};
  }

  /// Per-feature sample statistics of the atoms (weights ignored; meant for
  /// the uniformly weighted outputs of the samplers).
  [[nodiscard]] MomentFeatures features() const {
    MomentFeatures out(q_);
    for (std::size_t i = 0; i < size(); ++i) out.add(chamber(i), theta_[i]);
    return out;
  }

  /// Largest sup-norm of a chamber part.
  [[nodiscard]] double max_chamber_norm() const {
    double out = 0.0;
    for (std::size_t i = 0; i < size(); ++i) out = std::max(out, chamber(i)[0]);
    return out;
  }

  /// CSV with columns d_1..d_q, theta, weight_re, weight_im.
  void write_csv(std::ostream& os) const {
    for (int j = 1; j <= q_; ++j) os << "d_" << j << ',';
    os << "theta,weight_re,weight_im\n";
    char buf[32];
    auto put = [&](double x, char sep) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << buf << sep;
    };
    for (std::size_t i = 0; i < size(); ++i) {
      for (double c : chamber(i)) put(c, ',');
      put(theta_[i], ',');
      put(weight_[i].real(), ',');
      put(weight_[i].imag(), '\n');
    }
  }

 private:
  int q_ = 1;
  std::vector<double> d_;
  std::vector<double> theta_;
  std::vector<cplx> weight_;
};

}  // namespace hyperbc

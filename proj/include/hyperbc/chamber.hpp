#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"

namespace hyperbc {

/// Singular values in [1 - kClampTolerance, 1) are treated as rounding noise
/// and snapped to 1 before arcosh.
inline constexpr double kClampTolerance = 1e-9;

/// A point of the closed Weyl chamber C_q = {t_1 >= ... >= t_q >= 0}.
class ChamberPoint {
 public:
  ChamberPoint() = default;

  /// Validates the chamber ordering; use from_unsorted() to sort first.
  explicit ChamberPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    detail::require(!coords_.empty(), "chamber point must have at least one coordinate");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const double c = coords_[i];
      detail::require(std::isfinite(c), "chamber coordinate is not finite");
      detail::require(c >= 0.0, "chamber coordinate must be nonnegative");
      if (i > 0) {
        detail::require(coords_[i - 1] >= c, "chamber coordinates must be descending");
      }
    }
  }

  static ChamberPoint from_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<>());
    return ChamberPoint(std::move(values));
  }

  static ChamberPoint zero(int q) { return ChamberPoint(std::vector<double>(q, 0.0)); }

  template <int Q>
  static ChamberPoint from_eigen(const RVector<Q>& v) {
    return ChamberPoint(std::vector<double>(v.data(), v.data() + v.size()));
  }

  [[nodiscard]] int rank() const { return static_cast<int>(coords_.size()); }
  [[nodiscard]] double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const std::vector<double>& coords() const { return coords_; }
  [[nodiscard]] double max_norm() const { return coords_.empty() ? 0.0 : coords_.front(); }

  template <int Q>
  [[nodiscard]] RVector<Q> to_eigen() const {
    RVector<Q> v(rank());
    for (int i = 0; i < rank(); ++i) v[i] = (*this)[i];
    return v;
  }

  friend bool operator==(const ChamberPoint&, const ChamberPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// (t, theta) in C_q x R. theta is never reduced implicitly.
struct HypergroupElement {
  ChamberPoint t;
  double theta = 0.0;

  [[nodiscard]] int rank() const { return t.rank(); }
  friend bool operator==(const HypergroupElement&, const HypergroupElement&) = default;
};

/// Sorts values descending and snaps entries in [1 - eps, 1) to 1. This is
/// the step between singular values and arcosh; callers reject anything
/// below 1 - eps themselves.
inline ChamberPoint project_to_chamber(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) {
    if (!std::isfinite(v)) throw InvalidArgument("project_to_chamber: non-finite input");
    if (v < 1.0 && v >= 1.0 - kClampTolerance) v = 1.0;
  }
  return ChamberPoint::from_unsorted(std::move(out));
}

/// The multiplicity k(p,q,l) = (p - q - l, 1/2 + l, 1) on the roots
/// 2e_i, 4e_i, 2(e_i +- e_j). l is complex so spectral tests can probe
/// complex l; positivity-dependent code calls require_real_l().
class Multiplicity {
 public:
  Multiplicity(double p, int q, cplx l) : p_(p), q_(q), l_(l) {
    detail::require(q >= 1, "q must be a positive integer");
    detail::require(std::isfinite(p) && std::isfinite(l.real()) && std::isfinite(l.imag()),
                    "multiplicity parameters must be finite");
    detail::require(p >= 2.0 * q - 1.0, "p must satisfy p >= 2q - 1 (got p=" +
                                             std::to_string(p) + ", q=" + std::to_string(q) +
                                             ")");
  }

  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] cplx l() const { return l_; }
  [[nodiscard]] cplx k1() const { return cplx(p_ - q_) - l_; }
  [[nodiscard]] cplx k2() const { return 0.5 + l_; }
  [[nodiscard]] cplx k3() const { return 1.0; }

  [[nodiscard]] bool has_real_l() const { return l_.imag() == 0.0; }

  [[nodiscard]] double require_real_l(const char* who) const {
    if (!has_real_l()) {
      throw InvalidArgument(std::string(who) + " requires a real index l");
    }
    return l_.real();
  }

 private:
  double p_;
  int q_;
  cplx l_;
};

inline Multiplicity multiplicity_from(double p, int q, cplx l) { return Multiplicity(p, q, l); }

/// Half sum of positive roots for k(p,q,l):
/// rho_j = (p - q + l + 1) + 2(q - j), j = 1..q.
inline std::vector<cplx> rho(const Multiplicity& k) {
  std::vector<cplx> out(static_cast<std::size_t>(k.q()));
  for (int j = 1; j <= k.q(); ++j) {
    out[static_cast<std::size_t>(j - 1)] =
        cplx(k.p() - k.q() + 1.0 + 2.0 * (k.q() - j)) + k.l();
  }
  return out;
}

/// Half sum of positive roots for an arbitrary multiplicity (k1, k2, k3) of
/// 2 BC_q: (k1 + 2 k2) + 2 k3 (q - j).
inline std::vector<cplx> rho_general(int q, cplx k1, cplx k2, cplx k3) {
  std::vector<cplx> out(static_cast<std::size_t>(q));
  for (int j = 1; j <= q; ++j) {
    out[static_cast<std::size_t>(j - 1)] = k1 + 2.0 * k2 + 2.0 * k3 * static_cast<double>(q - j);
  }
  return out;
}

/// Spectral parameter lambda in C^q together with the character index l.
struct SpectralParameter {
  std::vector<cplx> lambda;
  cplx l = 0.0;
};

}  // namespace hyperbc

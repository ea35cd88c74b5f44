#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"

namespace hyperbc {

/// The coordinates y_1..y_q of the P-map, stored as the rows of a q x q
/// matrix. gap[j] = 1 - ||y_j||^2 is kept separately so rows drawn very
/// close to the unit sphere keep full precision.
template <int Q>
struct BallCoordinates {
  CMatrix<Q> rows;
  RVector<Q> gap;

  [[nodiscard]] int rank() const { return static_cast<int>(rows.rows()); }
};

template <int Q>
struct BallSample {
  CMatrix<Q> w;
  BallCoordinates<Q> y;
};

namespace detail {

template <class Rng>
cplx complex_normal(Rng& rng, std::normal_distribution<double>& normal) {
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

/// Uniform point on the unit sphere of C^q, as a row vector.
template <int Q, class Rng>
CRow<Q> uniform_sphere_row(int q, Rng& rng) {
  std::normal_distribution<double> normal;
  CRow<Q> u(q);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < q; ++i) u[i] = complex_normal(rng, normal);
    norm2 = u.squaredNorm();
  } while (norm2 == 0.0);
  return u / std::sqrt(norm2);
}

/// Returns 1 - X where X ~ Beta(a, b), i.e. a Beta(b, a) draw, via gammas.
template <class Rng>
double beta_complement(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double total = x + y;
  if (total == 0.0) return 0.5;  // both underflowed; does not occur for a = q >= 1
  return y / total;
}

}  // namespace detail

/// Haar-distributed element of SU(q): QR of a complex Ginibre matrix with the
/// R diagonal made positive gives Haar on U(q); dividing by a fixed q-th root
/// of the determinant maps that onto Haar on SU(q).
template <int Q, class Rng>
CMatrix<Q> sample_su(int q, Rng& rng) {
  detail::require(q >= 1, "sample_su: q must be positive");
  if (q == 1) return CMatrix<Q>::Identity(1, 1);
  std::normal_distribution<double> normal;
  CMatrix<Q> z(q, q);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) z(i, j) = detail::complex_normal(rng, normal);
  }
  Eigen::HouseholderQR<CMatrix<Q>> qr(z);
  CMatrix<Q> u = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < q; ++j) {
    const cplx diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) u.col(j) *= diag / mag;
  }
  const cplx det = u.determinant();
  u *= std::polar(1.0, -std::arg(det) / q);
  return u;
}

/// Applies the P-map: row j of w is y_j S_{j-1} ... S_1 with
/// S_k = (I - y_k^* y_k)^{1/2} = I - y_k^* y_k / (1 + sqrt(1 - ||y_k||^2)).
template <int Q>
CMatrix<Q> p_map(const BallCoordinates<Q>& y) {
  const int q = y.rank();
  CMatrix<Q> w(q, q);
  for (int j = 0; j < q; ++j) {
    CRow<Q> x = y.rows.row(j);
    for (int k = j - 1; k >= 0; --k) {
      const auto yk = y.rows.row(k);
      const double c = 1.0 / (1.0 + std::sqrt(std::max(0.0, y.gap[k])));
      // x y_k^* = sum_i x_i conj(y_k,i); Eigen's dot conjugates the left side.
      const cplx inner = yk.dot(x);
      x -= (c * inner) * yk;
    }
    w.row(j) = x;
  }
  return w;
}

/// Draws w from the matrix ball with density proportional to
/// Delta(I - w^* w)^{p - 2q}, p > 2q - 1. Row coordinates are independent:
/// y_j = r_j u_j with u_j uniform on the sphere of C^q and
/// r_j^2 ~ Beta(q, p - q - j + 1).
template <int Q, class Rng>
BallSample<Q> sample_ball(double p, int q, Rng& rng) {
  detail::require(q >= 1, "sample_ball: q must be positive");
  detail::require(p > 2.0 * q - 1.0, "sample_ball: requires p > 2q - 1");
  BallSample<Q> out;
  out.y.rows.resize(q, q);
  out.y.gap.resize(q);
  for (int j = 1; j <= q; ++j) {
    const double gap = detail::beta_complement(q, p - q - j + 1.0, rng);
    const double r = std::sqrt(1.0 - gap);
    out.y.rows.row(j - 1) = r * detail::uniform_sphere_row<Q>(q, rng);
    out.y.gap[j - 1] = gap;
  }
  out.w = p_map<Q>(out.y);
  return out;
}

/// The p = 2q - 1 boundary measure: y_1..y_{q-1} as for p = 2q - 1 and y_q
/// uniform on the unit sphere.
template <int Q, class Rng>
BallSample<Q> sample_ball_degenerate(int q, Rng& rng) {
  detail::require(q >= 1, "sample_ball_degenerate: q must be positive");
  const double p = 2.0 * q - 1.0;
  BallSample<Q> out;
  out.y.rows.resize(q, q);
  out.y.gap.resize(q);
  for (int j = 1; j < q; ++j) {
    const double gap = detail::beta_complement(q, p - q - j + 1.0, rng);
    out.y.rows.row(j - 1) = std::sqrt(1.0 - gap) * detail::uniform_sphere_row<Q>(q, rng);
    out.y.gap[j - 1] = gap;
  }
  out.y.rows.row(q - 1) = detail::uniform_sphere_row<Q>(q, rng);
  out.y.gap[q - 1] = 0.0;
  out.w = p_map<Q>(out.y);
  return out;
}

/// Dispatches to the degenerate sampler exactly at p = 2q - 1.
template <int Q, class Rng>
BallSample<Q> sample_contraction(double p, int q, Rng& rng) {
  if (p == 2.0 * q - 1.0) return sample_ball_degenerate<Q>(q, rng);
  return sample_ball<Q>(p, q, rng);
}

/// kappa_p = integral over the matrix ball of Delta(I - w^* w)^{p - 2q} dw
///         = prod_j pi^q Gamma(p - q - j + 1) / Gamma(p - j + 1).
inline double log_kappa(double p, int q) {
  detail::require(q >= 1, "kappa: q must be positive");
  detail::require(p > 2.0 * q - 1.0, "kappa: the ball integral diverges for p <= 2q - 1");
  double acc = 0.0;
  for (int j = 1; j <= q; ++j) {
    acc += q * std::log(std::numbers::pi) + std::lgamma(p - q - j + 1.0) - std::lgamma(p - j + 1.0);
  }
  return acc;
}

inline double kappa(double p, int q) { return std::exp(log_kappa(p, q)); }

}  // namespace hyperbc

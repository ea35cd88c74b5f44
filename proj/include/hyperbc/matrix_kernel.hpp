#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "hyperbc/chamber.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"

// The convolution kernel. For chamber points t, s, a special unitary v and a
// contraction w the argument matrix is
//
//   M = sinh(t) w sinh(s) + cosh(t) v cosh(s)            (diagonal sinh/cosh)
//
// and the kernel consists of d = arcosh(singular values of M) and
// h = det M. Factoring M = cosh(t) v (I + w~) cosh(s) with
// w~ = v^{-1} tanh(t) w tanh(s) gives ||w~|| <= tanh(t_1) tanh(s_1) < 1, so
// every eigenvalue of I + w~ lies in the open right half-plane. The analytic
// branch of Im ln h normalized by ln det(I) = 0 is therefore the sum of the
// principal arguments of those eigenvalues.

namespace hyperbc {

template <int Q>
struct KernelValue {
  RVector<Q> d;            // chamber part, descending
  double im_log_h = 0.0;   // analytic branch of Im ln h
  double abs_h = 1.0;      // |det M|
};

/// One integration point together with the kernel outputs it produces.
template <int Q>
struct KernelSample {
  CMatrix<Q> v;
  CMatrix<Q> w;
  KernelValue<Q> value;
};

template <int Q>
CMatrix<Q> argument_matrix(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s,
                           const CMatrix<Q>& v, const CMatrix<Q>& w) {
  const int q = t.rank();
  CMatrix<Q> m(q, q);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      // Same value as sinh*w*sinh + cosh*v*cosh, but exact when w = -v and t = s.
      m(i, j) = v(i, j) * std::cosh(t.x[i] - s.x[j]) + (v(i, j) + w(i, j)) * (t.sinh[i] * s.sinh[j]);
    }
  }
  return m;
}

namespace detail {

template <int Q>
RVector<Q> singular_values(const CMatrix<Q>& m) {
  if constexpr (Q == 1) {
    RVector<1> out;
    out[0] = std::abs(m(0, 0));
    return out;
  } else if constexpr (Q == 2) {
    // Largest singular value from the 2x2 Gram matrix; the smaller one from
    // |det| / sigma_max, which keeps full relative accuracy.
    const double a = std::norm(m(0, 0)) + std::norm(m(1, 0));
    const double d = std::norm(m(0, 1)) + std::norm(m(1, 1));
    const cplx b = std::conj(m(0, 0)) * m(0, 1) + std::conj(m(1, 0)) * m(1, 1);
    const double half_tr = 0.5 * (a + d);
    const double disc = std::hypot(0.5 * (a - d), std::abs(b));
    const double s1 = std::sqrt(half_tr + disc);
    const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    RVector<2> out;
    out[0] = s1;
    out[1] = s1 > 0.0 ? det / s1 : 0.0;
    return out;
  } else {
    Eigen::JacobiSVD<CMatrix<Q>> svd(m);
    return svd.singularValues();
  }
}

template <int Q>
CVector<Q> eigenvalues(const CMatrix<Q>& a) {
  if constexpr (Q == 1) {
    CVector<1> out;
    out[0] = a(0, 0);
    return out;
  } else if constexpr (Q == 2) {
    const cplx half_tr = 0.5 * (a(0, 0) + a(1, 1));
    const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const cplx root = std::sqrt(half_tr * half_tr - det);
    CVector<2> out;
    out[0] = half_tr + root;
    out[1] = half_tr - root;
    return out;
  } else {
    Eigen::ComplexEigenSolver<CMatrix<Q>> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on w~");
    return es.eigenvalues();
  }
}

template <int Q>
RVector<Q> arcosh_of_singular_values(const RVector<Q>& sigma) {
  const int q = static_cast<int>(sigma.size());
  RVector<Q> d(q);
  for (int i = 0; i < q; ++i) {
    double s = sigma[i];
    if (!std::isfinite(s)) throw NumericalError("non-finite singular value");
    if (s < 1.0) {
      if (s < 1.0 - kClampTolerance) {
        throw NumericalError("singular value " + std::to_string(s) +
                             " below 1: broken sampler or matrix");
      }
      s = 1.0;
    }
    d[i] = std::acosh(s);
  }
  // Singular values arrive descending; keep the chamber order exact even if
  // a solver returns ties in a different order.
  for (int i = 1; i < q; ++i) {
    if (d[i] > d[i - 1]) std::swap(d[i], d[i - 1]);
  }
  return d;
}

}  // namespace detail

template <int Q>
RVector<Q> kernel_d(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s, const CMatrix<Q>& v,
                    const CMatrix<Q>& w) {
  return detail::arcosh_of_singular_values<Q>(
      detail::singular_values<Q>(argument_matrix<Q>(t, s, v, w)));
}

/// w~ = v^{-1} tanh(t) w tanh(s); v is unitary so v^{-1} = v^*.
template <int Q>
CMatrix<Q> reduced_contraction(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s,
                               const CMatrix<Q>& v, const CMatrix<Q>& w) {
  const int q = t.rank();
  CMatrix<Q> scaled(q, q);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) scaled(i, j) = t.tanh[i] * w(i, j) * s.tanh[j];
  }
  return v.adjoint() * scaled;
}

template <int Q>
double branch_im_log_h(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s, const CMatrix<Q>& v,
                       const CMatrix<Q>& w) {
  const CVector<Q> tau = detail::eigenvalues<Q>(reduced_contraction<Q>(t, s, v, w));
  double sum = 0.0;
  for (int i = 0; i < tau.size(); ++i) {
    const cplx factor = 1.0 + tau[i];
    if (!(factor.real() > 0.0)) {
      throw NumericalError("eigenvalue of I + w~ outside the open right half-plane");
    }
    sum += std::arg(factor);
  }
  return sum;
}

template <int Q>
double abs_h(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s, const CMatrix<Q>& v,
             const CMatrix<Q>& w) {
  const CMatrix<Q> m = argument_matrix<Q>(t, s, v, w);
  if constexpr (Q == Eigen::Dynamic) {
    return std::abs(m.partialPivLu().determinant());
  } else {
    return std::abs(m.determinant());
  }
}

/// Re(h^l) on the analytic branch: |h|^l cos(l Im ln h).
inline double real_branch_power(double abs_h_value, double im_log_h, double l) {
  if (l == 0.0) return 1.0;
  return std::pow(abs_h_value, l) * std::cos(l * im_log_h);
}

/// h^l on the analytic branch for complex l.
inline cplx branch_power(double abs_h_value, double im_log_h, cplx l) {
  if (l == cplx(0.0)) return 1.0;
  return std::exp(l * cplx(std::log(abs_h_value), im_log_h));
}

template <int Q>
double weight_real_power(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s, const CMatrix<Q>& v,
                         const CMatrix<Q>& w, double l) {
  return real_branch_power(abs_h<Q>(t, s, v, w), branch_im_log_h<Q>(t, s, v, w), l);
}

/// All kernel outputs from one argument matrix (the Monte Carlo hot path).
template <int Q>
KernelValue<Q> evaluate_kernel(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s,
                               const CMatrix<Q>& v, const CMatrix<Q>& w) {
  const CMatrix<Q> m = argument_matrix<Q>(t, s, v, w);
  KernelValue<Q> out;
  out.d = detail::arcosh_of_singular_values<Q>(detail::singular_values<Q>(m));
  if constexpr (Q == Eigen::Dynamic) {
    out.abs_h = std::abs(m.partialPivLu().determinant());
  } else {
    out.abs_h = std::abs(m.determinant());
  }
  out.im_log_h = branch_im_log_h<Q>(t, s, v, w);
  return out;
}

// Runtime-rank convenience overloads on ChamberPoint / MatrixXcd.

namespace detail {

inline void require_kernel_shapes(const ChamberPoint& t, const ChamberPoint& s,
                                  const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w) {
  const int q = t.rank();
  require(s.rank() == q, "kernel: t and s must have equal rank");
  require(v.rows() == q && v.cols() == q, "kernel: v must be q x q");
  require(w.rows() == q && w.cols() == q, "kernel: w must be q x q");
}

template <class F>
decltype(auto) with_dynamic(const ChamberPoint& t, const ChamberPoint& s, F&& f) {
  const ChamberTrig<Eigen::Dynamic> tt(t.to_eigen<Eigen::Dynamic>());
  const ChamberTrig<Eigen::Dynamic> st(s.to_eigen<Eigen::Dynamic>());
  return f(tt, st);
}

}  // namespace detail

inline Eigen::MatrixXcd argument_matrix(const ChamberPoint& t, const ChamberPoint& s,
                                        const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w) {
  detail::require_kernel_shapes(t, s, v, w);
  return detail::with_dynamic(t, s, [&](const auto& tt, const auto& st) {
    return argument_matrix<Eigen::Dynamic>(tt, st, v, w);
  });
}

inline ChamberPoint kernel_d(const ChamberPoint& t, const ChamberPoint& s,
                             const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w) {
  detail::require_kernel_shapes(t, s, v, w);
  const Eigen::VectorXd d = detail::with_dynamic(t, s, [&](const auto& tt, const auto& st) {
    return kernel_d<Eigen::Dynamic>(tt, st, v, w);
  });
  return ChamberPoint::from_eigen<Eigen::Dynamic>(d);
}

inline double branch_im_log_h(const ChamberPoint& t, const ChamberPoint& s,
                              const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w) {
  detail::require_kernel_shapes(t, s, v, w);
  return detail::with_dynamic(t, s, [&](const auto& tt, const auto& st) {
    return branch_im_log_h<Eigen::Dynamic>(tt, st, v, w);
  });
}

inline double abs_h(const ChamberPoint& t, const ChamberPoint& s, const Eigen::MatrixXcd& v,
                    const Eigen::MatrixXcd& w) {
  detail::require_kernel_shapes(t, s, v, w);
  return detail::with_dynamic(t, s, [&](const auto& tt, const auto& st) {
    return abs_h<Eigen::Dynamic>(tt, st, v, w);
  });
}

inline double weight_real_power(const ChamberPoint& t, const ChamberPoint& s,
                                const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w, double l) {
  detail::require_kernel_shapes(t, s, v, w);
  return detail::with_dynamic(t, s, [&](const auto& tt, const auto& st) {
    return weight_real_power<Eigen::Dynamic>(tt, st, v, w, l);
  });
}

}  // namespace hyperbc

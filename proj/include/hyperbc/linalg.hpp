#pragma once

#include <complex>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Dense>

#include "hyperbc/errors.hpp"

namespace hyperbc {

using cplx = std::complex<double>;

inline constexpr int kMaxRank = 8;

// Matrix shapes are templated on the rank Q so the hot Monte Carlo loops work
// on stack-allocated fixed-size matrices. Q == Eigen::Dynamic covers the
// remaining supported ranks.
template <int Q>
using CMatrix = Eigen::Matrix<cplx, Q, Q>;
template <int Q>
using CRow = Eigen::Matrix<cplx, 1, Q>;
template <int Q>
using CVector = Eigen::Matrix<cplx, Q, 1>;
template <int Q>
using RVector = Eigen::Matrix<double, Q, 1>;

template <int Q>
using Rank = std::integral_constant<int, Q>;

/// Calls f(Rank<Q>{}) with Q = q for q <= 3 and Q = Eigen::Dynamic otherwise.
template <class F>
decltype(auto) dispatch_rank(int q, F&& f) {
  if (q < 1 || q > kMaxRank) {
    throw InvalidArgument("rank q must lie in [1, " + std::to_string(kMaxRank) +
                          "], got " + std::to_string(q));
  }
  switch (q) {
    case 1:
      return std::forward<F>(f)(Rank<1>{});
    case 2:
      return std::forward<F>(f)(Rank<2>{});
    case 3:
      return std::forward<F>(f)(Rank<3>{});
    default:
      return std::forward<F>(f)(Rank<Eigen::Dynamic>{});
  }
}

template <int Q>
CMatrix<Q> identity_matrix(int q) {
  return CMatrix<Q>::Identity(q, q);
}

/// cosh, sinh and tanh of a chamber point, computed once per convolution.
template <int Q>
struct ChamberTrig {
  RVector<Q> x;
  RVector<Q> cosh;
  RVector<Q> sinh;
  RVector<Q> tanh;

  ChamberTrig() = default;

  explicit ChamberTrig(const RVector<Q>& t)
      : x(t),
        cosh(t.array().cosh().matrix()),
        sinh(t.array().sinh().matrix()),
        tanh(t.array().tanh().matrix()) {}

  [[nodiscard]] int rank() const { return static_cast<int>(cosh.size()); }
};

}  // namespace hyperbc

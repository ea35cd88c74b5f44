#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hyperbc/convolution.hpp"
#include "hyperbc/matrix_kernel.hpp"
#include "hyperbc/sampling.hpp"

namespace {

using hyperbc::cplx;
using Eigen::MatrixXcd;

struct Draw {
  hyperbc::ChamberPoint t;
  hyperbc::ChamberPoint s;
  MatrixXcd v;
  MatrixXcd w;
};

Draw random_draw(int q, double p, hyperbc::Engine& eng, double max_coord = 2.5) {
  return hyperbc::dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    Draw d{hyperbc::random_chamber_point(q, max_coord, eng),
           hyperbc::random_chamber_point(q, max_coord, eng), MatrixXcd(), MatrixXcd()};
    d.v = hyperbc::sample_su<Q>(q, eng);
    d.w = hyperbc::sample_ball<Q>(p, q, eng).w;
    return d;
  });
}

TEST(Kernel, RankOneScalarFormula) {
  // q = 1: M = r e^{i phi} sinh t sinh s + cosh t cosh s
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double t = 3.0 * u(eng);
    const double s = 3.0 * u(eng);
    const cplx w = std::polar(std::sqrt(u(eng)), 2.0 * std::numbers::pi * u(eng));
    const cplx z = w * std::sinh(t) * std::sinh(s) + std::cosh(t) * std::cosh(s);
    const hyperbc::ChamberPoint tp({t});
    const hyperbc::ChamberPoint sp({s});
    const MatrixXcd v = MatrixXcd::Identity(1, 1);
    const MatrixXcd wm = MatrixXcd::Constant(1, 1, w);
    EXPECT_NEAR(hyperbc::kernel_d(tp, sp, v, wm)[0], std::acosh(std::abs(z)), 1e-12);
    EXPECT_NEAR(hyperbc::branch_im_log_h(tp, sp, v, wm), std::arg(z), 1e-12);
    EXPECT_NEAR(hyperbc::abs_h(tp, sp, v, wm) / std::abs(z), 1.0, 1e-13);
  }
}

TEST(Kernel, DeterminantMatchesSingularValues) {
  hyperbc::Engine eng(21);
  for (int q = 1; q <= 4; ++q) {
    for (int i = 0; i < 50; ++i) {
      const Draw d = random_draw(q, 2.0 * q + 0.5, eng);
      const auto dd = hyperbc::kernel_d(d.t, d.s, d.v, d.w);
      double prod = 1.0;
      for (double x : dd.coords()) prod *= std::cosh(x);
      EXPECT_NEAR(hyperbc::abs_h(d.t, d.s, d.v, d.w) / prod, 1.0, 1e-10) << "q=" << q;
    }
  }
}

TEST(Kernel, FixedAndDynamicRankAgree) {
  hyperbc::Engine eng(5);
  for (int i = 0; i < 30; ++i) {
    const Draw d = random_draw(3, 6.0, eng);
    const hyperbc::ChamberTrig<3> tt(d.t.to_eigen<3>());
    const hyperbc::ChamberTrig<3> st(d.s.to_eigen<3>());
    const hyperbc::CMatrix<3> v = d.v;
    const hyperbc::CMatrix<3> w = d.w;
    const auto fixed = hyperbc::evaluate_kernel<3>(tt, st, v, w);
    const auto dyn = hyperbc::kernel_d(d.t, d.s, d.v, d.w);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fixed.d[j], dyn[j], 1e-10);
    EXPECT_NEAR(fixed.im_log_h, hyperbc::branch_im_log_h(d.t, d.s, d.v, d.w), 1e-12);
  }
}

// Oracle for the analytic branch: follow arg det M along w -> tau w from
// tau = 0, where det M = prod cosh t_j cosh s_j > 0, in small steps.
double continued_arg(const Draw& d, int steps) {
  double acc = 0.0;
  cplx prev = hyperbc::argument_matrix(d.t, d.s, d.v, 0.0 * d.w).determinant();
  EXPECT_LT(std::abs(std::arg(prev)), 1e-12);
  for (int k = 1; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / steps;
    const cplx cur = hyperbc::argument_matrix(d.t, d.s, d.v, tau * d.w).determinant();
    const double step = std::arg(cur / prev);
    EXPECT_LT(std::abs(step), 0.5);
    acc += step;
    prev = cur;
  }
  return acc;
}

TEST(Kernel, BranchAgreesWithPathContinuation) {
  hyperbc::Engine eng(99);
  for (int q = 1; q <= 3; ++q) {
    for (int i = 0; i < 40; ++i) {
      const Draw d = random_draw(q, 2.0 * q - 0.5 + 1.0, eng, 3.5);
      EXPECT_NEAR(hyperbc::branch_im_log_h(d.t, d.s, d.v, d.w), continued_arg(d, 2000), 1e-9)
          << "q=" << q;
    }
  }
}

TEST(Kernel, BranchStaysInsideHalfPlaneBound) {
  hyperbc::Engine eng(4);
  for (int q = 1; q <= 3; ++q) {
    for (int i = 0; i < 200; ++i) {
      const Draw d = random_draw(q, 2.0 * q, eng, 4.0);
      EXPECT_LT(std::abs(hyperbc::branch_im_log_h(d.t, d.s, d.v, d.w)),
                q * std::numbers::pi / 2.0);
    }
  }
}

TEST(Kernel, SupportBound) {
  hyperbc::Engine eng(8);
  for (int q = 1; q <= 3; ++q) {
    for (int i = 0; i < 500; ++i) {
      const Draw d = random_draw(q, 2.0 * q + 1.0, eng, 3.0);
      const auto dd = hyperbc::kernel_d(d.t, d.s, d.v, d.w);
      EXPECT_LE(dd.max_norm(), d.t.max_norm() + d.s.max_norm() + 1e-12);
    }
  }
}

TEST(Kernel, IdentityAtOriginIsExact) {
  hyperbc::Engine eng(12);
  const Draw d = random_draw(2, 4.0, eng);
  const auto zero = hyperbc::ChamberPoint::zero(2);
  const auto dd = hyperbc::kernel_d(d.t, zero, d.v, d.w);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(dd[j], d.t[j], 1e-13);
  EXPECT_EQ(hyperbc::branch_im_log_h(d.t, zero, d.v, d.w), 0.0);
}

TEST(Kernel, InvolutionPointMapsToOrigin) {
  for (int q = 1; q <= 3; ++q) {
    hyperbc::Engine eng(q);
    const auto t = hyperbc::random_chamber_point(q, 3.0, eng);
    const MatrixXcd id = MatrixXcd::Identity(q, q);
    EXPECT_EQ(hyperbc::kernel_d(t, t, id, -id).max_norm(), 0.0);
    EXPECT_EQ(hyperbc::branch_im_log_h(t, t, id, -id), 0.0);
  }
}

TEST(Kernel, RealBranchPower) {
  EXPECT_EQ(hyperbc::real_branch_power(3.0, 0.4, 0.0), 1.0);
  EXPECT_NEAR(hyperbc::real_branch_power(2.0, 0.3, 0.5), std::sqrt(2.0) * std::cos(0.15), 1e-15);
  const cplx z = hyperbc::branch_power(2.0, 0.3, cplx(0.5, 0.2));
  EXPECT_NEAR(std::abs(z - std::exp(cplx(0.5, 0.2) * cplx(std::log(2.0), 0.3))), 0.0, 1e-15);
}

TEST(Kernel, RejectsShapeMismatch) {
  const hyperbc::ChamberPoint t({1.0, 0.5});
  const hyperbc::ChamberPoint s({1.0});
  const MatrixXcd id = MatrixXcd::Identity(2, 2);
  EXPECT_THROW((void)hyperbc::kernel_d(t, s, id, id), hyperbc::InvalidArgument);
}

}  // namespace

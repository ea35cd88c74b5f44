#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hyperbc/chamber.hpp"

namespace {

using hyperbc::cplx;

TEST(ChamberPoint, ValidatesOrdering) {
  EXPECT_NO_THROW(hyperbc::ChamberPoint({2.0, 1.0, 0.0}));
  EXPECT_THROW(hyperbc::ChamberPoint({1.0, 2.0}), hyperbc::InvalidArgument);
  EXPECT_THROW(hyperbc::ChamberPoint({1.0, -0.1}), hyperbc::InvalidArgument);
  EXPECT_THROW(hyperbc::ChamberPoint(std::vector<double>{}), hyperbc::InvalidArgument);
  EXPECT_THROW(hyperbc::ChamberPoint({NAN}), hyperbc::InvalidArgument);
}

TEST(ChamberPoint, FromUnsortedSorts) {
  const auto p = hyperbc::ChamberPoint::from_unsorted({0.3, 1.5, 0.9});
  EXPECT_EQ(p.coords(), (std::vector<double>{1.5, 0.9, 0.3}));
  EXPECT_EQ(p.max_norm(), 1.5);
}

TEST(Multiplicity, Components) {
  const hyperbc::Multiplicity k(5.0, 2, 0.25);
  EXPECT_EQ(k.k1(), cplx(2.75));
  EXPECT_EQ(k.k2(), cplx(0.75));
  EXPECT_EQ(k.k3(), cplx(1.0));
}

TEST(Multiplicity, RejectsPBelowRange) {
  EXPECT_THROW(hyperbc::Multiplicity(2.5, 2, 0.0), hyperbc::InvalidArgument);
}

TEST(Rho, RankOneIsPPlusL) {
  // alpha + beta + 1 with alpha = p - 1, beta = l
  EXPECT_EQ(hyperbc::rho(hyperbc::Multiplicity(3.0, 1, 0.0))[0], cplx(3.0));
  EXPECT_EQ(hyperbc::rho(hyperbc::Multiplicity(4.5, 1, -0.5))[0], cplx(4.0));
}

TEST(Rho, AgreesWithGeneralFormula) {
  for (int q = 1; q <= 4; ++q) {
    for (double dp : {0.0, 0.5, 3.0}) {
      for (cplx l : {cplx(0.0), cplx(0.5), cplx(-1.0), cplx(1.0, 0.7)}) {
        const hyperbc::Multiplicity k(2.0 * q - 1.0 + dp, q, l);
        const auto a = hyperbc::rho(k);
        const auto b = hyperbc::rho_general(q, k.k1(), k.k2(), k.k3());
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t j = 0; j < a.size(); ++j) EXPECT_LT(std::abs(a[j] - b[j]), 1e-14);
      }
    }
  }
}

}  // namespace

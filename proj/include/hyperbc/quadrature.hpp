#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "hyperbc/errors.hpp"

namespace hyperbc {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [a, b] (Newton iteration on P_n).
inline GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  detail::require(n >= 1, "gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = mid - half * z;
    rule.nodes[hi] = mid + half * z;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  return rule;
}

/// Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1],
/// alpha, beta > -1, via the Golub-Welsch eigenvalue problem.
inline GaussRule gauss_jacobi(int n, double alpha, double beta) {
  detail::require(n >= 1, "gauss_jacobi: n must be positive");
  detail::require(alpha > -1.0 && beta > -1.0, "gauss_jacobi: exponents must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  if (n > 1) {
    off[0] = std::sqrt(4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab)));
  }
  for (int k = 2; k < n; ++k) {
    const double s = 2.0 * k + ab;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    off[k - 1] = std::sqrt(num / den);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("gauss_jacobi: eigensolver failed");
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                         std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
  const double mu0 = std::exp(log_mu0);
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
  }
  return rule;
}

/// Gauss rule on [0, 1] for the weight (1 - u)^exponent.
inline GaussRule gauss_jacobi_unit(int n, double exponent) {
  GaussRule rule = gauss_jacobi(n, exponent, 0.0);
  const double scale = std::pow(2.0, -(exponent + 1.0));
  for (std::size_t k = 0; k < rule.size(); ++k) {
    rule.nodes[k] = 0.5 * (rule.nodes[k] + 1.0);
    rule.weights[k] *= scale;
  }
  return rule;
}

}  // namespace hyperbc

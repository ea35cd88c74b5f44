#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hyperbc/chamber.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"

namespace hyperbc {

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

/// True iff z is exactly 0, -1, -2, ...
inline bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

/// Complex log-gamma, Lanczos approximation (g = 7, 9 terms) on Re z >= 1/2
/// and the reflection formula below. Only exp(log_gamma) is meaningful: the
/// imaginary part is not tracked on a continuous branch. Poles return +inf.
inline cplx log_gamma(cplx z) {
  static constexpr std::array<double, 9> kLanczos = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double kG = 7.0;
  if (is_nonpositive_integer(z)) return {std::numeric_limits<double>::infinity(), 0.0};
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - std::log(std::sin(std::numbers::pi * z)) -
           log_gamma(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[static_cast<std::size_t>(i)] / (z + static_cast<double>(i));
  const cplx t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

/// 1 / Gamma(z), exactly zero at the poles of Gamma.
inline cplx reciprocal_gamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kSeriesTolerance = 1e-16;
inline constexpr long kMaxSeriesTerms = 100'000'000;

/// Direct summation of 2F1(a, b; c; x) for |x| < 1, stopped once a geometric
/// bound on the remaining tail falls below kSeriesTolerance * |sum|.
inline cplx hyp2f1_series(cplx a, cplx b, cplx c, cplx x) {
  cplx sum = 1.0;
  cplx term = 1.0;
  const double ax = std::abs(x);
  for (long n = 0; n < kMaxSeriesTerms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * x;
    sum += term;
    if (term == cplx(0.0)) return sum;
    const double next_ratio =
        std::abs((a + dn + 1.0) * (b + dn + 1.0) / ((c + dn + 1.0) * (dn + 2.0))) * ax;
    const double r = std::max(next_ratio, ax);
    if (next_ratio < 1.0 && r < 1.0 &&
        std::abs(term) * r / (1.0 - r) <= kSeriesTolerance * std::abs(sum)) {
      return sum;
    }
  }
  throw NumericalError("2F1 series did not converge; argument too close to 1");
}

/// c - a - b is an integer (to within 0.05): the z -> 1 - z connection
/// formula has coalescing gamma poles there.
inline bool connection_degenerate(cplx a, cplx b, cplx c) {
  const cplx d = c - a - b;
  return std::abs(d - std::round(d.real())) < 0.05;
}

/// Coefficients of the z -> 1 - z connection formula:
/// F(a,b;c;x) = c1 F(a,b;a+b-c+1;1-x) + (1-x)^{c-a-b} c2 F(c-a,c-b;c-a-b+1;1-x).
struct ConnectionCoefficients {
  cplx first = 0.0;
  cplx second = 0.0;
};

inline ConnectionCoefficients connection_coefficients(cplx a, cplx b, cplx c) {
  const cplx d = c - a - b;
  ConnectionCoefficients out;
  const cplx lg_c = log_gamma(c);
  if (!is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b)) {
    out.first = std::exp(lg_c + log_gamma(d) - log_gamma(c - a) - log_gamma(c - b));
  }
  if (!is_nonpositive_integer(a) && !is_nonpositive_integer(b)) {
    out.second = std::exp(lg_c + log_gamma(-d) - log_gamma(a) - log_gamma(b));
  }
  return out;
}

inline cplx hyp2f1_near_one(cplx a, cplx b, cplx c, double one_minus_x,
                            const ConnectionCoefficients& coef) {
  const cplx d = c - a - b;
  cplx out = 0.0;
  if (coef.first != cplx(0.0)) {
    out += coef.first * hyp2f1_series(a, b, 1.0 - d, one_minus_x);
  }
  if (coef.second != cplx(0.0)) {
    out += coef.second * std::exp(d * std::log(one_minus_x)) *
           hyp2f1_series(c - a, c - b, 1.0 + d, one_minus_x);
  }
  return out;
}

/// 2F1(a, b; c; x) for x in [0, 1), with one_minus_x = 1 - x supplied
/// separately so callers can keep it accurate.
inline cplx hyp2f1_unit_interval(cplx a, cplx b, cplx c, double x, double one_minus_x) {
  const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
  if (terminating || x <= 0.5 || connection_degenerate(a, b, c)) {
    return hyp2f1_series(a, b, c, x);
  }
  return hyp2f1_near_one(a, b, c, one_minus_x, connection_coefficients(a, b, c));
}

/// Picks the Pfaff variant for z <= 0: 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)),
/// or the same with a and b swapped. Prefers a terminating series, then the
/// variant whose terms decay fastest.
struct PfaffChoice {
  cplx exponent;  // prefactor is (1 - z)^{-exponent}
  cplx first;
  cplx second;
};

inline PfaffChoice choose_pfaff(cplx a, cplx b, cplx c) {
  if (is_nonpositive_integer(b) && !is_nonpositive_integer(a)) return {b, b, c - a};
  if (is_nonpositive_integer(a)) return {a, a, c - b};
  if (a.real() <= b.real()) return {a, a, c - b};
  return {b, b, c - a};
}

}  // namespace detail

/// Gauss hypergeometric function. Real z <= 0 is mapped into [0, 1) by the
/// Pfaff transformation (and evaluated near 1 through the connection
/// formula); otherwise |z| < 1 is summed directly.
inline cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z) {
  if (is_nonpositive_integer(c)) {
    throw InvalidArgument("gauss_2f1: c must not be a nonpositive integer");
  }
  if (z == cplx(0.0) || a == cplx(0.0) || b == cplx(0.0)) return 1.0;
  if (z.imag() == 0.0 && z.real() < 0.0) {
    const double zr = z.real();
    const double one_minus_z = 1.0 - zr;
    const double x = -zr / one_minus_z;
    const double one_minus_x = 1.0 / one_minus_z;
    const auto choice = detail::choose_pfaff(a, b, c);
    return std::exp(-choice.exponent * std::log(one_minus_z)) *
           detail::hyp2f1_unit_interval(choice.first, choice.second, c, x, one_minus_x);
  }
  if (std::abs(z) < 1.0) return detail::hyp2f1_series(a, b, c, z);
  throw InvalidArgument("gauss_2f1: only real z <= 0 or |z| < 1 are supported");
}

// ---------------------------------------------------------------------------
// Jacobi functions and the rank-one multiplicative functions
// ---------------------------------------------------------------------------

struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  [[nodiscard]] double rho() const { return alpha + beta + 1.0; }
};

/// phi_lambda^{(alpha,beta)}(t) = 2F1((rho + i lambda)/2, (rho - i lambda)/2;
/// alpha + 1; -sinh^2 t), rho = alpha + beta + 1, normalized by phi(0) = 1.
///
/// The parameters are fixed at construction so the Pfaff variant and the
/// connection-formula gamma factors are computed once; operator() is then
/// cheap enough to sit inside a quadrature loop.
class JacobiFunction {
 public:
  JacobiFunction(cplx lambda, JacobiParams params) : lambda_(lambda), params_(params) {
    detail::require(params.alpha > -1.0, "Jacobi function requires alpha > -1");
    const cplx i_lambda = cplx(0.0, 1.0) * lambda;
    const cplx a = 0.5 * (params.rho() + i_lambda);
    const cplx b = 0.5 * (params.rho() - i_lambda);
    c_ = params.alpha + 1.0;
    const auto choice = detail::choose_pfaff(a, b, c_);
    exponent_ = choice.exponent;
    first_ = choice.first;
    second_ = choice.second;
    terminating_ = is_nonpositive_integer(first_) ||
                   is_nonpositive_integer(second_);
    degenerate_ = detail::connection_degenerate(first_, second_, c_);
    if (!terminating_ && !degenerate_) {
      coef_ = detail::connection_coefficients(first_, second_, c_);
    }
  }

  [[nodiscard]] cplx operator()(double t) const {
    detail::require(t >= 0.0 && std::isfinite(t), "Jacobi function requires finite t >= 0");
    if (t == 0.0) return 1.0;
    const double ch = std::cosh(t);
    const double th = std::tanh(t);
    const double x = th * th;
    const double one_minus_x = 1.0 / (ch * ch);
    const cplx prefactor = std::exp(-2.0 * exponent_ * std::log(ch));
    cplx series;
    if (terminating_ || degenerate_ || x <= 0.5) {
      series = detail::hyp2f1_series(first_, second_, c_, x);
    } else {
      series = detail::hyp2f1_near_one(first_, second_, c_, one_minus_x, coef_);
    }
    return prefactor * series;
  }

  [[nodiscard]] cplx lambda() const { return lambda_; }
  [[nodiscard]] const JacobiParams& params() const { return params_; }

 private:
  cplx lambda_;
  JacobiParams params_;
  cplx c_;
  cplx exponent_;
  cplx first_;
  cplx second_;
  bool terminating_ = false;
  bool degenerate_ = false;
  detail::ConnectionCoefficients coef_;
};

inline cplx jacobi_phi(cplx lambda, JacobiParams params, double t) {
  return JacobiFunction(lambda, params)(t);
}

/// psi(t, theta) = e^{i l theta} cosh^l(t) phi_lambda^{(p-1, l)}(t): the
/// multiplicative functions of the rank-one convolution on [0, inf) x R.
class Rank1Character {
 public:
  Rank1Character(cplx lambda, double l, double p)
      : l_(l), phi_(lambda, JacobiParams{p - 1.0, l}) {
    detail::require(p >= 1.0, "rank-one character requires p >= 1");
  }

  [[nodiscard]] cplx operator()(double t, double theta) const {
    return std::polar(std::pow(std::cosh(t), l_), l_ * theta) * phi_(t);
  }

  [[nodiscard]] cplx phi(double t) const { return phi_(t); }
  [[nodiscard]] double l() const { return l_; }

 private:
  double l_;
  JacobiFunction phi_;
};

inline cplx psi_rank1(cplx lambda, double l, double p, double t, double theta) {
  return Rank1Character(lambda, l, p)(t, theta);
}

/// e^{i l theta} prod_j cosh^l t_j: the multiplicative function at the
/// spectral point where the hypergeometric factor is identically 1.
inline cplx psi_constant_character(cplx l, const ChamberPoint& t, double theta) {
  double log_cosh = 0.0;
  for (double tj : t.coords()) log_cosh += std::log(std::cosh(tj));
  return std::exp(l * cplx(log_cosh, theta));
}

// ---------------------------------------------------------------------------
// c-function
// ---------------------------------------------------------------------------

enum class CFunctionStatus { regular, pole, zero, indeterminate };

struct CFunctionValue {
  cplx value = 0.0;
  CFunctionStatus status = CFunctionStatus::regular;
  int numerator_poles = 0;
  int denominator_poles = 0;

  [[nodiscard]] bool finite() const {
    return status == CFunctionStatus::regular || status == CFunctionStatus::zero;
  }
};

namespace detail {

struct GammaRatioAccumulator {
  cplx log_sum = 0.0;
  int numerator_poles = 0;
  int denominator_poles = 0;

  /// Multiplies by Gamma(num) / Gamma(den).
  void ratio(cplx num, cplx den) {
    if (is_nonpositive_integer(num)) {
      ++numerator_poles;
    } else {
      log_sum += log_gamma(num);
    }
    if (is_nonpositive_integer(den)) {
      ++denominator_poles;
    } else {
      log_sum -= log_gamma(den);
    }
  }
};

/// One product of the c-function over the positive roots 2e_i, 4e_i,
/// 2(e_i -+ e_j), evaluated at mu, with coroot pairings lambda_i, lambda_i/2,
/// (lambda_i -+ lambda_j)/2 and k(alpha/2) = k1 for alpha = 4e_i only.
inline void c_function_half(GammaRatioAccumulator& acc, std::span<const cplx> mu, cplx k1,
                            cplx k2, cplx k3, bool invert) {
  const std::size_t q = mu.size();
  auto push = [&](cplx base, cplx mult) {
    if (invert) {
      acc.ratio(base + mult, base);
    } else {
      acc.ratio(base, base + mult);
    }
  };
  for (std::size_t i = 0; i < q; ++i) {
    push(mu[i], k1);
    push(0.5 * mu[i] + 0.5 * k1, k2);
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) {
      push(0.5 * (mu[i] - mu[j]), k3);
      push(0.5 * (mu[i] + mu[j]), k3);
    }
  }
}

}  // namespace detail

/// The Heckman-Opdam c-function for R = 2 BC_q with multiplicity k(p,q,l),
/// evaluated through log-gamma. Gamma poles are reported in the status
/// instead of producing inf/nan.
inline CFunctionValue c_function(std::span<const cplx> lambda, const Multiplicity& k) {
  detail::require(static_cast<int>(lambda.size()) == k.q(),
                  "c_function: lambda must have q components");
  const std::vector<cplx> rho_k = rho(k);
  detail::GammaRatioAccumulator acc;
  detail::c_function_half(acc, lambda, k.k1(), k.k2(), k.k3(), /*invert=*/false);
  detail::c_function_half(acc, rho_k, k.k1(), k.k2(), k.k3(), /*invert=*/true);
  CFunctionValue out;
  out.numerator_poles = acc.numerator_poles;
  out.denominator_poles = acc.denominator_poles;
  if (acc.numerator_poles > acc.denominator_poles) {
    out.status = CFunctionStatus::pole;
    out.value = cplx(std::numeric_limits<double>::infinity(), 0.0);
  } else if (acc.denominator_poles > acc.numerator_poles) {
    out.status = CFunctionStatus::zero;
    out.value = 0.0;
  } else if (acc.numerator_poles > 0) {
    out.status = CFunctionStatus::indeterminate;
    out.value = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  } else {
    out.value = std::exp(acc.log_sum);
  }
  return out;
}

}  // namespace hyperbc

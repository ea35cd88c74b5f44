#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hyperbc/chamber.hpp"
#include "hyperbc/convolution.hpp"
#include "hyperbc/empirical_measure.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/matrix_kernel.hpp"
#include "hyperbc/parallel.hpp"
#include "hyperbc/quadrature.hpp"
#include "hyperbc/random.hpp"
#include "hyperbc/sampling.hpp"
#include "hyperbc/special_functions.hpp"
#include "hyperbc/statistics.hpp"

namespace hyperbc {

struct Estimate {
  cplx value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// ---------------------------------------------------------------------------
// Product formulas
// ---------------------------------------------------------------------------

/// |psi(s,theta_1) psi(t,theta_2) - (delta_(s,theta_1) *_p delta_(t,theta_2))(psi)|
/// for the rank-one multiplicative function psi of (lambda, l, p).
inline double rank1_product_residual(const Rank1Convolution& rule, cplx lambda, double l,
                                     const HypergroupElement& s, const HypergroupElement& t) {
  const Rank1Character psi(lambda, l, rule.p());
  const cplx lhs = psi(s.t[0], s.theta) * psi(t.t[0], t.theta);
  // mirrored nodes come in adjacent pairs with equal d; evaluate phi once per pair
  double last_d = -1.0;
  cplx last_phi = 0.0;
  const cplx rhs = rule.integrate(s, t, [&](double d, double theta) {
    if (d != last_d) {
      last_d = d;
      last_phi = psi.phi(d);
    }
    return std::polar(std::pow(std::cosh(d), l), l * theta) * last_phi;
  });
  return std::abs(lhs - rhs);
}

/// The chamber product formula at q = 1 with phi = phi_lambda^{(p-1,l)}:
/// |phi(s) phi(t) - (delta_s *_{p,l} delta_t)(phi)|. The quadrature handles
/// complex phi through the symmetrized angle rule.
inline double check_chamber_product_formula(const Rank1Convolution& rule, cplx lambda, double l,
                                     double s, double t) {
  const JacobiFunction phi(lambda, JacobiParams{rule.p() - 1.0, l});
  const cplx lhs = phi(s) * phi(t);
  const double norm = std::pow(std::cosh(s) * std::cosh(t), -l);
  cplx rhs = 0.0;
  double last_d = -1.0;
  cplx last_phi = 0.0;
  for (const auto& a : rule.atoms(s, t)) {
    if (a.d != last_d) {
      last_d = a.d;
      last_phi = phi(a.d);
    }
    rhs += a.weight * last_phi * std::pow(a.modulus, l) * std::cos(l * a.arg);
  }
  return std::abs(lhs - norm * rhs);
}

/// Monte Carlo estimate of (1/kappa_p) int int h^l Delta(I - w^* w)^{p-2q} dv dw,
/// i.e. the sample mean of |h|^l e^{i l Im ln h}. Its exact value is
/// prod_j (cosh s_j cosh t_j)^l.
inline Estimate check_constant_character(const ChamberPoint& s, const ChamberPoint& t, double p,
                                         cplx l, std::size_t n, const RandomStream& rng,
                                         const ParallelOptions& opts = {}) {
  const int q = detail::common_rank(s, t);
  detail::require_convolution_params(p, q);
  detail::require(n >= 1, "check_constant_character needs samples");
  const ComplexStats stats = dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    const ChamberTrig<Q> tt(t.to_eigen<Q>());
    const ChamberTrig<Q> st(s.to_eigen<Q>());
    return reduce_kernel_draws<Q>(tt, st, p, n, rng, opts, ComplexStats{},
                                  [&](ComplexStats& acc, std::size_t, const KernelValue<Q>& kv) {
                                    acc.add(branch_power(kv.abs_h, kv.im_log_h, l));
                                  });
  });
  return {stats.mean(), stats.stderr_of_mean(), stats.count()};
}

inline cplx constant_character_target(const ChamberPoint& s, const ChamberPoint& t, cplx l) {
  return psi_constant_character(l, s, 0.0) * psi_constant_character(l, t, 0.0);
}

// ---------------------------------------------------------------------------
// Hypergroup axioms
// ---------------------------------------------------------------------------

/// Moment features of convolve_mc(s, t) and convolve_mc(t, s) from independent
/// streams, and the largest standardized discrepancy.
struct MomentComparison {
  double max_z = 0.0;
  MomentFeatures left{1};
  MomentFeatures right{1};
};

inline MomentComparison check_commutativity(const HypergroupElement& s, const HypergroupElement& t,
                                            double p, std::size_t n, const RandomStream& rng,
                                            const ParallelOptions& opts = {}) {
  MomentComparison out;
  out.left = convolve_mc(s, t, p, n, rng.split("s*t"), opts).features();
  out.right = convolve_mc(t, s, p, n, rng.split("t*s"), opts).features();
  out.max_z = max_abs_z(out.left, out.right);
  return out;
}

namespace detail {

/// For every atom X_i of `inner` one draw from delta_{X_i} * delta_{other}
/// (or delta_{other} * delta_{X_i} when atom_left is false).
inline MomentFeatures convolve_atoms(const EmpiricalMeasure& inner, const HypergroupElement& other,
                                     bool atom_left, double p, const RandomStream& rng,
                                     const ParallelOptions& opts) {
  const int q = inner.rank();
  require(other.rank() == q, "convolve_atoms: rank mismatch");
  return dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    const ChamberTrig<Q> ot(other.t.to_eigen<Q>());
    return reduce_chunks(
        inner.size(), opts, MomentFeatures(q),
        [&](std::size_t chunk, std::size_t begin, std::size_t end) {
          Engine eng = rng.engine(chunk);
          MomentFeatures acc(q);
          RVector<Q> x(q);
          RVector<Q> d(q);
          for (std::size_t i = begin; i < end; ++i) {
            const auto c = inner.chamber(i);
            for (int j = 0; j < q; ++j) x[j] = c[static_cast<std::size_t>(j)];
            const ChamberTrig<Q> xt(x);
            const auto [v, w] = draw_integration_point<Q>(p, q, eng);
            // convolve_mc(s, t) evaluates the kernel at (t, s).
            const KernelValue<Q> kv =
                atom_left ? evaluate_kernel<Q>(ot, xt, v, w) : evaluate_kernel<Q>(xt, ot, v, w);
            d = kv.d;
            acc.add(std::span<const double>(d.data(), static_cast<std::size_t>(q)),
                    inner.theta(i) + other.theta + kv.im_log_h);
          }
          return acc;
        });
  });
}

}  // namespace detail

/// (delta_r * delta_s) * delta_t against delta_r * (delta_s * delta_t). Each
/// side is sampled in two stages: n atoms of the inner convolution, then one
/// draw of the outer convolution per atom, which is an exact sample of the
/// composed measure.
inline MomentComparison check_associativity(const HypergroupElement& r, const HypergroupElement& s,
                                            const HypergroupElement& t, double p, std::size_t n,
                                            const RandomStream& rng,
                                            const ParallelOptions& opts = {}) {
  MomentComparison out;
  const EmpiricalMeasure rs = convolve_mc(r, s, p, n, rng.split("(r*s)"), opts);
  out.left = detail::convolve_atoms(rs, t, /*atom_left=*/true, p, rng.split("(r*s)*t"), opts);
  const EmpiricalMeasure st = convolve_mc(s, t, p, n, rng.split("(s*t)"), opts);
  out.right = detail::convolve_atoms(st, r, /*atom_left=*/false, p, rng.split("r*(s*t)"), opts);
  out.max_z = max_abs_z(out.left, out.right);
  return out;
}

struct InvolutionResult {
  double direct_distance = 0.0;   // |(d, theta)| of the kernel at (v, w) = (I, -I)
  double min_sample_distance = 0.0;
};

/// Convolves (t, theta) with (t, -theta): the kernel at (I, -I) must return
/// the identity (0, 0), and the sampled support should come close to it.
inline InvolutionResult check_involution(const ChamberPoint& t, double theta, double p,
                                         std::size_t n, const RandomStream& rng,
                                         const ParallelOptions& opts = {}) {
  const int q = t.rank();
  InvolutionResult out;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(q, q);
  const ChamberPoint d = kernel_d(t, t, id, -id);
  const double angle = theta - theta + branch_im_log_h(t, t, id, -id);
  out.direct_distance = std::max(d.max_norm(), std::abs(angle));
  out.min_sample_distance = std::numeric_limits<double>::infinity();
  if (n > 0) {
    const EmpiricalMeasure m = convolve_mc({t, theta}, {t, -theta}, p, n, rng, opts);
    for (std::size_t i = 0; i < m.size(); ++i) {
      out.min_sample_distance =
          std::min(out.min_sample_distance, std::max(m.chamber(i)[0], std::abs(m.theta(i))));
    }
  }
  return out;
}

/// Moments at p = 2q - 1 (boundary sampler) against p = 2q - 1 + dp.
inline MomentComparison check_degenerate_continuity(const HypergroupElement& s,
                                                    const HypergroupElement& t, double dp,
                                                    std::size_t n, const RandomStream& rng,
                                                    const ParallelOptions& opts = {}) {
  const double p0 = 2.0 * s.rank() - 1.0;
  MomentComparison out;
  out.left = convolve_mc(s, t, p0, n, rng.split("boundary"), opts).features();
  out.right = convolve_mc(s, t, p0 + dp, n, rng.split("interior"), opts).features();
  out.max_z = max_abs_z(out.left, out.right);
  return out;
}

/// Number of sampled kernel outputs with ||d||_inf > s_1 + t_1 + slack, for
/// random s, t with coordinates in [0, max_coord]. slack = 1e-12 (1 + s_1 + t_1)
/// absorbs rounding in arcosh.
struct SupportBoundResult {
  std::size_t violations = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
  std::size_t samples = 0;

  void merge(const SupportBoundResult& o) {
    violations += o.violations;
    max_excess = std::max(max_excess, o.max_excess);
    samples += o.samples;
  }
};

inline SupportBoundResult check_support_bound(double p, int q, std::size_t n,
                                              const RandomStream& rng, double max_coord = 3.0,
                                              const ParallelOptions& opts = {}) {
  detail::require_convolution_params(p, q);
  return dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    return reduce_chunks(n, opts, SupportBoundResult{},
                         [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                           Engine eng = rng.engine(chunk);
                           SupportBoundResult acc;
                           for (std::size_t i = begin; i < end; ++i) {
                             const RVector<Q> tc = random_chamber_coords<Q>(q, max_coord, eng);
                             const RVector<Q> sc = random_chamber_coords<Q>(q, max_coord, eng);
                             const auto [v, w] = draw_integration_point<Q>(p, q, eng);
                             const RVector<Q> d =
                                 kernel_d<Q>(ChamberTrig<Q>(tc), ChamberTrig<Q>(sc), v, w);
                             const double bound = tc[0] + sc[0];
                             const double excess = d[0] - bound;
                             acc.max_excess = std::max(acc.max_excess, excess);
                             if (excess > 1e-12 * (1.0 + bound)) ++acc.violations;
                             ++acc.samples;
                           }
                           return acc;
                         });
  });
}

// ---------------------------------------------------------------------------
// Branch continuity
// ---------------------------------------------------------------------------

/// Geodesic v0 exp(lambda log(v0^* v1)) in SU(q), with the determinant phase
/// removed so every point stays special unitary.
class SuGeodesic {
 public:
  SuGeodesic(const Eigen::MatrixXcd& v0, const Eigen::MatrixXcd& v1) : v0_(v0) {
    const Eigen::MatrixXcd u = v0.adjoint() * v1;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    if (es.info() != Eigen::Success) throw NumericalError("SuGeodesic: eigensolver failed");
    // A unitary matrix is normal; orthonormalize the eigenbasis to guard
    // against nearly repeated eigenvalues.
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(es.eigenvectors());
    basis_ = qr.householderQ();
    const Eigen::MatrixXcd diag = basis_.adjoint() * u * basis_;
    phases_.resize(u.rows());
    double total = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      phases_[i] = std::arg(diag(i, i));
      total += phases_[i];
    }
    mean_phase_ = total / static_cast<double>(u.rows());
  }

  [[nodiscard]] Eigen::MatrixXcd at(double lambda) const {
    const Eigen::Index q = phases_.size();
    Eigen::VectorXcd e(q);
    for (Eigen::Index i = 0; i < q; ++i) {
      e[i] = std::polar(1.0, lambda * (phases_[i] - mean_phase_));
    }
    return v0_ * basis_ * e.asDiagonal() * basis_.adjoint();
  }

 private:
  Eigen::MatrixXcd v0_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXd phases_;
  double mean_phase_ = 0.0;
};

struct BranchContinuityResult {
  double max_jump = 0.0;
  std::size_t segments = 0;
  std::size_t steps = 0;
};

/// Largest change of Im ln h between successive points of random straight
/// segments: linear in (t, s, w), geodesic in v. Endpoint v's are Haar, the
/// w's are drawn from the ball density of p.
inline BranchContinuityResult check_branch_continuity(int q, double p, std::size_t segments,
                                                      std::size_t steps, const RandomStream& rng,
                                                      double max_coord = 3.0) {
  detail::require_convolution_params(p, q);
  BranchContinuityResult out;
  out.segments = segments;
  out.steps = steps;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    Engine eng = rng.engine(seg);
    using D = Eigen::MatrixXcd;
    const Eigen::VectorXd t0 = random_chamber_coords<Eigen::Dynamic>(q, max_coord, eng);
    const Eigen::VectorXd t1 = random_chamber_coords<Eigen::Dynamic>(q, max_coord, eng);
    const Eigen::VectorXd s0 = random_chamber_coords<Eigen::Dynamic>(q, max_coord, eng);
    const Eigen::VectorXd s1 = random_chamber_coords<Eigen::Dynamic>(q, max_coord, eng);
    const D v0 = sample_su<Eigen::Dynamic>(q, eng);
    const D v1 = sample_su<Eigen::Dynamic>(q, eng);
    const D w0 = sample_contraction<Eigen::Dynamic>(p, q, eng).w;
    const D w1 = sample_contraction<Eigen::Dynamic>(p, q, eng).w;
    const SuGeodesic geo(v0, v1);
    double prev = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      const double a = static_cast<double>(k) / static_cast<double>(steps);
      const ChamberTrig<Eigen::Dynamic> tt((1.0 - a) * t0 + a * t1);
      const ChamberTrig<Eigen::Dynamic> st((1.0 - a) * s0 + a * s1);
      const D w = (1.0 - a) * w0 + a * w1;
      const double cur = branch_im_log_h<Eigen::Dynamic>(tt, st, geo.at(a), w);
      if (k > 0) out.max_jump = std::max(out.max_jump, std::abs(cur - prev));
      prev = cur;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization constant
// ---------------------------------------------------------------------------

/// Independent estimate of kappa_p: rows of w uniform in the unit ball of
/// C^q (real dimension 2q, volume pi^q / q!), accepted when w is a
/// contraction, weighted by Delta(I - w^* w)^{p-2q}.
inline Estimate kappa_monte_carlo(double p, int q, std::size_t n, const RandomStream& rng,
                                  const ParallelOptions& opts = {}) {
  detail::require(q >= 1 && p > 2.0 * q - 1.0, "kappa_monte_carlo requires p > 2q - 1");
  const double ball_volume = std::pow(std::numbers::pi, q) / std::tgamma(q + 1.0);
  const double box = std::pow(ball_volume, q);
  const RunningStats stats = dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    return reduce_chunks(n, opts, RunningStats{},
                         [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                           Engine eng = rng.engine(chunk);
                           std::uniform_real_distribution<double> unif(0.0, 1.0);
                           RunningStats acc;
                           CMatrix<Q> w(q, q);
                           for (std::size_t i = begin; i < end; ++i) {
                             for (int j = 0; j < q; ++j) {
                               const double r = std::pow(unif(eng), 1.0 / (2.0 * q));
                               w.row(j) = r * detail::uniform_sphere_row<Q>(q, eng);
                             }
                             const CMatrix<Q> gram = identity_matrix<Q>(q) - w.adjoint() * w;
                             Eigen::SelfAdjointEigenSolver<CMatrix<Q>> es(gram,
                                                                         Eigen::EigenvaluesOnly);
                             double value = 0.0;
                             if (es.eigenvalues().minCoeff() >= 0.0) {
                               value = std::pow(es.eigenvalues().prod(), p - 2.0 * q);
                             }
                             acc.add(value);
                           }
                           return acc;
                         });
  });
  return {box * stats.mean(), box * stats.stderr_of_mean(), stats.count()};
}

// ---------------------------------------------------------------------------
// Haar measure at rank one
// ---------------------------------------------------------------------------

struct HaarConjugationResult {
  double star_residual = 0.0;           // *_{p,l} with omega_{p,l}
  double bullet_residual = 0.0;         // .(p,l) with omega_{p,l} cosh^{-2l}
  double bullet_reversed_residual = 0.0;  // .(p,l) with omega_{p,l} cosh^{+2l}
  double star_integral = 0.0;
};

/// Relative conjugation defect |A - B| / max(|A|, |B|) with
/// A = int T_x f g omega, B = int T_x g f omega over y in [0, y_max].
inline HaarConjugationResult check_haar_rank1(double p, double l,
                                              const std::function<double(double)>& f,
                                              const std::function<double(double)>& g, double x,
                                              double y_max, int outer_nodes,
                                              const Rank1Convolution& rule) {
  detail::require(rule.p() == p, "check_haar_rank1: quadrature built for a different p");
  const GaussRule outer = gauss_legendre(outer_nodes, 0.0, y_max);
  auto relative = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
  };
  double star_a = 0.0;
  double star_b = 0.0;
  double bullet_a = 0.0;
  double bullet_b = 0.0;
  double rev_a = 0.0;
  double rev_b = 0.0;
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const double y = outer.nodes[k];
    const double omega =
        outer.weights[k] * haar_density(p, 1, HaarVariant::chamber(l), ChamberPoint({y}));
    const double c2l = std::pow(std::cosh(y), 2.0 * l);
    const double fy = f(y);
    const double gy = g(y);
    const double tsf = rule.star_translate(l, x, y, f);
    const double tsg = rule.star_translate(l, x, y, g);
    const double tbf = rule.bullet_translate(l, x, y, f);
    const double tbg = rule.bullet_translate(l, x, y, g);
    star_a += tsf * gy * omega;
    star_b += tsg * fy * omega;
    bullet_a += tbf * gy * omega / c2l;
    bullet_b += tbg * fy * omega / c2l;
    rev_a += tbf * gy * omega * c2l;
    rev_b += tbg * fy * omega * c2l;
  }
  return {relative(star_a, star_b), relative(bullet_a, bullet_b), relative(rev_a, rev_b),
          star_a};
}

// ---------------------------------------------------------------------------
// c-function probes
// ---------------------------------------------------------------------------

struct GrowthProbeRow {
  double p = 0.0;
  double inverse_modulus = 0.0;
  double log_slope = 0.0;  // d log|c^{-1}| / d log p against the previous row
};

/// |c(lambda + rho(k_{p,l}), k_{p,l})^{-1}| along p = l for a dominant weight
/// lambda (even, descending coordinates).
inline std::vector<GrowthProbeRow> c_inverse_growth_probe(int q, const std::vector<double>& p_grid,
                                                          const std::vector<double>& lambda) {
  detail::require(static_cast<int>(lambda.size()) == q, "growth probe: lambda must have q entries");
  std::vector<GrowthProbeRow> rows;
  for (double p : p_grid) {
    const Multiplicity k(p, q, p);
    const std::vector<cplx> r = rho(k);
    std::vector<cplx> arg(static_cast<std::size_t>(q));
    for (std::size_t j = 0; j < arg.size(); ++j) arg[j] = lambda[j] + r[j];
    const CFunctionValue c = c_function(arg, k);
    GrowthProbeRow row;
    row.p = p;
    row.inverse_modulus = c.finite() && c.value != cplx(0.0)
                              ? 1.0 / std::abs(c.value)
                              : std::numeric_limits<double>::infinity();
    if (!rows.empty()) {
      row.log_slope = std::log(row.inverse_modulus / rows.back().inverse_modulus) /
                      std::log(p / rows.back().p);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hyperbc

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "hyperbc/chamber.hpp"
#include "hyperbc/empirical_measure.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/linalg.hpp"
#include "hyperbc/matrix_kernel.hpp"
#include "hyperbc/parallel.hpp"
#include "hyperbc/quadrature.hpp"
#include "hyperbc/random.hpp"
#include "hyperbc/sampling.hpp"

namespace hyperbc {

namespace detail {

inline void require_convolution_params(double p, int q) {
  require(std::isfinite(p), "p must be finite");
  require(p >= 2.0 * q - 1.0, "convolution requires p >= 2q - 1 (got p=" + std::to_string(p) +
                                  ", q=" + std::to_string(q) + ")");
}

inline int common_rank(const ChamberPoint& s, const ChamberPoint& t) {
  require(s.rank() == t.rank(), "convolution operands must have equal rank");
  return s.rank();
}

}  // namespace detail

/// One integration point (v, w): v Haar on SU(q), w from the ball density
/// (or the boundary measure at p = 2q - 1).
template <int Q, class Rng>
std::pair<CMatrix<Q>, CMatrix<Q>> draw_integration_point(double p, int q, Rng& rng) {
  CMatrix<Q> v = sample_su<Q>(q, rng);
  CMatrix<Q> w = sample_contraction<Q>(p, q, rng).w;
  return {std::move(v), std::move(w)};
}

/// Calls body(i, kernel_value) for n independent draws of (v, w), chunk by
/// chunk with one engine per chunk.
template <int Q, class Acc, class Body>
Acc reduce_kernel_draws(const ChamberTrig<Q>& t, const ChamberTrig<Q>& s, double p,
                        std::size_t n, const RandomStream& rng, const ParallelOptions& opts,
                        Acc init, Body&& body) {
  const int q = t.rank();
  return reduce_chunks(n, opts, init,
                       [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                         Engine eng = rng.engine(chunk);
                         Acc acc = init;
                         for (std::size_t i = begin; i < end; ++i) {
                           const auto [v, w] = draw_integration_point<Q>(p, q, eng);
                           body(acc, i, evaluate_kernel<Q>(t, s, v, w));
                         }
                         return acc;
                       });
}

namespace detail {

struct NoAccumulator {
  void merge(const NoAccumulator&) {}
};

template <class Body>
EmpiricalMeasure sample_measure(const ChamberPoint& s, const ChamberPoint& t, double p,
                                std::size_t n, const RandomStream& rng,
                                const ParallelOptions& opts, Body&& fill) {
  const int q = common_rank(s, t);
  require_convolution_params(p, q);
  require(n >= 1, "convolution needs at least one sample");
  EmpiricalMeasure out(q, n);
  dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    const ChamberTrig<Q> tt(t.to_eigen<Q>());
    const ChamberTrig<Q> st(s.to_eigen<Q>());
    reduce_kernel_draws<Q>(tt, st, p, n, rng, opts, NoAccumulator{},
                           [&](NoAccumulator&, std::size_t i, const KernelValue<Q>& kv) {
                             auto d = out.chamber(i);
                             for (int j = 0; j < q; ++j) d[static_cast<std::size_t>(j)] = kv.d[j];
                             fill(out, i, kv.im_log_h);
                           });
  });
  return out;
}

}  // namespace detail

/// delta_(s, theta_1) *_p delta_(t, theta_2) as n equally weighted atoms
/// (d(t,s;v,w), theta_1 + theta_2 + Im ln h(t,s;v,w)).
inline EmpiricalMeasure convolve_mc(const HypergroupElement& s, const HypergroupElement& t,
                                    double p, std::size_t n, const RandomStream& rng,
                                    const ParallelOptions& opts = {}) {
  const double base = s.theta + t.theta;
  return detail::sample_measure(s.t, t.t, p, n, rng, opts,
                                [base](EmpiricalMeasure& m, std::size_t i, double im_log_h) {
                                  m.theta(i) = base + im_log_h;
                                });
}

/// delta_s .(p,l) delta_t on C_q: the chamber parts with complex weights
/// e^{i l Im ln h} / n.
inline EmpiricalMeasure convolve_signed(const ChamberPoint& s, const ChamberPoint& t, double p,
                                        double l, std::size_t n, const RandomStream& rng,
                                        const ParallelOptions& opts = {}) {
  const double inv_n = 1.0 / static_cast<double>(n);
  return detail::sample_measure(s, t, p, n, rng, opts,
                                [l, inv_n](EmpiricalMeasure& m, std::size_t i, double im_log_h) {
                                  m.weight(i) = std::polar(inv_n, l * im_log_h);
                                });
}

/// Reduces every angle into [0, 2 pi).
inline EmpiricalMeasure project_torus(const EmpiricalMeasure& m) {
  EmpiricalMeasure out = m;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double th = std::fmod(out.theta(i), two_pi);
    if (th < 0.0) th += two_pi;
    if (th >= two_pi) th = 0.0;
    out.theta(i) = th;
  }
  return out;
}

/// Forgets the angle: each atom becomes its coset representative (d, 0).
inline EmpiricalMeasure project_chamber(const EmpiricalMeasure& m) {
  EmpiricalMeasure out = m;
  for (std::size_t i = 0; i < out.size(); ++i) out.theta(i) = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Rank one: deterministic quadrature
// ---------------------------------------------------------------------------

/// One atom of a rank-one convolution: z = r e^{i theta} sinh t sinh s +
/// cosh t cosh s mapped to d = arcosh|z| and the angle increment Arg z.
struct Rank1Atom {
  double d = 0.0;
  double arg = 0.0;
  double modulus = 1.0;
  double weight = 0.0;
};

/// Product quadrature for the rank-one convolution measure on the unit disk
/// with density (alpha/pi) (1 - u)^{alpha - 1}, u = r^2, alpha = p - 1; for
/// p = 1 the unit circle with density 1/pi on [0, pi]. Angles are taken on
/// [0, pi] and every node is paired with its mirror -theta at half weight, so
/// the rule integrates non-symmetric (complex) integrands over the full disk.
class Rank1Convolution {
 public:
  Rank1Convolution(double p, int radial_nodes, int angular_nodes) : p_(p) {
    detail::require(p >= 1.0, "rank-one convolution requires p >= 1");
    detail::require(angular_nodes >= 1, "rank-one convolution needs angular nodes");
    const GaussRule angle = gauss_legendre(angular_nodes, 0.0, std::numbers::pi);
    if (p == 1.0) {
      for (std::size_t m = 0; m < angle.size(); ++m) {
        push(1.0, angle.nodes[m], angle.weights[m] / std::numbers::pi);
      }
      return;
    }
    detail::require(radial_nodes >= 1, "rank-one convolution needs radial nodes");
    const double alpha = p - 1.0;
    const GaussRule radial = gauss_jacobi_unit(radial_nodes, alpha - 1.0);
    for (std::size_t k = 0; k < radial.size(); ++k) {
      const double r = std::sqrt(radial.nodes[k]);
      for (std::size_t m = 0; m < angle.size(); ++m) {
        push(r, angle.nodes[m], alpha / std::numbers::pi * radial.weights[k] * angle.weights[m]);
      }
    }
  }

  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  [[nodiscard]] double weight_sum() const {
    CompensatedSum acc;
    for (const auto& n : nodes_) acc.add(n.weight);
    return acc.value();
  }

  /// Atoms of delta_s * delta_t on [0, inf) x R without the base angle.
  [[nodiscard]] std::vector<Rank1Atom> atoms(double s, double t) const {
    detail::require(s >= 0.0 && t >= 0.0, "rank-one convolution requires s, t >= 0");
    const double ss = std::sinh(t) * std::sinh(s);
    const double cc = std::cosh(t) * std::cosh(s);
    std::vector<Rank1Atom> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) {
      const cplx z(n.r * n.cos * ss + cc, n.r * n.sin * ss);
      const double mod = std::abs(z);
      out.push_back({std::acosh(std::max(1.0, mod)), std::arg(z), mod, n.weight});
    }
    return out;
  }

  /// (delta_(s,theta_1) *_p delta_(t,theta_2))(f) for f(d, theta) -> complex.
  template <class F>
  [[nodiscard]] cplx integrate(const HypergroupElement& s, const HypergroupElement& t,
                               F&& f) const {
    detail::require(s.rank() == 1 && t.rank() == 1, "rank-one quadrature requires q = 1");
    const double base = s.theta + t.theta;
    cplx acc = 0.0;
    for (const auto& a : atoms(s.t[0], t.t[0])) acc += a.weight * cplx(f(a.d, base + a.arg));
    return acc;
  }

  /// (delta_x *_{p,l} delta_y)(f) for the chamber convolution attached to the
  /// functions phi^{(p-1,l)}: weight Re(z^l) / (cosh x cosh y)^l.
  template <class F>
  [[nodiscard]] double star_translate(double l, double x, double y, F&& f) const {
    const double norm = std::pow(std::cosh(x) * std::cosh(y), -l);
    double acc = 0.0;
    for (const auto& a : atoms(x, y)) {
      acc += a.weight * f(a.d) * std::pow(a.modulus, l) * std::cos(l * a.arg);
    }
    return acc * norm;
  }

  /// (delta_x .(p,l) delta_y)(f) for real f: weight cos(l Arg z).
  template <class F>
  [[nodiscard]] double bullet_translate(double l, double x, double y, F&& f) const {
    double acc = 0.0;
    for (const auto& a : atoms(x, y)) acc += a.weight * f(a.d) * std::cos(l * a.arg);
    return acc;
  }

 private:
  struct Node {
    double r;
    double cos;
    double sin;
    double weight;
  };

  void push(double r, double theta, double weight) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    nodes_.push_back({r, c, s, 0.5 * weight});
    nodes_.push_back({r, c, -s, 0.5 * weight});
  }

  double p_;
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Random walks
// ---------------------------------------------------------------------------

/// X_0 = start, X_{k+1} drawn from delta_{X_k} *_p delta_{step}.
inline std::vector<HypergroupElement> random_walk(const HypergroupElement& start, double p,
                                                  std::size_t steps,
                                                  const HypergroupElement& step,
                                                  const RandomStream& rng) {
  const int q = detail::common_rank(start.t, step.t);
  detail::require_convolution_params(p, q);
  std::vector<HypergroupElement> path;
  path.reserve(steps + 1);
  path.push_back(start);
  Engine eng = rng.engine(0);
  dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    const ChamberTrig<Q> st(step.t.to_eigen<Q>());
    for (std::size_t k = 0; k < steps; ++k) {
      const HypergroupElement& x = path.back();
      const ChamberTrig<Q> xt(x.t.to_eigen<Q>());
      const auto [v, w] = draw_integration_point<Q>(p, q, eng);
      const KernelValue<Q> kv = evaluate_kernel<Q>(xt, st, v, w);
      path.push_back({ChamberPoint::from_eigen<Q>(kv.d), x.theta + step.theta + kv.im_log_h});
    }
  });
  return path;
}

// ---------------------------------------------------------------------------
// Haar densities
// ---------------------------------------------------------------------------

enum class HaarKind { full, torus, chamber };

struct HaarVariant {
  HaarKind kind = HaarKind::full;
  double l = 0.0;

  static HaarVariant full() { return {HaarKind::full, 0.0}; }
  static HaarVariant torus() { return {HaarKind::torus, 0.0}; }
  static HaarVariant chamber(double l) { return {HaarKind::chamber, l}; }

  [[nodiscard]] double cosh_exponent() const {
    return kind == HaarKind::chamber ? 2.0 * l + 1.0 : 1.0;
  }
};

/// Haar density with respect to dt (times dtheta or the uniform measure on
/// the circle for the full and torus variants), normalized to constant 1:
/// prod_j sinh^{2p-2q+1} t_j cosh^c t_j prod_{i<j} |cosh 2t_i - cosh 2t_j|^2.
inline double haar_density(double p, int q, HaarVariant variant, const ChamberPoint& t) {
  detail::require(t.rank() == q, "haar_density: rank mismatch");
  detail::require_convolution_params(p, q);
  const double a = 2.0 * p - 2.0 * q + 1.0;
  const double c = variant.cosh_exponent();
  double out = 1.0;
  for (int j = 0; j < q; ++j) {
    out *= std::pow(std::sinh(t[j]), a) * std::pow(std::cosh(t[j]), c);
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      const double diff = std::cosh(2.0 * t[i]) - std::cosh(2.0 * t[j]);
      out *= diff * diff;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Positivity scan
// ---------------------------------------------------------------------------

/// Uniform coordinates on [0, max_coord], sorted into the chamber.
template <int Q, class Rng>
RVector<Q> random_chamber_coords(int q, double max_coord, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, max_coord);
  RVector<Q> x(q);
  for (int i = 0; i < q; ++i) x[i] = unif(rng);
  std::sort(x.data(), x.data() + q, std::greater<>());
  return x;
}

inline ChamberPoint random_chamber_point(int q, double max_coord, Engine& rng) {
  return ChamberPoint::from_eigen<Eigen::Dynamic>(
      random_chamber_coords<Eigen::Dynamic>(q, max_coord, rng));
}

struct PositivityRow {
  double l = 0.0;
  double min_weight = 0.0;
  std::size_t negative_count = 0;
  std::size_t samples = 0;
};

namespace detail {

struct PositivityAccumulator {
  std::vector<double> min_weight;
  std::vector<std::size_t> negatives;

  void merge(const PositivityAccumulator& other) {
    if (min_weight.empty()) {
      *this = other;
      return;
    }
    for (std::size_t k = 0; k < min_weight.size(); ++k) {
      min_weight[k] = std::min(min_weight[k], other.min_weight[k]);
      negatives[k] += other.negatives[k];
    }
  }
};

}  // namespace detail

/// Minimum of Re(h^l) over n random (s, t, v, w) for every l of the grid.
/// s and t have coordinates uniform on [0, max_coord]. All l share the
/// same draws.
inline std::vector<PositivityRow> scan_positivity(double p, int q,
                                                  const std::vector<double>& l_grid,
                                                  std::size_t n, const RandomStream& rng,
                                                  double max_coord = 3.0,
                                                  const ParallelOptions& opts = {}) {
  detail::require_convolution_params(p, q);
  const std::size_t m = l_grid.size();
  detail::PositivityAccumulator init{std::vector<double>(m, std::numeric_limits<double>::infinity()),
                                     std::vector<std::size_t>(m, 0)};
  const auto acc = dispatch_rank(q, [&](auto rank) {
    constexpr int Q = decltype(rank)::value;
    return reduce_chunks(
        n, opts, detail::PositivityAccumulator{},
        [&](std::size_t chunk, std::size_t begin, std::size_t end) {
          Engine eng = rng.engine(chunk);
          detail::PositivityAccumulator a = init;
          for (std::size_t i = begin; i < end; ++i) {
            const ChamberTrig<Q> t(random_chamber_coords<Q>(q, max_coord, eng));
            const ChamberTrig<Q> s(random_chamber_coords<Q>(q, max_coord, eng));
            const auto [v, w] = draw_integration_point<Q>(p, q, eng);
            const double mod = abs_h<Q>(t, s, v, w);
            const double im = branch_im_log_h<Q>(t, s, v, w);
            for (std::size_t k = 0; k < m; ++k) {
              const double x = real_branch_power(mod, im, l_grid[k]);
              a.min_weight[k] = std::min(a.min_weight[k], x);
              if (x < 0.0) ++a.negatives[k];
            }
          }
          return a;
        });
  });
  std::vector<PositivityRow> rows(m);
  for (std::size_t k = 0; k < m; ++k) {
    rows[k] = {l_grid[k], acc.min_weight.empty() ? init.min_weight[k] : acc.min_weight[k],
               acc.negatives.empty() ? 0 : acc.negatives[k], n};
  }
  return rows;
}

}  // namespace hyperbc

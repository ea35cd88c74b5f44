// Convolves two point measures on C_2 x R, prints a few statistics of the
// result and checks the multiplicative function at the constant-character
// point against the sampled measure.
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hyperbc/hyperbc.hpp"

int main(int argc, char** argv) {
  using namespace hyperbc;
  const int q = 2;
  const double p = 4.0;
  const double l = 0.5;
  const HypergroupElement s{ChamberPoint({0.9, 0.4}), 0.3};
  const HypergroupElement t{ChamberPoint({0.7, 0.2}), -0.5};
  const RandomStream rng(42);

  const EmpiricalMeasure m = convolve_mc(s, t, p, 200000, rng.split("example"));
  const MomentFeatures features = m.features();
  std::printf("q=%d p=%g: %zu atoms, total mass %.17g\n", q, p, m.size(), m.total_mass().real());
  std::printf("largest chamber norm %.6f (bound s_1 + t_1 = %.6f)\n", m.max_chamber_norm(),
              s.t.max_norm() + t.t.max_norm());
  std::printf("mean d_1 %.6f, mean theta %.6f\n", features.stats()[0].mean(),
              features.stats()[static_cast<std::size_t>(q)].mean());

  // e^{il theta} prod cosh^l d_j is multiplicative.
  const cplx integral =
      m.integrate([&](std::span<const double> d, double theta) {
        return psi_constant_character(l, ChamberPoint(std::vector<double>(d.begin(), d.end())), theta);
      });
  const cplx product = psi_constant_character(l, s.t, s.theta) * psi_constant_character(l, t.t, t.theta);
  std::printf("psi integral %.6f%+.6fi, product %.6f%+.6fi\n", integral.real(), integral.imag(),
              product.real(), product.imag());

  if (argc > 1) {
    std::ofstream out(argv[1]);
    m.write_csv(out);
    std::printf("wrote %s\n", argv[1]);
  }
  return 0;
}

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperbc/checks.hpp"
#include "hyperbc/convolution.hpp"
#include "hyperbc/errors.hpp"
#include "hyperbc/random.hpp"
#include "hyperbc/sampling.hpp"
#include "hyperbc/special_functions.hpp"

namespace hyperbc {

using json = nlohmann::ordered_json;

/// A configuration problem, reported with the offending field path.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : InvalidArgument(field + ": " + what), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Suite { verify, scan, walk, tables };

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::verify:
      return "verify";
    case Suite::scan:
      return "scan";
    case Suite::walk:
      return "walk";
    case Suite::tables:
      return "tables";
  }
  return "verify";
}

inline Suite parse_suite(const std::string& name, const std::string& field = "suite") {
  if (name == "verify") return Suite::verify;
  if (name == "scan") return Suite::scan;
  if (name == "walk") return Suite::walk;
  if (name == "tables") return Suite::tables;
  throw ConfigError(field, "unknown suite '" + name + "' (expected verify|scan|walk|tables)");
}

/// Parses "2", "-0.5", "1+0.3i", "-2i", "i".
inline cplx parse_complex(const std::string& text, const std::string& field = "lambda") {
  static const std::regex real_re(R"(^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*$)");
  static const std::regex imag_re(R"(^\s*([-+]?[0-9.]*(?:[eE][-+]?[0-9]+)?)\s*[iI]\s*$)");
  static const std::regex both_re(
      R"(^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([-+])\s*([0-9.]*(?:[eE][-+]?[0-9]+)?)\s*[iI]\s*$)");
  auto number = [&](const std::string& s) -> double {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError(field, "cannot parse '" + text + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError(field, "cannot parse '" + text + "' as a complex number");
    }
  };
  std::smatch m;
  if (std::regex_match(text, m, real_re)) return {number(m[1]), 0.0};
  if (std::regex_match(text, m, imag_re)) return {0.0, number(m[1])};
  if (std::regex_match(text, m, both_re)) {
    const double im = number(m[3].str().empty() ? "" : m[3].str());
    return {number(m[1]), m[2] == "-" ? -im : im};
  }
  throw ConfigError(field, "cannot parse '" + text + "' as a complex number");
}

inline std::string format_complex(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

struct RunConfig {
  int q = 1;
  double p = 3.0;
  double l = 0.5;
  std::vector<cplx> lambda = {0.5, 2.0, cplx(1.0, 0.3)};
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;
  Suite suite = Suite::verify;
  std::map<std::string, double> tolerances;
  std::string output_path;
  unsigned threads = 0;
  std::size_t walk_steps = 1000;
  std::vector<double> walk_step = {};  // chamber part of the step law; empty: all 0.5
  double walk_step_theta = 0.0;
  std::vector<double> l_grid = {};  // empty: default positivity grid

  [[nodiscard]] double tolerance(const std::string& check, double fallback) const {
    const auto it = tolerances.find(check);
    return it == tolerances.end() ? fallback : it->second;
  }

  [[nodiscard]] ParallelOptions parallel() const {
    ParallelOptions o;
    o.threads = threads;
    return o;
  }

  [[nodiscard]] ChamberPoint step_point() const {
    if (walk_step.empty()) return ChamberPoint(std::vector<double>(static_cast<std::size_t>(q), 0.5));
    return ChamberPoint::from_unsorted(walk_step);
  }

  [[nodiscard]] std::vector<double> positivity_grid() const {
    if (!l_grid.empty()) return l_grid;
    const double a = 1.0 / q;
    return {-2.0, -1.0, -a, -0.5 * a, 0.0, 0.5 * a, a, 1.0, 2.0};
  }

  /// Throws ConfigError naming the first invalid field.
  void validate() const {
    if (q < 1 || q > kMaxRank) {
      throw ConfigError("q", "must lie in [1, " + std::to_string(kMaxRank) + "]");
    }
    if (!std::isfinite(p) || p < 2.0 * q - 1.0) {
      throw ConfigError("p", "must satisfy p >= 2q - 1 (p=" + std::to_string(p) +
                                 ", q=" + std::to_string(q) + ")");
    }
    if (!std::isfinite(l)) throw ConfigError("l", "must be finite");
    if (lambda.empty()) throw ConfigError("lambda", "must not be empty");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (!std::isfinite(lambda[i].real()) || !std::isfinite(lambda[i].imag())) {
        throw ConfigError("lambda[" + std::to_string(i) + "]", "must be finite");
      }
    }
    if (n_samples < 1) throw ConfigError("n_samples", "must be >= 1");
    for (const auto& [name, tol] : tolerances) {
      if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw ConfigError("tolerances." + name, "must be positive");
      }
    }
    if (!walk_step.empty() && static_cast<int>(walk_step.size()) != q) {
      throw ConfigError("walk.step", "must have q entries");
    }
    for (std::size_t i = 0; i < walk_step.size(); ++i) {
      if (!(walk_step[i] >= 0.0) || !std::isfinite(walk_step[i])) {
        throw ConfigError("walk.step[" + std::to_string(i) + "]", "must be finite and >= 0");
      }
    }
  }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["q"] = c.q;
  j["p"] = c.p;
  j["l"] = c.l;
  json lam = json::array();
  for (const cplx& z : c.lambda) lam.push_back(format_complex(z));
  j["lambda"] = lam;
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["suite"] = to_string(c.suite);
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["output_path"] = c.output_path;
  j["walk"] = {{"steps", c.walk_steps}, {"step", c.walk_step}, {"step_theta", c.walk_step_theta}};
  j["scan"] = {{"l_grid", c.l_grid}};
  return j;
}

namespace detail {

template <class T>
T get_field(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path, "has the wrong type");
  }
}

inline cplx complex_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>(), path);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(path, "expected a number, a string like \"1+0.3i\", or [re, im]");
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

}  // namespace detail

/// Applies the fields present in j on top of `base`.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  using detail::get_field;
  detail::check_keys(j, "",
                     {"q", "p", "l", "lambda", "n_samples", "seed", "suite", "tolerances",
                      "output_path", "threads", "walk", "scan"});
  RunConfig c = std::move(base);
  if (j.contains("q")) c.q = get_field<int>(j["q"], "q");
  if (j.contains("p")) c.p = get_field<double>(j["p"], "p");
  if (j.contains("l")) c.l = get_field<double>(j["l"], "l");
  if (j.contains("lambda")) {
    const json& lam = j["lambda"];
    if (!lam.is_array()) throw ConfigError("lambda", "must be an array");
    c.lambda.clear();
    for (std::size_t i = 0; i < lam.size(); ++i) {
      c.lambda.push_back(detail::complex_from_json(lam[i], "lambda[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("n_samples")) {
    const json& n = j["n_samples"];
    if (!n.is_number_integer() || n.get<long long>() < 1) {
      throw ConfigError("n_samples", "must be a positive integer");
    }
    c.n_samples = n.get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("seed", "must be an unsigned integer");
    }
    c.seed = get_field<std::uint64_t>(j["seed"], "seed");
  }
  if (j.contains("suite")) c.suite = parse_suite(get_field<std::string>(j["suite"], "suite"));
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances", "must be an object");
    for (const auto& [k, v] : t.items()) {
      c.tolerances[k] = get_field<double>(v, "tolerances." + k);
    }
  }
  if (j.contains("output_path")) {
    c.output_path = get_field<std::string>(j["output_path"], "output_path");
  }
  if (j.contains("threads")) c.threads = get_field<unsigned>(j["threads"], "threads");
  if (j.contains("walk")) {
    const json& w = j["walk"];
    detail::check_keys(w, "walk", {"steps", "step", "step_theta"});
    if (w.contains("steps")) c.walk_steps = get_field<std::size_t>(w["steps"], "walk.steps");
    if (w.contains("step")) c.walk_step = get_field<std::vector<double>>(w["step"], "walk.step");
    if (w.contains("step_theta")) {
      c.walk_step_theta = get_field<double>(w["step_theta"], "walk.step_theta");
    }
  }
  if (j.contains("scan")) {
    const json& s = j["scan"];
    detail::check_keys(s, "scan", {"l_grid"});
    if (s.contains("l_grid")) c.l_grid = get_field<std::vector<double>>(s["l_grid"], "scan.l_grid");
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
  return config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------
// Check registry
// ---------------------------------------------------------------------------

enum class Grade { assertion, report };

inline std::string to_string(Grade g) { return g == Grade::assertion ? "assertion" : "report"; }

struct CheckOutcome {
  double value = 0.0;
  double tol = 0.0;
  std::optional<double> std_error;
  bool pass = false;
  json detail = json::object();
};

struct CheckSpec {
  std::string name;
  std::function<Grade(const RunConfig&)> grade;
  std::function<bool(const RunConfig&)> applies;
  std::function<CheckOutcome(const RunConfig&, const RandomStream&)> run;
};

namespace detail {

inline CheckOutcome at_most(double value, double tol) {
  CheckOutcome o;
  o.value = value;
  o.tol = tol;
  o.pass = std::isfinite(value) && value <= tol;
  return o;
}

inline Grade always_assert(const RunConfig&) { return Grade::assertion; }
inline Grade always_report(const RunConfig&) { return Grade::report; }
inline bool always(const RunConfig&) { return true; }
inline bool rank_one(const RunConfig& c) { return c.q == 1; }

/// Fixed test points with distinct coordinates, scaled to the rank.
inline ChamberPoint fixed_point(int q, double top) {
  std::vector<double> x(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j)] = top * (q - j) / q;
  return ChamberPoint(std::move(x));
}

inline double haar_bump_f(double t) {
  const double u = (std::cosh(t) - 1.8) / 0.6;
  return std::exp(-u * u);
}

inline double haar_bump_g(double t) {
  const double u = (std::cosh(t) - 2.6) / 0.9;
  return (1.0 + 0.3 * std::cosh(t)) * std::exp(-u * u);
}

inline HaarConjugationResult haar_rank1(double p, double l) {
  const Rank1Convolution rule(p, 48, 48);
  return check_haar_rank1(p, l, haar_bump_f, haar_bump_g, 0.7, 4.0, 400, rule);
}

}  // namespace detail

/// Every check of the verify suite. Assertion-grade checks
/// decide the exit status; report-grade checks never fail a run.
inline const std::vector<CheckSpec>& check_registry() {
  using namespace detail;
  static const std::vector<CheckSpec> registry = {
      {"convolution.associativity", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const HypergroupElement r{fixed_point(c.q, 0.4), 0.3};
         const HypergroupElement s{fixed_point(c.q, 0.9), -0.2};
         const HypergroupElement t{fixed_point(c.q, 1.3), 0.5};
         const auto cmp = check_associativity(r, s, t, c.p, c.n_samples, rng, c.parallel());
         return at_most(cmp.max_z, c.tolerance("convolution.associativity", 3.0));
       }},
      {"convolution.commutativity", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const HypergroupElement s{fixed_point(c.q, 0.8), 0.4};
         const HypergroupElement t{fixed_point(c.q, 1.2), -1.1};
         const auto cmp = check_commutativity(s, t, c.p, c.n_samples, rng, c.parallel());
         return at_most(cmp.max_z, c.tolerance("convolution.commutativity", 3.0));
       }},
      {"convolution.constant_character", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const ChamberPoint s = fixed_point(c.q, 0.9);
         const ChamberPoint t = fixed_point(c.q, 0.6);
         const Estimate e = check_constant_character(s, t, c.p, c.l, c.n_samples, rng, c.parallel());
         const cplx target = constant_character_target(s, t, c.l);
         const double dev = std::abs(e.value - target);
         const double k = c.tolerance("convolution.constant_character", 3.0);
         CheckOutcome o;
         o.value = dev;
         o.tol = k * e.std_error;
         o.std_error = e.std_error;
         o.pass = dev <= o.tol || (e.std_error == 0.0 && dev <= 1e-12);
         o.detail = {{"estimate", format_complex(e.value)}, {"target", format_complex(target)}};
         return o;
       }},
      {"convolution.degenerate_continuity", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const HypergroupElement s{fixed_point(c.q, 0.9), 0.0};
         const HypergroupElement t{fixed_point(c.q, 0.7), 0.0};
         const auto cmp = check_degenerate_continuity(s, t, 1e-4, c.n_samples, rng, c.parallel());
         return at_most(cmp.max_z, c.tolerance("convolution.degenerate_continuity", 3.0));
       }},
      {"convolution.normalization", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const HypergroupElement s{fixed_point(c.q, 0.9), 0.0};
         const HypergroupElement t{fixed_point(c.q, 0.6), 0.0};
         const EmpiricalMeasure m = convolve_mc(s, t, c.p, c.n_samples, rng, c.parallel());
         const cplx mass = m.total_mass();
         CheckOutcome o =
             at_most(std::abs(mass - 1.0), c.tolerance("convolution.normalization", 1e-12));
         o.detail = {{"total_mass", mass.real()}};
         return o;
       }},
      {"convolution.signed_total_variation", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const EmpiricalMeasure m = convolve_signed(fixed_point(c.q, 0.9), fixed_point(c.q, 0.6),
                                                    c.p, c.l, c.n_samples, rng, c.parallel());
         return at_most(std::abs(m.total_variation() - 1.0),
                        c.tolerance("convolution.signed_total_variation", 1e-12));
       }},
      {"kernel.branch_continuity", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const auto r = check_branch_continuity(c.q, c.p, 100, 1000, rng);
         return at_most(r.max_jump, c.tolerance("kernel.branch_continuity", 0.1));
       }},
      {"kernel.involution", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         Engine eng = rng.engine(0);
         std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
         double worst = 0.0;
         for (int i = 0; i < 100; ++i) {
           const ChamberPoint t = random_chamber_point(c.q, 3.0, eng);
           worst = std::max(worst, check_involution(t, angle(eng), c.p, 0, rng).direct_distance);
         }
         return at_most(worst, c.tolerance("kernel.involution", 1e-10));
       }},
      {"kernel.positivity",
       [](const RunConfig& c) {
         return std::abs(c.l) <= 1.0 / c.q ? Grade::assertion : Grade::report;
       },
       always,
       [](const RunConfig& c, const RandomStream& rng) {
         const auto rows = scan_positivity(c.p, c.q, {c.l}, c.n_samples, rng, 3.0, c.parallel());
         CheckOutcome o;
         o.value = rows[0].min_weight;
         o.tol = -c.tolerance("kernel.positivity", 1e-12);
         o.pass = o.value >= o.tol;
         o.detail = {{"negative_count", rows[0].negative_count}};
         return o;
       }},
      {"kernel.support_bound", always_assert, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const auto r = check_support_bound(c.p, c.q, c.n_samples, rng, 3.0, c.parallel());
         CheckOutcome o = at_most(static_cast<double>(r.violations), 0.0);
         o.detail = {{"max_excess", r.max_excess}};
         return o;
       }},
      {"rank1.haar_conjugation_bullet", always_assert, rank_one,
       [](const RunConfig& c, const RandomStream&) {
         const auto r = haar_rank1(c.p, c.l);
         return at_most(r.bullet_residual, c.tolerance("rank1.haar_conjugation_bullet", 1e-6));
       }},
      {"rank1.haar_conjugation_star", always_assert, rank_one,
       [](const RunConfig& c, const RandomStream&) {
         const auto r = haar_rank1(c.p, c.l);
         return at_most(r.star_residual, c.tolerance("rank1.haar_conjugation_star", 1e-6));
       }},
      {"rank1.haar_rescaling_reversed", always_report, rank_one,
       [](const RunConfig& c, const RandomStream&) {
         const auto r = haar_rank1(c.p, c.l);
         return at_most(r.bullet_reversed_residual,
                        c.tolerance("rank1.haar_rescaling_reversed", 1e-6));
       }},
      {"rank1.product_formula", always_assert, rank_one,
       [](const RunConfig& c, const RandomStream&) {
         const Rank1Convolution rule(c.p, 200, c.p == 1.0 ? 400 : 200);
         const double rho_t = c.p + c.l;
         std::vector<cplx> lams = c.lambda;
         lams.push_back(cplx(0.0, -rho_t));
         double worst = 0.0;
         for (const cplx& lam : lams) {
           for (double s : {0.3, 1.0, 2.0}) {
             for (double t : {0.3, 1.0, 2.0}) {
               worst = std::max(worst, rank1_product_residual(rule, lam, c.l, {ChamberPoint({s}), 0.4},
                                                              {ChamberPoint({t}), -1.1}));
             }
           }
         }
         return at_most(worst, c.tolerance("rank1.product_formula", 1e-8));
       }},
      {"rank1.chamber_product_formula", always_assert, rank_one,
       [](const RunConfig& c, const RandomStream&) {
         const Rank1Convolution rule(c.p, 200, c.p == 1.0 ? 400 : 200);
         double worst = 0.0;
         for (const cplx& lam : c.lambda) {
           for (double s : {0.3, 1.0, 2.0}) {
             for (double t : {0.3, 1.0, 2.0}) {
               worst = std::max(worst, check_chamber_product_formula(rule, lam, c.l, s, t));
             }
           }
         }
         return at_most(worst, c.tolerance("rank1.chamber_product_formula", 1e-8));
       }},
      {"rank1.signed_multiplicativity", always_assert, rank_one,
       [](const RunConfig& c, const RandomStream& rng) {
         const double s = 0.8;
         const double t = 1.3;
         const JacobiFunction phi(c.lambda.front(), JacobiParams{c.p - 1.0, c.l});
         auto tilde = [&](double x) { return std::pow(std::cosh(x), c.l) * phi(x); };
         const EmpiricalMeasure m = convolve_signed(ChamberPoint({s}), ChamberPoint({t}), c.p, c.l,
                                                    c.n_samples, rng, c.parallel());
         ComplexStats stats;
         const double n = static_cast<double>(m.size());
         for (std::size_t i = 0; i < m.size(); ++i) stats.add(n * m.weight(i) * tilde(m.chamber(i)[0]));
         const cplx target = tilde(s) * tilde(t);
         CheckOutcome o;
         o.value = std::abs(stats.mean() - target);
         o.std_error = stats.stderr_of_mean();
         o.tol = c.tolerance("rank1.signed_multiplicativity", 3.0) * stats.stderr_of_mean();
         o.pass = o.value <= o.tol;
         return o;
       }},
      {"sampling.kappa", always_assert, [](const RunConfig& c) { return c.p > 2.0 * c.q - 1.0; },
       [](const RunConfig& c, const RandomStream& rng) {
         const Estimate e = kappa_monte_carlo(c.p, c.q, c.n_samples, rng, c.parallel());
         const double exact = kappa(c.p, c.q);
         CheckOutcome o;
         o.value = std::abs(e.value.real() - exact);
         o.std_error = e.std_error;
         o.tol = c.tolerance("sampling.kappa", 3.0) * e.std_error;
         o.pass = o.value <= o.tol;
         o.detail = {{"closed_form", exact}, {"monte_carlo", e.value.real()}};
         return o;
       }},
      {"scan.positivity", always_report, always,
       [](const RunConfig& c, const RandomStream& rng) {
         const auto rows =
             scan_positivity(c.p, c.q, c.positivity_grid(), c.n_samples, rng, 3.0, c.parallel());
         CheckOutcome o;
         o.value = 0.0;
         json table = json::array();
         for (const auto& r : rows) {
           table.push_back({{"l", r.l}, {"min", r.min_weight}, {"negative", r.negative_count}});
           if (std::abs(r.l) <= 1.0 / c.q) o.value = std::min(o.value, r.min_weight);
         }
         o.tol = -1e-12;
         o.pass = o.value >= o.tol;
         o.detail = {{"rows", table}};
         return o;
       }},
      {"special.c_function_at_rho", always_assert, always,
       [](const RunConfig& c, const RandomStream&) {
         const Multiplicity k(c.p, c.q, c.l);
         const CFunctionValue v = c_function(rho(k), k);
         return at_most(std::abs(v.value - 1.0), c.tolerance("special.c_function_at_rho", 1e-12));
       }},
      {"special.c_inverse_growth", always_report, always,
       [](const RunConfig& c, const RandomStream&) {
         std::vector<double> lam;
         for (int j = 0; j < c.q; ++j) lam.push_back(2.0 * (c.q - j));
         const auto rows = c_inverse_growth_probe(c.q, {10.0, 20.0, 40.0, 80.0}, lam);
         CheckOutcome o;
         json table = json::array();
         double max_slope = 0.0;
         bool monotone = true;
         for (std::size_t i = 0; i < rows.size(); ++i) {
           table.push_back({{"p", rows[i].p}, {"inverse_modulus", rows[i].inverse_modulus},
                            {"log_slope", rows[i].log_slope}});
           if (i > 0) {
             max_slope = std::max(max_slope, std::abs(rows[i].log_slope));
             monotone = monotone && rows[i].inverse_modulus >= rows[i - 1].inverse_modulus;
           }
         }
         o.value = max_slope;
         o.tol = c.tolerance("special.c_inverse_growth", 10.0);
         o.pass = std::isfinite(max_slope) && max_slope <= o.tol;
         o.detail = {{"rows", table}, {"monotone", monotone}};
         return o;
       }},
  };
  return registry;
}

struct VerifyReport {
  json body;
  bool all_pass = true;
};

/// Runs every applicable check. Each check draws from its own stream
/// split off the seed by name, so checks are independent of one another.
inline VerifyReport run_verify(const RunConfig& config) {
  config.validate();
  const RandomStream root(config.seed);
  VerifyReport report;
  json checks = json::array();
  std::vector<const CheckSpec*> order;
  for (const CheckSpec& spec : check_registry()) order.push_back(&spec);
  std::sort(order.begin(), order.end(),
            [](const CheckSpec* a, const CheckSpec* b) { return a->name < b->name; });
  for (const CheckSpec* entry_spec : order) {
    const CheckSpec& spec = *entry_spec;
    if (!spec.applies(config)) continue;
    const Grade grade = spec.grade(config);
    CheckOutcome o;
    try {
      o = spec.run(config, root.split(spec.name));
    } catch (const std::exception& e) {
      o.pass = false;
      o.value = std::numeric_limits<double>::quiet_NaN();
      o.detail = {{"error", e.what()}};
    }
    json entry;
    entry["check"] = spec.name;
    entry["grade"] = to_string(grade);
    entry["value"] = o.value;
    entry["tol"] = o.tol;
    entry["stderr"] = o.std_error ? json(*o.std_error) : json(nullptr);
    entry["pass"] = o.pass;
    if (!o.detail.empty()) entry["detail"] = o.detail;
    checks.push_back(entry);
    if (grade == Grade::assertion && !o.pass) report.all_pass = false;
  }
  report.body["config"] = to_json(config);
  report.body["seed"] = config.seed;
  report.body["checks"] = checks;
  report.body["all_pass"] = report.all_pass;
  return report;
}

// ---------------------------------------------------------------------------
// Tables, scans and walks
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace detail

inline void write_positivity_csv(std::ostream& os, const std::vector<PositivityRow>& rows, int q,
                                 double p) {
  os << "q,p,l,min_weight,negative_count,samples\n";
  for (const auto& r : rows) {
    os << q << ',' << p << ',' << r.l << ',' << r.min_weight << ',' << r.negative_count << ','
       << r.samples << '\n';
  }
}

/// Writes kappa.csv, c_function.csv, haar_density.csv and positivity.csv
/// into `dir`; returns the list of files.
inline std::vector<std::filesystem::path> run_tables(const RunConfig& config,
                                                     const std::filesystem::path& dir) {
  config.validate();
  std::vector<std::filesystem::path> files;
  {
    const auto path = dir / "kappa.csv";
    auto out = detail::open_output(path);
    out << "q,p,kappa\n";
    for (int q = 1; q <= 3; ++q) {
      for (double dp : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double p = 2.0 * q - 1.0 + dp;
        out << q << ',' << p << ',' << kappa(p, q) << '\n';
      }
    }
    files.push_back(path);
  }
  {
    const auto path = dir / "c_function.csv";
    auto out = detail::open_output(path);
    out << "q,p,l,shift,lambda,status,c_re,c_im\n";
    const Multiplicity k(config.p, config.q, config.l);
    const std::vector<cplx> r = rho(k);
    for (double shift : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      for (double imag : {0.0, 1.0}) {
        std::vector<cplx> lam(r.size());
        for (std::size_t j = 0; j < lam.size(); ++j) lam[j] = r[j] + cplx(shift, imag * (j + 1.0));
        const CFunctionValue v = c_function(lam, k);
        std::string desc;
        for (std::size_t j = 0; j < lam.size(); ++j) desc += (j ? ";" : "") + format_complex(lam[j]);
        const char* status = v.status == CFunctionStatus::regular ? "regular"
                             : v.status == CFunctionStatus::pole  ? "pole"
                             : v.status == CFunctionStatus::zero  ? "zero"
                                                                  : "indeterminate";
        out << config.q << ',' << config.p << ',' << config.l << ',' << shift << ",\"" << desc
            << "\"," << status << ',' << v.value.real() << ',' << v.value.imag() << '\n';
      }
    }
    files.push_back(path);
  }
  {
    const auto path = dir / "haar_density.csv";
    auto out = detail::open_output(path);
    out << "variant,l,";
    for (int j = 1; j <= config.q; ++j) out << "t_" << j << ',';
    out << "density\n";
    const std::vector<std::pair<std::string, HaarVariant>> variants = {
        {"full", HaarVariant::full()},
        {"torus", HaarVariant::torus()},
        {"chamber", HaarVariant::chamber(config.l)}};
    for (const auto& [name, variant] : variants) {
      for (double top : {0.0, 0.5, 1.0, 2.0}) {
        for (bool tie : {false, true}) {
          std::vector<double> x(static_cast<std::size_t>(config.q));
          for (int j = 0; j < config.q; ++j) {
            x[static_cast<std::size_t>(j)] = tie ? top : top * (config.q - j) / config.q;
          }
          if (tie && config.q == 1) continue;
          const ChamberPoint t(x);
          out << name << ',' << variant.l << ',';
          for (double v : x) out << v << ',';
          out << haar_density(config.p, config.q, variant, t) << '\n';
        }
      }
    }
    files.push_back(path);
  }
  {
    const auto path = dir / "positivity.csv";
    auto out = detail::open_output(path);
    const RandomStream rng = RandomStream(config.seed).split("tables.positivity");
    write_positivity_csv(out,
                         scan_positivity(config.p, config.q, config.positivity_grid(),
                                         config.n_samples, rng, 3.0, config.parallel()),
                         config.q, config.p);
    files.push_back(path);
  }
  return files;
}

inline json run_scan(const RunConfig& config, std::ostream* csv = nullptr) {
  config.validate();
  const RandomStream rng = RandomStream(config.seed).split("scan.positivity");
  const auto rows = scan_positivity(config.p, config.q, config.positivity_grid(), config.n_samples,
                                    rng, 3.0, config.parallel());
  if (csv != nullptr) write_positivity_csv(*csv, rows, config.q, config.p);
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"l", r.l},
                     {"min_weight", r.min_weight},
                     {"negative_count", r.negative_count},
                     {"samples", r.samples},
                     {"within_positivity_range", std::abs(r.l) <= 1.0 / config.q}});
  }
  json out;
  out["config"] = to_json(config);
  out["seed"] = config.seed;
  out["positivity"] = table;
  return out;
}

inline json run_walk(const RunConfig& config, std::ostream* csv = nullptr) {
  config.validate();
  const RandomStream rng = RandomStream(config.seed).split("walk");
  const HypergroupElement start{ChamberPoint::zero(config.q), 0.0};
  const HypergroupElement step{config.step_point(), config.walk_step_theta};
  const auto path = random_walk(start, config.p, config.walk_steps, step, rng);
  if (csv != nullptr) {
    *csv << "step,";
    for (int j = 1; j <= config.q; ++j) *csv << "d_" << j << ',';
    *csv << "theta\n";
    csv->precision(17);
    for (std::size_t k = 0; k < path.size(); ++k) {
      *csv << k << ',';
      for (double v : path[k].t.coords()) *csv << v << ',';
      *csv << path[k].theta << '\n';
    }
  }
  double max_ratio_excess = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double bound = start.t.max_norm() + static_cast<double>(k) * step.t.max_norm();
    max_ratio_excess = std::max(max_ratio_excess, path[k].t.max_norm() - bound);
  }
  json out;
  out["config"] = to_json(config);
  out["seed"] = config.seed;
  out["steps"] = config.walk_steps;
  out["final"] = {{"t", path.back().t.coords()}, {"theta", path.back().theta}};
  out["support_bound_excess"] = max_ratio_excess;
  return out;
}

}  // namespace hyperbc

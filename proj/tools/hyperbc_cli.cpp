// Command line front end: verify | scan | walk | tables.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyperbc/harness.hpp"

namespace {

void emit(const hyperbc::json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw hyperbc::InvalidArgument("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BC-type hypergroup convolutions on C_q x R, C_q x T and C_q"};
  app.require_subcommand(0, 1);

  std::optional<int> q;
  std::optional<double> p;
  std::optional<double> l;
  std::vector<std::string> lambda;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> suite;
  std::optional<std::string> out;
  std::optional<std::string> config_path;
  std::optional<unsigned> threads;
  std::optional<std::size_t> steps;
  std::string csv_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override it");
    cmd->add_option("--q", q, "rank q >= 1");
    cmd->add_option("--p", p, "real parameter p >= 2q-1");
    cmd->add_option("--l", l, "real parameter l");
    cmd->add_option("--lambda", lambda, "spectral parameters, e.g. 0.5 2 1+0.3i");
    cmd->add_option("--n", n, "Monte Carlo sample count");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--out", out, "output path (verify/scan/walk: JSON file; tables: directory)");
    cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
  };
  add_common(&app);
  app.add_option("--suite", suite, "verify|scan|walk|tables (same as the subcommand)");

  auto* verify = app.add_subcommand("verify", "run the property checks and write a JSON report");
  auto* scan = app.add_subcommand("scan", "positivity scan of the signed kernel over l");
  auto* walk = app.add_subcommand("walk", "random walk on the hypergroup");
  auto* tables = app.add_subcommand("tables", "write CSV tables");
  for (auto* cmd : {verify, scan, walk, tables}) add_common(cmd);
  scan->add_option("--csv", csv_path, "also write the scan as CSV");
  walk->add_option("--csv", csv_path, "write the trajectory as CSV");
  walk->add_option("--steps", steps, "number of steps");

  CLI11_PARSE(app, argc, argv);

  try {
    hyperbc::RunConfig config;
    if (config_path) config = hyperbc::load_config(*config_path);
    if (suite) config.suite = hyperbc::parse_suite(*suite);
    if (verify->parsed()) config.suite = hyperbc::Suite::verify;
    if (scan->parsed()) config.suite = hyperbc::Suite::scan;
    if (walk->parsed()) config.suite = hyperbc::Suite::walk;
    if (tables->parsed()) config.suite = hyperbc::Suite::tables;
    if (q) config.q = *q;
    if (p) config.p = *p;
    if (l) config.l = *l;
    if (!lambda.empty()) {
      config.lambda.clear();
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        config.lambda.push_back(
            hyperbc::parse_complex(lambda[i], "lambda[" + std::to_string(i) + "]"));
      }
    }
    if (n) config.n_samples = *n;
    if (seed) config.seed = *seed;
    if (out) config.output_path = *out;
    if (threads) config.threads = *threads;
    if (steps) config.walk_steps = *steps;
    config.validate();

    switch (config.suite) {
      case hyperbc::Suite::verify: {
        const auto report = hyperbc::run_verify(config);
        emit(report.body, config.output_path);
        for (const auto& c : report.body["checks"]) {
          std::fprintf(stderr, "%-40s %-9s %s\n", c["check"].get<std::string>().c_str(),
                       c["grade"].get<std::string>().c_str(),
                       c["pass"].get<bool>() ? "pass" : "FAIL");
        }
        return report.all_pass ? 0 : 1;
      }
      case hyperbc::Suite::scan: {
        std::ofstream csv;
        if (!csv_path.empty()) csv.open(csv_path);
        emit(hyperbc::run_scan(config, csv_path.empty() ? nullptr : &csv), config.output_path);
        return 0;
      }
      case hyperbc::Suite::walk: {
        std::ofstream csv;
        if (!csv_path.empty()) csv.open(csv_path);
        emit(hyperbc::run_walk(config, csv_path.empty() ? nullptr : &csv), config.output_path);
        return 0;
      }
      case hyperbc::Suite::tables: {
        const std::filesystem::path dir = config.output_path.empty() ? "." : config.output_path;
        for (const auto& f : hyperbc::run_tables(config, dir)) std::cout << f.string() << "\n";
        return 0;
      }
    }
  } catch (const hyperbc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

// tdirac: verification suites, plane-wave checks and the metric catalog.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
// error, 3 precondition or metric-axiom violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tdirac/errors.hpp"
#include "tdirac/geometry.hpp"
#include "tdirac/harness.hpp"
#include "tdirac/io.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kPrecondition = 3 };

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw tdirac::ConfigError("--tol expects key=value, got '" + item + "'");
    try {
      std::size_t used = 0;
      const std::string value = item.substr(eq + 1);
      out[item.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw tdirac::ConfigError("--tol value is not a number in '" + item + "'");
    }
  }
  return out;
}

Eigen::Vector4d parse_momentum(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw tdirac::ConfigError("--p expects four comma-separated numbers, got '" + text + "'");
    }
  }
  if (v.size() != 4) throw tdirac::ConfigError("--p expects four comma-separated numbers, got '" + text + "'");
  return Eigen::Vector4d(v[0], v[1], v[2], v[3]);
}

struct Output {
  std::string out_path;
  bool table = false;
  bool no_timing = false;
};

int emit(const tdirac::Report& report, const Output& o) {
  const std::string body = report.to_json(!o.no_timing).dump(2) + "\n";
  if (o.out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(o.out_path);
    if (!f) throw tdirac::ConfigError("cannot write " + o.out_path);
    f << body;
  }
  if (o.table) std::cerr << report.table();
  return report.all_passed() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor Dirac verification harness"};
  app.set_version_flag("--version", tdirac::kVersion);
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Output output;
  auto add_output = [&output](CLI::App* sub) {
    sub->add_option("--out", output.out_path, "Write the JSON report to this file instead of stdout");
    sub->add_flag("--table", output.table, "Print a human-readable table to stderr");
    sub->add_flag("--no-timing", output.no_timing, "Omit wall-time fields from the report");
  };

  // verify
  tdirac::SuiteConfig scfg;
  std::string verify_config;
  std::string verify_box;
  std::vector<std::string> verify_tol;
  bool verify_inject = false;
  CLI::App* verify = app.add_subcommand("verify", "Run a named verification suite");
  verify->set_help_flag("--help", "Print this help message and exit");
  verify->add_option("--config", verify_config, "JSON configuration file; flags override its values");
  auto* o_suite = verify->add_option("--suite", scfg.suite, "algebra | geometry | calculus | dirac | affine | all")
                      ->capture_default_str();
  auto* o_metric = verify->add_option("--metric", scfg.metric, "Catalog id with parameters, e.g. flrw:1,0.1, or sampled:<file>")
                       ->capture_default_str();
  auto* o_box = verify->add_option("--box", verify_box, "Chart box lo:hi[@n] or per-axis lo0:hi0,...[@n0,...]");
  auto* o_h = verify->add_option("--h", scfg.h, "Finite-difference step")->capture_default_str();
  auto* o_seed = verify->add_option("--seed", scfg.seed, "Random seed")->capture_default_str();
  auto* o_samples = verify->add_option("--samples", scfg.samples, "Draws per check")->capture_default_str();
  verify->add_option("--tol", verify_tol, "Tolerance override check-id=value (repeatable)");
  verify->add_flag("--inject-failure", verify_inject, "Add a check that always fails");
  add_output(verify);

  // planewave
  tdirac::PlanewaveConfig pcfg;
  std::string pw_config;
  std::string pw_p;
  std::string pw_box;
  std::vector<std::string> pw_tol;
  bool pw_inject = false;
  CLI::App* planewave = app.add_subcommand("planewave", "Build and check a Minkowski plane-wave solution");
  planewave->set_help_flag("--help", "Print this help message and exit");
  planewave->add_option("--config", pw_config, "JSON configuration file; flags override its values");
  auto* o_p = planewave->add_option("--p", pw_p, "Lower momentum components t,x,y,z (default 1,0,0,0)");
  auto* o_m = planewave->add_option("--m", pcfg.m, "Mass")->capture_default_str();
  auto* o_sign = planewave->add_option("--sign", pcfg.sign, "Frequency sign, +1 or -1")->capture_default_str();
  auto* o_pbox = planewave->add_option("--box", pw_box, "Chart box lo:hi[@n] or per-axis lo0:hi0,...[@n0,...]");
  auto* o_ph = planewave->add_option("--h", pcfg.h, "Finite-difference step")->capture_default_str();
  auto* o_pseed = planewave->add_option("--seed", pcfg.seed, "Random seed")->capture_default_str();
  auto* o_psamples = planewave->add_option("--samples", pcfg.samples, "Sample points")->capture_default_str();
  planewave->add_option("--tol", pw_tol, "Tolerance override check-id=value (repeatable)");
  planewave->add_flag("--inject-failure", pw_inject, "Add a check that always fails");
  add_output(planewave);

  CLI::App* catalog = app.add_subcommand("catalog", "List the metric catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*catalog) {
      for (const auto& entry : tdirac::catalog_entries())
        std::cout << entry.name << "  [" << entry.parameters << "]  " << entry.description << "\n";
      return kPass;
    }

    if (*verify) {
      tdirac::SuiteConfig cfg;
      if (!verify_config.empty()) cfg = tdirac::suite_config_from_json(tdirac::read_json_file(verify_config));
      if (o_suite->count()) cfg.suite = scfg.suite;
      if (o_metric->count()) cfg.metric = scfg.metric;
      if (o_box->count()) cfg.box = verify_box;
      if (o_h->count()) cfg.h = scfg.h;
      if (o_seed->count()) cfg.seed = scfg.seed;
      if (o_samples->count()) cfg.samples = scfg.samples;
      for (const auto& [k, v] : parse_tolerances(verify_tol)) cfg.tolerances[k] = v;
      if (verify_inject) cfg.inject_failure = true;
      return emit(tdirac::run_suite(cfg), output);
    }

    tdirac::PlanewaveConfig cfg;
    if (!pw_config.empty()) cfg = tdirac::planewave_config_from_json(tdirac::read_json_file(pw_config));
    if (o_p->count()) cfg.p = parse_momentum(pw_p);
    if (o_m->count()) cfg.m = pcfg.m;
    if (o_sign->count()) cfg.sign = pcfg.sign;
    if (o_pbox->count()) cfg.box = pw_box;
    if (o_ph->count()) cfg.h = pcfg.h;
    if (o_pseed->count()) cfg.seed = pcfg.seed;
    if (o_psamples->count()) cfg.samples = pcfg.samples;
    for (const auto& [k, v] : parse_tolerances(pw_tol)) cfg.tolerances[k] = v;
    if (pw_inject) cfg.inject_failure = true;
    return emit(tdirac::run_planewave(cfg), output);
  } catch (const tdirac::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const tdirac::UnknownMetric& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const tdirac::OffShellMomentum& e) {
    std::cerr << "off-shell momentum: " << e.what() << "\n";
    return kPrecondition;
  } catch (const tdirac::MetricAxiomViolation& e) {
    std::cerr << "metric axiom violation: " << e.what() << "\n";
    return kPrecondition;
  } catch (const tdirac::Error& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return kPrecondition;
  }
}

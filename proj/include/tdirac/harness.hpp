#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdirac/io.hpp"

namespace tdirac {

inline constexpr const char* kVersion = "1.0.0";

// Residual normalization per tolerance tier, with s the operand scale:
//   algebraic  r / max(1, s)  against 1e-11
//   fd         r / (1 + s)    against max(50 h^2, 1e-9)
//   nested_fd  r / (1 + s)    against 2 max(50 h^2, 1e-9)
//   absolute   r              against a fixed bound
enum class Tier { algebraic, fd, nested_fd, absolute };
std::string to_string(Tier t);

struct SuiteConfig {
  std::string suite = "all";
  std::string metric = "minkowski";  // catalog descriptor ("flrw:1,0.1") or "sampled:<path>"
  std::optional<std::string> box;    // parse_box syntax; the metric's own box when unset
  double h = 1e-3;
  std::uint64_t seed = 42;
  int samples = 20;
  std::map<std::string, double> tolerances;  // check id -> tolerance
  bool inject_failure = false;               // adds a check that always fails
};

struct PlanewaveConfig {
  Eigen::Vector4d p = Eigen::Vector4d(1, 0, 0, 0);  // lower components p_mu
  double m = 1.0;
  int sign = 1;
  std::optional<std::string> box;
  double h = 1e-3;
  std::uint64_t seed = 42;
  int samples = 100;
  std::map<std::string, double> tolerances;
  bool inject_failure = false;
};

Json to_json(const SuiteConfig& cfg);
Json to_json(const PlanewaveConfig& cfg);
// Keys absent from `j` keep the values of `base`. Throws ConfigError.
SuiteConfig suite_config_from_json(const Json& j, SuiteConfig base = {});
PlanewaveConfig planewave_config_from_json(const Json& j, PlanewaveConfig base = {});

struct CheckRecord {
  std::string id;
  std::string anchor;
  Tier tier = Tier::algebraic;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int samples = 0;
  double wall_time_ms = 0.0;
};

struct Report {
  std::string kind;  // "verify" or "planewave"
  Json config;
  std::string metric_label;
  bool interpolated_metric = false;
  std::vector<CheckRecord> checks;  // sorted by id

  int passed() const;
  int failed() const;
  bool all_passed() const { return failed() == 0; }
  // With include_timing = false the output depends only on the configuration.
  Json to_json(bool include_timing = true) const;
  std::string table() const;
};

const std::vector<std::string>& suite_names();

// Throws ConfigError for an unknown suite, MetricAxiomViolation (naming the
// grid node) when the metric fails on the box grid.
Report run_suite(const SuiteConfig& cfg);
// Throws OffShellMomentum / PreconditionViolation for invalid momenta.
Report run_planewave(const PlanewaveConfig& cfg);

}  // namespace tdirac

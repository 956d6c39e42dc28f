#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homog/cell.hpp"
#include "homog/norms_rates.hpp"

namespace homog::cli {

inline constexpr const char* kVersion = "homoglab 0.1.0";

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kResolutionError = 3;
inline constexpr int kAssertionError = 4;

struct SweepConfig {
  std::string problem;  // dirichlet | neumann | neumann_grad | theorem13
  ConvexDomain domain;
  BoundaryData data;
  std::optional<PeriodicTensor> tensor;  // theorem13
  std::vector<double> p_list;
  std::vector<double> eps_list;
  FitModel model{FitModel::pure_power};
  bool report_both_models{true};
  std::optional<double> min_slope;
  std::optional<double> max_slope;
  double kappa{0};  // neumann_grad
  SweepOptions sweep;
  std::string raw_text;  // config echo for the manifest

  SweepConfig() : domain(ConvexDomain::ball(2, 1.0)), data(2) {}
};

// Parses and validates a sweep config; throws ConfigError with a named guard.
SweepConfig parse_sweep_config(const nlohmann::json& j);

struct CliResult {
  int exit_code{0};
  std::string csv;
  std::string manifest;  // JSON text
  std::string message;
};

CliResult run_sweep_command(const SweepConfig& cfg, std::uint64_t seed, int threads);

// kind: kernel | equidist | stationary-phase | cell
CliResult run_certify_command(const std::string& kind, std::uint64_t seed, int threads);

// Full CLI entry point (also used by tests). argv follows main() conventions.
int run_cli(int argc, const char* const* argv);

}  // namespace homog::cli

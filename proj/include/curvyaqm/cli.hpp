#pragma once

// Configuration and subcommands of the curvyaqm command-line tool.
//
// Human-facing units (ms, %, Mb/s, bytes) live only in this layer; the
// library underneath works in seconds, fractions, bits/second and bits.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvyaqm/errors.hpp"
#include "curvyaqm/model.hpp"

namespace curvyaqm::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitSaturated = 3,
  kExitUnstable = 4,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct TrafficSpec {
  std::string preset = "reno";       // "reno" or "cubic-reno"
  std::optional<double> tcp_constant;  // overrides the preset
  double mss_bytes = 1500.0;
  double base_rtt_ms = 20.0;
};

struct AqmSpec {
  std::vector<double> curviness;
  double design_delay_ms = 20.0;
  double design_drop_percent = 2.0;
  /// Explicit D_q instead of anchoring; only valid with one curviness.
  std::optional<double> scale_delay_ms;
  bool clamp = false;
  /// Defaults to the design delay.
  std::optional<double> clamp_target_ms;
};

struct GridSpec {
  double min = 0.02;
  double max = 2.0;
  int points = 200;
  std::string scale = "log";  // "log" or "linear"
  std::vector<double> extra;  // merged into the grid
};

struct SimSpec {
  std::optional<int> n_flows;
  long duration_rounds = 20000;
  std::optional<long> warmup_rounds;  // default 30% of duration
  std::uint64_t seed = 1;
  int seeds = 1;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix = "curvyaqm";
};

struct RunConfig {
  TrafficSpec traffic;
  AqmSpec aqm;
  std::optional<double> capacity_mbps;  // link
  GridSpec grid;
  std::optional<double> flows;          // provision input
  std::vector<double> agg_factors = {4.0, 25.0, 100.0};
  std::optional<double> load;           // solve input
  bool csv = false;                     // solve output format
  SimSpec sim;
  OutputSpec output;
};

/// Parses a JSON config document. Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
/// Reads and parses a config file; IoError if unreadable.
RunConfig load_config(const std::string& path);
/// Applies CURVYAQM_SEED when set.
void apply_env(RunConfig& cfg);

// Conversions into library values; they throw UsageError on bad input.
TrafficModel traffic_model(const RunConfig& cfg);
DesignPoint design_point(const RunConfig& cfg);
/// Curvy members in the order given, clamp last.
std::vector<AqmCurve> aqm_curves(const RunConfig& cfg);
std::vector<double> load_grid(const RunConfig& cfg);

int cmd_curve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_provision(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Whole command line: parses argv, merges config file, environment and
/// flags (flags win), runs the subcommand and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// Locale-independent number formatting.
/// Shortest string that reads back to the same double.
std::string format_exact(double v);
/// `digits` significant digits, trailing zeros trimmed.
std::string format_sig(double v, int digits = 8);

}  // namespace curvyaqm::cli

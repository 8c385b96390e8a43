#pragma once

// Round-based AIMD simulator used to check the analytic fixed points.
//
// Each round lasts one mean RTT. The queue holds whatever part of the
// aggregate window does not fit in the base-RTT pipe; the AQM turns that
// delay into a drop probability; each flow then either halves its window
// (at most one loss event per round) or grows it by one segment.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "curvyaqm/model.hpp"

namespace curvyaqm {

/// Name of the generator behind every run, reported with results.
inline constexpr const char* kSimRngName = "mt19937_64";

inline constexpr long kDefaultDurationRounds = 20000;
inline constexpr long kDefaultWarmupRounds = 6000;
/// Per-round step of the clamp controller: p += gain * (d_q - T) / T.
inline constexpr double kDefaultClampGain = 0.002;
/// Abort once d_q exceeds this many base RTTs.
inline constexpr double kDivergenceRtts = 100.0;

struct SimConfig {
  TrafficModel traffic;
  double capacity = 0.0;  // bits/second
  int n_flows = 1;
  AqmCurve aqm = AqmCurve::clamp(0.020);
  long duration_rounds = kDefaultDurationRounds;
  long warmup_rounds = kDefaultWarmupRounds;
  std::uint64_t seed = 1;
  double clamp_gain = kDefaultClampGain;

  void validate() const;
};

struct SimResult {
  double mean_dq = 0.0;  // seconds, time-weighted
  double mean_p = 0.0;   // time-weighted
  double mean_rate_per_flow = 0.0;
  double utilization = 0.0;
  long samples = 0;  // measured rounds
  double min_window = 0.0;  // smallest cwnd of any flow, whole run

  bool operator==(const SimResult&) const = default;
};

struct RoundSample {
  long round = 0;
  double queue_delay = 0.0;
  double drop = 0.0;
  double rate_total = 0.0;  // bits/second delivered this round
};

using TraceSink = std::function<void(const RoundSample&)>;

/// Runs one seeded simulation. Every round, warmup included, is passed to
/// `trace` when given. Throws InstabilityError when the queue diverges.
SimResult run(const SimConfig& cfg, const TraceSink& trace = {});

/// Independent runs in parallel (OpenMP); results in input order. If any
/// run throws, the exception of the lowest-index failing run is rethrown.
std::vector<SimResult> run_batch(std::span<const SimConfig> cfgs);

/// Single-threaded reference for run_batch.
std::vector<SimResult> run_batch_serial(std::span<const SimConfig> cfgs);

/// Arithmetic mean of runs with seeds cfg.seed, cfg.seed + 1, ...
SimResult seed_average(const SimConfig& cfg, int n_seeds);

/// Simulated versus analytic steady state at the same normalized load.
struct FixedPointReport {
  double load = 0.0;
  double analytic_dq = 0.0;
  double analytic_p = 0.0;
  double analytic_rate = 0.0;
  SimResult sim;
  double dq_rel_error = 0.0;
  double p_rel_error = 0.0;
  double rate_rel_error = 0.0;
};

/// Runs `n_seeds` seeds (averaged) and compares against the analytic
/// solution at L = normalized_load(traffic, n_flows, capacity). Clamp
/// configurations compare against clamp_point.
FixedPointReport fixed_point_check(const SimConfig& cfg, int n_seeds = 1);

}  // namespace curvyaqm

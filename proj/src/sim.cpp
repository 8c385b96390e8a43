#include "curvyaqm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "curvyaqm/errors.hpp"
#include "curvyaqm/steady_state.hpp"

namespace curvyaqm {

namespace {

// Uniform in [0, 1) from the top 53 bits, so the stream does not depend on
// the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// 1 - (1 - p)^w without cancellation for small p.
double round_loss_prob(double p, double window) {
  if (p >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  return -std::expm1(window * std::log1p(-p));
}

double relative_error(double measured, double expected) {
  if (expected == 0.0) return std::abs(measured);
  return std::abs(measured - expected) / std::abs(expected);
}

}  // namespace

void SimConfig::validate() const {
  traffic.validate();
  if (!(capacity > 0.0)) throw DomainError("capacity must be > 0");
  if (n_flows < 1) throw DomainError("need at least one flow");
  if (duration_rounds < 1) throw DomainError("duration must be >= 1 round");
  if (warmup_rounds < 0 || warmup_rounds >= duration_rounds) {
    throw DomainError("warmup must lie in [0, duration)");
  }
  if (!(clamp_gain > 0.0)) throw DomainError("clamp gain must be > 0");
}

SimResult run(const SimConfig& cfg, const TraceSink& trace) {
  cfg.validate();
  const double s = cfg.traffic.mss_bits;
  const double base_rtt = cfg.traffic.base_rtt;
  const double capacity = cfg.capacity;
  const double pipe_bits = capacity * base_rtt;
  const double guard = kDivergenceRtts * base_rtt;

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> cwnd(static_cast<std::size_t>(cfg.n_flows), 1.0);
  double clamp_p = 0.0;
  double min_window = 1.0;

  double sum_time = 0.0;
  double sum_dq = 0.0;
  double sum_p = 0.0;
  double sum_bits = 0.0;
  long samples = 0;

  for (long round = 0; round < cfg.duration_rounds; ++round) {
    double window = 0.0;
    for (double w : cwnd) window += w;
    const double bits = window * s;
    const double dq = std::max(0.0, (bits - pipe_bits) / capacity);
    if (dq > guard) {
      throw InstabilityError("queuing delay " + std::to_string(dq) +
                             " s exceeded the divergence guard at round " +
                             std::to_string(round));
    }

    double p;
    if (cfg.aqm.is_clamp()) {
      const double target = cfg.aqm.as_clamp().target;
      clamp_p = std::clamp(clamp_p + cfg.clamp_gain * (dq - target) / target,
                           0.0, 1.0);
      p = clamp_p;
    } else {
      p = drop_prob(cfg.aqm, dq);
    }

    const double duration = base_rtt + dq;
    if (trace) trace(RoundSample{round, dq, p, bits / duration});
    if (round >= cfg.warmup_rounds) {
      sum_time += duration;
      sum_dq += dq * duration;
      sum_p += p * duration;
      sum_bits += bits;
      ++samples;
    }

    for (double& w : cwnd) {
      if (uniform01(rng) < round_loss_prob(p, w)) {
        w = std::max(1.0, 0.5 * w);
      } else {
        w += 1.0;
      }
      min_window = std::min(min_window, w);
    }
  }

  SimResult r;
  r.mean_dq = sum_dq / sum_time;
  r.mean_p = sum_p / sum_time;
  r.mean_rate_per_flow = sum_bits / (sum_time * cfg.n_flows);
  r.utilization = sum_bits / (sum_time * capacity);
  r.samples = samples;
  r.min_window = min_window;
  return r;
}

std::vector<SimResult> run_batch(std::span<const SimConfig> cfgs) {
  std::vector<SimResult> results(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  const auto n = static_cast<std::ptrdiff_t>(cfgs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = run(cfgs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<SimResult> run_batch_serial(std::span<const SimConfig> cfgs) {
  std::vector<SimResult> results;
  results.reserve(cfgs.size());
  for (const auto& cfg : cfgs) results.push_back(run(cfg));
  return results;
}

SimResult seed_average(const SimConfig& cfg, int n_seeds) {
  if (n_seeds < 1) throw DomainError("need at least one seed");
  std::vector<SimConfig> cfgs(static_cast<std::size_t>(n_seeds), cfg);
  for (int i = 0; i < n_seeds; ++i) cfgs[i].seed = cfg.seed + i;
  const auto results = run_batch(cfgs);

  SimResult avg;
  avg.min_window = results.front().min_window;
  for (const auto& r : results) {
    avg.mean_dq += r.mean_dq;
    avg.mean_p += r.mean_p;
    avg.mean_rate_per_flow += r.mean_rate_per_flow;
    avg.utilization += r.utilization;
    avg.samples += r.samples;
    avg.min_window = std::min(avg.min_window, r.min_window);
  }
  avg.mean_dq /= n_seeds;
  avg.mean_p /= n_seeds;
  avg.mean_rate_per_flow /= n_seeds;
  avg.utilization /= n_seeds;
  return avg;
}

FixedPointReport fixed_point_check(const SimConfig& cfg, int n_seeds) {
  cfg.validate();
  FixedPointReport rep;
  rep.load = normalized_load(cfg.traffic, cfg.n_flows, cfg.capacity);
  const CurvePoint analytic = solve_point(cfg.traffic, cfg.aqm, rep.load);
  rep.analytic_dq = analytic.queue_delay;
  rep.analytic_p = analytic.drop;
  rep.analytic_rate = analytic.rate;
  rep.sim = seed_average(cfg, n_seeds);
  rep.dq_rel_error = relative_error(rep.sim.mean_dq, rep.analytic_dq);
  rep.p_rel_error = relative_error(rep.sim.mean_p, rep.analytic_p);
  rep.rate_rel_error =
      relative_error(rep.sim.mean_rate_per_flow, rep.analytic_rate);
  return rep;
}

}  // namespace curvyaqm

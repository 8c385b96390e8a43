#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <locale>
#include <optional>
#include <system_error>
#include <ostream>
#include <string>
#include <vector>

#include "curvyaqm/cli.hpp"
#include "curvyaqm/provisioning.hpp"
#include "curvyaqm/sim.hpp"
#include "curvyaqm/steady_state.hpp"

namespace curvyaqm::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kMbps = 1e6;
constexpr double kMs = 1e3;

// Per-flow rates marked along the top axis of the plot.
constexpr double kRateLandmarksMbps[] = {10.0, 4.0, 2.0, 1.0, 0.5, 0.25};

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const SaturationError& e) {
    err << "error: " << e.what() << '\n'
        << "maximum supportable L: " << format_sig(e.max_load()) << '\n';
    return kExitSaturated;
  } catch (const InstabilityError& e) {
    err << "error: simulation unstable: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

fs::path output_path(const RunConfig& cfg, const std::string& suffix) {
  return fs::path(cfg.output.dir) / (cfg.output.prefix + suffix);
}

std::ofstream open_output(const fs::path& path) {
  // Binary mode keeps LF line endings on every platform.
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.imbue(std::locale::classic());
  return f;
}

void finish(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw IoError("error writing " + path.string());
}

std::string curviness_label(double u) { return format_exact(u); }

void warn_concave(const RunConfig& cfg, std::ostream& err) {
  for (double u : cfg.aqm.curviness) {
    if (u < 1.0) {
      err << "warning: curviness u=" << format_sig(u)
          << " < 1 gives a concave curve; outside the usual range\n";
    }
  }
}

const AqmCurve& single_curve(const std::vector<AqmCurve>& curves) {
  if (curves.size() != 1) {
    throw UsageError("this command needs exactly one AQM curve, got " +
                     std::to_string(curves.size()));
  }
  return curves.front();
}

void write_family_csv(std::ostream& os, const CurveFamily& family) {
  os << "L,u,dq_ms,p,saturated\n";
  for (std::size_t m = 0; m < family.curviness.size(); ++m) {
    const std::string u = curviness_label(family.curviness[m]);
    for (const auto& pt : family.points[m]) {
      os << format_exact(pt.load) << ',' << u << ','
         << format_exact(pt.queue_delay * kMs) << ',' << format_exact(pt.drop)
         << ',' << (pt.saturated ? "1" : "0") << '\n';
    }
  }
}

void write_plot_script(std::ostream& os, const CurveFamily& family,
                       const TrafficModel& tm, const std::string& csv_name,
                       const std::string& png_name) {
  const double lo = family.grid.front();
  const double hi = family.grid.back();
  os << "# Queuing delay (left axis, solid) and drop probability (right axis,\n"
     << "# dashed) against normalised load. Render with: gnuplot <this file>\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 1000,650\n"
     << "set output '" << png_name << "'\n"
     << "set logscale x\n"
     << "set xrange [" << format_exact(lo) << ":" << format_exact(hi) << "]\n"
     << "set xlabel 'Normalised load, L'\n"
     << "set ylabel 'Queuing delay [ms]'\n"
     << "set y2label 'Drop probability'\n"
     << "set yrange [0:*]\n"
     << "set y2range [0:1]\n"
     << "set ytics nomirror\n"
     << "set y2tics\n"
     << "set link x2\n"
     << "set x2label 'Per-flow rate'\n"
     << "set x2tics (";
  bool first = true;
  for (double mbps : kRateLandmarksMbps) {
    const double load =
        tm.tcp_constant * tm.mss_bits / (tm.base_rtt * mbps * kMbps);
    if (load < lo || load > hi) continue;
    os << (first ? "" : ", ") << "'" << format_sig(mbps, 4) << " Mb/s' "
       << format_sig(load, 10);
    first = false;
  }
  os << ")\n"
     << "set key outside right\n"
     << "plot \\\n";
  for (std::size_t m = 0; m < family.curviness.size(); ++m) {
    const std::string u = curviness_label(family.curviness[m]);
    const std::string title = std::isinf(family.curviness[m])
                                  ? std::string("clamp")
                                  : "u=" + u;
    const std::string filter = "(strcol(2) eq '" + u + "' ? ";
    const std::size_t color = m + 1;
    os << "  '" << csv_name << "' every ::1 using 1:" << filter
       << "$3 : NaN) axes x1y1 with lines lc " << color
       << " dt 1 title 'delay " << title << "', \\\n"
       << "  '" << csv_name << "' every ::1 using 1:" << filter
       << "$4 : NaN) axes x1y2 with lines lc " << color
       << " dt 2 title 'drop " << title << "'"
       << (m + 1 < family.curviness.size() ? ", \\\n" : "\n");
  }
}

int curve_impl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.aqm.curviness.empty()) {
    throw UsageError("curve needs at least one curviness value (--u)");
  }
  warn_concave(cfg, err);
  const TrafficModel tm = traffic_model(cfg);
  const auto curves = aqm_curves(cfg);
  const auto grid = load_grid(cfg);
  const CurveFamily family = solve_family(tm, curves, grid);

  const fs::path csv_path = output_path(cfg, ".csv");
  const fs::path gp_path = output_path(cfg, ".gp");
  {
    auto f = open_output(csv_path);
    write_family_csv(f, family);
    finish(f, csv_path);
  }
  {
    auto f = open_output(gp_path);
    write_plot_script(f, family, tm, csv_path.filename().string(),
                      output_path(cfg, ".png").filename().string());
    finish(f, gp_path);
  }
  out << "wrote " << csv_path.string() << '\n'
      << "wrote " << gp_path.string() << '\n';
  return kExitOk;
}

int solve_impl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.load || !(*cfg.load > 0.0) || !std::isfinite(*cfg.load)) {
    throw UsageError("solve needs a normalized load --load > 0");
  }
  warn_concave(cfg, err);
  const double load = *cfg.load;
  const TrafficModel tm = traffic_model(cfg);
  const auto curves = aqm_curves(cfg);
  const AqmCurve& curve = single_curve(curves);

  double dq;
  double p;
  if (curve.is_clamp()) {
    const ClampPoint cp = clamp_point(tm, curve.as_clamp().target, load);
    if (cp.saturated) {
      const double target = curve.as_clamp().target;
      throw SaturationError("clamp needs p > 1 at this load",
                            (tm.base_rtt + target) / tm.base_rtt);
    }
    dq = cp.queue_delay;
    p = cp.probability;
  } else {
    dq = solve_delay(tm, curve, load);
    p = drop_prob(curve, dq);
  }
  const double rtt_s = rtt(tm, dq);
  const double rate = tm.tcp_constant * tm.mss_bits / (tm.base_rtt * load);
  std::optional<double> flows;
  if (cfg.capacity_mbps) {
    flows = load * tm.base_rtt * (*cfg.capacity_mbps * kMbps) /
            (tm.tcp_constant * tm.mss_bits);
  }

  if (cfg.csv) {
    out << "L,dq_ms,p_percent,dR_ms,x_mbps,n\n"
        << format_exact(load) << ',' << format_exact(dq * kMs) << ','
        << format_exact(p * 100.0) << ',' << format_exact(rtt_s * kMs) << ','
        << (flows ? format_exact(rate / kMbps) : "") << ','
        << (flows ? format_exact(*flows) : "") << '\n';
    return kExitOk;
  }
  out << "L: " << format_sig(load) << '\n'
      << "dq_ms: " << format_sig(dq * kMs) << '\n'
      << "p_percent: " << format_sig(p * 100.0) << '\n'
      << "dR_ms: " << format_sig(rtt_s * kMs) << '\n';
  if (flows) {
    out << "x_mbps: " << format_sig(rate / kMbps) << '\n'
        << "n: " << format_sig(*flows) << '\n';
  }
  return kExitOk;
}

int provision_impl(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.flows.has_value() == cfg.capacity_mbps.has_value()) {
    throw UsageError(
        "provision needs exactly one of --flows or --capacity-mbps");
  }
  const TrafficModel tm = traffic_model(cfg);
  const DesignPoint dp = design_point(cfg);
  for (double m : cfg.agg_factors) {
    if (!(m >= 1.0)) throw UsageError("aggregation factors must be >= 1");
  }

  ProvisioningInput in{tm, dp, 0.0};
  double capacity;
  if (cfg.flows) {
    if (!(*cfg.flows > 0.0)) throw UsageError("--flows must be > 0");
    in.flows = *cfg.flows;
    capacity = required_capacity(in);
  } else {
    if (!(*cfg.capacity_mbps > 0.0)) {
      throw UsageError("--capacity-mbps must be > 0");
    }
    capacity = *cfg.capacity_mbps * kMbps;
    in.flows = supportable_flows(tm, capacity, dp);
  }

  out << "design_point: dq_ms=" << format_sig(dp.dq_star * kMs)
      << " p_percent=" << format_sig(dp.p_star * 100.0) << '\n'
      << "base_rtt_ms: " << format_sig(tm.base_rtt * kMs) << '\n'
      << "flows: " << format_sig(in.flows) << '\n'
      << "capacity_mbps: " << format_sig(capacity / kMbps) << '\n'
      << '\n'
      << "m,dq_target_ms,factor,capacity_mbps,flows,below_queue_floor\n";
  const auto rows = plan_aggregation(in, cfg.agg_factors);
  for (const auto& row : rows) {
    out << format_sig(row.agg_factor) << ','
        << format_sig(row.delay_target * kMs) << ','
        << format_sig(row.factor) << ',' << format_sig(row.capacity / kMbps)
        << ',' << format_sig(row.flows) << ','
        << (row.below_queue_floor ? "yes" : "no") << '\n';
  }
  for (const auto& row : rows) {
    if (row.below_queue_floor) {
      out << "warning: at m=" << format_sig(row.agg_factor)
          << " the delay target is under " << format_sig(kMinQueuePackets)
          << " packets of serialization; the queue will not shrink that far\n";
    }
  }
  return kExitOk;
}

int simulate_impl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.capacity_mbps) throw UsageError("simulate needs --capacity-mbps");
  if (!cfg.sim.n_flows) throw UsageError("simulate needs --n-flows");
  if (cfg.sim.seeds < 1) throw UsageError("--seeds must be >= 1");
  warn_concave(cfg, err);
  const auto curves = aqm_curves(cfg);

  SimConfig sc;
  sc.traffic = traffic_model(cfg);
  sc.capacity = *cfg.capacity_mbps * kMbps;
  sc.n_flows = *cfg.sim.n_flows;
  sc.aqm = single_curve(curves);
  sc.duration_rounds = cfg.sim.duration_rounds;
  sc.warmup_rounds =
      cfg.sim.warmup_rounds.value_or(cfg.sim.duration_rounds * 3 / 10);
  sc.seed = cfg.sim.seed;
  try {
    sc.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  const fs::path trace_path = output_path(cfg, "_trace.csv");
  {
    auto f = open_output(trace_path);
    f << "round,dq_ms,p,rate_total\n";
    run(sc, [&f](const RoundSample& r) {
      f << std::to_string(r.round) << ',' << format_exact(r.queue_delay * kMs) << ','
        << format_exact(r.drop) << ',' << format_exact(r.rate_total) << '\n';
    });
    finish(f, trace_path);
  }

  const FixedPointReport rep = fixed_point_check(sc, cfg.sim.seeds);
  out << "wrote " << trace_path.string() << '\n'
      << "rng: " << kSimRngName << '\n'
      << "seed: " << std::to_string(sc.seed) << '\n'
      << "seeds: " << std::to_string(cfg.sim.seeds) << '\n'
      << "rounds: " << std::to_string(sc.duration_rounds) << " (warmup "
      << std::to_string(sc.warmup_rounds) << ")\n"
      << "L: " << format_sig(rep.load) << '\n'
      << "analytic: dq_ms=" << format_sig(rep.analytic_dq * kMs)
      << " p=" << format_sig(rep.analytic_p)
      << " rate_mbps=" << format_sig(rep.analytic_rate / kMbps) << '\n'
      << "simulated: dq_ms=" << format_sig(rep.sim.mean_dq * kMs)
      << " p=" << format_sig(rep.sim.mean_p)
      << " rate_mbps=" << format_sig(rep.sim.mean_rate_per_flow / kMbps)
      << " utilization=" << format_sig(rep.sim.utilization) << '\n'
      << "relative_error: dq=" << format_sig(rep.dq_rel_error, 4)
      << " p=" << format_sig(rep.p_rel_error, 4)
      << " rate=" << format_sig(rep.rate_rel_error, 4) << '\n';
  return kExitOk;
}

}  // namespace

int cmd_curve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return curve_impl(cfg, out, err); });
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return solve_impl(cfg, out, err); });
}

int cmd_provision(const RunConfig& cfg, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] { return provision_impl(cfg, out, err); });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return simulate_impl(cfg, out, err); });
}

}  // namespace curvyaqm::cli

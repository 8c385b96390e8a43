#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curvyaqm/cli.hpp"

namespace curvyaqm::cli {

namespace {

// Flags given on the command line; each set one overrides the config file.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<double> tcp_constant;
  std::optional<double> mss_bytes;
  std::optional<double> base_rtt_ms;
  std::optional<std::vector<double>> curviness;
  std::optional<double> design_delay_ms;
  std::optional<double> design_drop_percent;
  std::optional<double> scale_delay_ms;
  bool clamp = false;
  std::optional<double> clamp_target_ms;
  std::optional<double> capacity_mbps;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<int> grid_points;
  std::optional<std::string> grid_scale;
  std::optional<std::vector<double>> grid_extra;
  std::optional<double> load;
  bool csv = false;
  std::optional<double> flows;
  std::optional<std::vector<double>> agg_factors;
  std::optional<int> n_flows;
  std::optional<long> duration_rounds;
  std::optional<long> warmup_rounds;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::string> out_dir;
  std::optional<std::string> prefix;
};

template <typename T>
void flag(CLI::App* app, const std::string& name, std::optional<T>& dst,
          const std::string& help) {
  app->add_option_function<T>(
      name, [&dst](const T& v) { dst = v; }, help);
}

template <typename T>
void list_flag(CLI::App* app, const std::string& name,
               std::optional<std::vector<T>>& dst, const std::string& help) {
  app->add_option_function<std::vector<T>>(
         name, [&dst](const std::vector<T>& v) { dst = v; }, help)
      ->delimiter(',');
}

void common_flags(CLI::App* app, Flags& f) {
  flag(app, "--config", f.config, "JSON config file");
  flag(app, "--preset", f.preset, "TCP preset: reno or cubic-reno");
  flag(app, "--K", f.tcp_constant, "TCP constant K (overrides preset)");
  flag(app, "--mss-bytes", f.mss_bytes, "maximum segment size [bytes]");
  flag(app, "--base-rtt-ms", f.base_rtt_ms, "base RTT D_R [ms]");
  list_flag(app, "--u", f.curviness, "curviness values, comma separated");
  flag(app, "--dq-ms", f.design_delay_ms, "design-point queuing delay [ms]");
  flag(app, "--p-percent", f.design_drop_percent, "design-point drop [%]");
  flag(app, "--scale-delay-ms", f.scale_delay_ms,
       "explicit scale delay D_q [ms] instead of anchoring");
  app->add_flag("--clamp", f.clamp, "add a delay clamp (u = infinity)");
  flag(app, "--clamp-target-ms", f.clamp_target_ms,
       "clamp target delay [ms] (default: design delay)");
  flag(app, "--capacity-mbps", f.capacity_mbps, "link capacity [Mb/s]");
  flag(app, "--out-dir", f.out_dir, "output directory");
  flag(app, "--prefix", f.prefix, "output file prefix");
}

RunConfig merge(const Flags& f) {
  RunConfig cfg = f.config ? load_config(*f.config) : RunConfig{};
  apply_env(cfg);

  if (f.preset) cfg.traffic.preset = *f.preset;
  if (f.tcp_constant) cfg.traffic.tcp_constant = f.tcp_constant;
  if (f.mss_bytes) cfg.traffic.mss_bytes = *f.mss_bytes;
  if (f.base_rtt_ms) cfg.traffic.base_rtt_ms = *f.base_rtt_ms;
  if (f.curviness) cfg.aqm.curviness = *f.curviness;
  if (f.design_delay_ms) cfg.aqm.design_delay_ms = *f.design_delay_ms;
  if (f.design_drop_percent) {
    cfg.aqm.design_drop_percent = *f.design_drop_percent;
  }
  if (f.scale_delay_ms) cfg.aqm.scale_delay_ms = f.scale_delay_ms;
  if (f.clamp) cfg.aqm.clamp = true;
  if (f.clamp_target_ms) cfg.aqm.clamp_target_ms = f.clamp_target_ms;
  if (f.capacity_mbps) cfg.capacity_mbps = f.capacity_mbps;
  if (f.grid_min) cfg.grid.min = *f.grid_min;
  if (f.grid_max) cfg.grid.max = *f.grid_max;
  if (f.grid_points) cfg.grid.points = *f.grid_points;
  if (f.grid_scale) cfg.grid.scale = *f.grid_scale;
  if (f.grid_extra) cfg.grid.extra = *f.grid_extra;
  if (f.load) cfg.load = f.load;
  if (f.csv) cfg.csv = true;
  if (f.flows) cfg.flows = f.flows;
  if (f.agg_factors) cfg.agg_factors = *f.agg_factors;
  if (f.n_flows) cfg.sim.n_flows = f.n_flows;
  if (f.duration_rounds) cfg.sim.duration_rounds = *f.duration_rounds;
  if (f.warmup_rounds) cfg.sim.warmup_rounds = f.warmup_rounds;
  if (f.seed) cfg.sim.seed = *f.seed;
  if (f.seeds) cfg.sim.seeds = *f.seeds;
  if (f.out_dir) cfg.output.dir = *f.out_dir;
  if (f.prefix) cfg.output.prefix = *f.prefix;
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "Steady-state delay and loss of Curvy RED and delay-clamping AQMs "
      "under TCP load",
      "curvyaqm"};
  app.require_subcommand(1);
  Flags f;

  auto* curve = app.add_subcommand(
      "curve", "delay/loss-vs-load curve family as CSV plus a gnuplot script");
  common_flags(curve, f);
  flag(curve, "--grid-min", f.grid_min, "smallest normalized load");
  flag(curve, "--grid-max", f.grid_max, "largest normalized load");
  flag(curve, "--grid-points", f.grid_points, "number of grid loads");
  flag(curve, "--grid-scale", f.grid_scale, "log or linear");
  list_flag(curve, "--grid-extra", f.grid_extra,
            "extra loads merged into the grid");

  auto* solve = app.add_subcommand("solve", "one steady-state operating point");
  common_flags(solve, f);
  flag(solve, "--load", f.load, "normalized load L");
  solve->add_flag("--csv", f.csv, "print CSV instead of text");

  auto* provision = app.add_subcommand(
      "provision", "capacity for a flow count, or flows for a capacity");
  common_flags(provision, f);
  flag(provision, "--flows", f.flows, "expected number of flows");
  list_flag(provision, "--agg", f.agg_factors,
            "aggregation factors for the over-provisioning table");

  auto* simulate = app.add_subcommand(
      "simulate", "AIMD simulation checked against the analytic fixed point");
  common_flags(simulate, f);
  flag(simulate, "--n-flows", f.n_flows, "number of flows");
  flag(simulate, "--duration", f.duration_rounds, "rounds to simulate");
  flag(simulate, "--warmup", f.warmup_rounds,
       "rounds excluded from averages (default 30% of duration)");
  flag(simulate, "--seed", f.seed, "RNG seed (overrides CURVYAQM_SEED)");
  flag(simulate, "--seeds", f.seeds, "number of consecutive seeds to average");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = merge(f);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  if (curve->parsed()) return cmd_curve(cfg, out, err);
  if (solve->parsed()) return cmd_solve(cfg, out, err);
  if (provision->parsed()) return cmd_provision(cfg, out, err);
  return cmd_simulate(cfg, out, err);
}

}  // namespace curvyaqm::cli

#include <cmath>
#include <vector>

#include "curvyaqm/errors.hpp"
#include "curvyaqm/provisioning.hpp"
#include "curvyaqm/sim.hpp"
#include "curvyaqm/steady_state.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvyaqm;
namespace orc = curvyaqm::oracle;

namespace {

const TrafficModel kTm = TrafficModel::reno(12000.0, 0.020);
const DesignPoint kDp = DesignPoint::create(0.020, 0.02);

SimConfig design_scenario(int n_flows, std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.traffic = kTm;
  cfg.n_flows = n_flows;
  cfg.capacity = required_capacity({kTm, kDp, static_cast<double>(n_flows)});
  cfg.aqm = anchored_curve(kDp, 2.0);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("uncongested single flow grows one segment per round") {
  SimConfig cfg;
  cfg.traffic = kTm;
  cfg.n_flows = 1;
  cfg.capacity = 1e12;
  cfg.aqm = anchored_curve(kDp, 2.0);
  cfg.duration_rounds = 200;
  cfg.warmup_rounds = 0;
  std::vector<RoundSample> trace;
  const auto r = run(cfg, [&](const RoundSample& s) { trace.push_back(s); });
  CHECK(r.mean_p == 0.0);
  CHECK(r.mean_dq == 0.0);
  REQUIRE(trace.size() == 200);
  for (const auto& s : trace) {
    CHECK(s.rate_total ==
          doctest::Approx((s.round + 1) * 12000.0 / 0.020).epsilon(1e-12));
  }
  CHECK(r.utilization < 1e-3);
}

TEST_CASE("per-flow rate tracks the Reno prediction") {
  const auto cfg = design_scenario(16);
  const auto r = run(cfg);
  const double predicted = reno_rate(kTm, rtt(kTm, 0.020), 0.02);
  CHECK(std::abs(r.mean_rate_per_flow - predicted) / predicted < 0.20);
}

TEST_CASE("identical seeds give identical results") {
  const auto cfg = design_scenario(8, 42);
  std::vector<RoundSample> a, b;
  const auto ra = run(cfg, [&](const RoundSample& s) { a.push_back(s); });
  const auto rb = run(cfg, [&](const RoundSample& s) { b.push_back(s); });
  CHECK(ra == rb);
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].queue_delay == b[i].queue_delay &&
           a[i].drop == b[i].drop && a[i].rate_total == b[i].rate_total;
  }
  CHECK(same);
  CHECK_FALSE(run(design_scenario(8, 43)) == ra);
}

TEST_CASE("fixed_point_check at the design point") {
  const auto rep = fixed_point_check(design_scenario(32), 5);
  CHECK(rep.load == doctest::Approx(orc::kCrossing20ms).epsilon(1e-12));
  CHECK(rep.analytic_dq == doctest::Approx(0.020).epsilon(1e-9));
  CHECK(rep.analytic_p == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(rep.dq_rel_error <= 0.25);
  CHECK(rep.p_rel_error <= 0.25);
  const auto again = fixed_point_check(design_scenario(32), 5);
  CHECK(again.sim == rep.sim);
  CHECK(again.dq_rel_error == rep.dq_rel_error);
}

TEST_CASE("light load stays well below the design point") {
  SimConfig cfg = design_scenario(4);
  // L = 0.04 with four flows.
  cfg.capacity = kTm.tcp_constant * kTm.mss_bits * 4 / (kTm.base_rtt * 0.04);
  const auto rep = fixed_point_check(cfg, 3);
  CHECK(rep.load == doctest::Approx(0.04));
  CHECK(rep.sim.mean_p < 0.1 * 0.02);
  CHECK(rep.sim.mean_dq < 0.25 * 0.020);
}

TEST_CASE("conservation and window floor") {
  for (int n : {1, 8, 64}) {
    SimConfig cfg = design_scenario(n);
    // Heavy overload for a steep curve pushes windows to the floor.
    cfg.capacity /= 20;
    const auto r = run(cfg);
    CHECK(r.utilization <= 1 + 1e-6);
    CHECK(r.mean_rate_per_flow * n <= cfg.capacity * (1 + 1e-6));
    CHECK(r.min_window >= 1.0);
    CHECK(r.mean_p >= 0.0);
    CHECK(r.mean_p <= 1.0);
  }
}

TEST_CASE("more flows on the same link never lowers mean drop") {
  SimConfig base = design_scenario(16);
  double prev = -1.0;
  for (int n : {4, 8, 16, 32, 64, 128}) {
    SimConfig cfg = base;
    cfg.n_flows = n;
    const double p = seed_average(cfg, 5).mean_p;
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("clamp controller holds the delay at its target") {
  SimConfig cfg = design_scenario(32);
  cfg.aqm = AqmCurve::clamp(0.020);
  const auto rep = fixed_point_check(cfg, 3);
  CHECK(rep.analytic_dq == 0.020);
  CHECK(rep.dq_rel_error < 0.10);
  CHECK(rep.p_rel_error <= 0.25);
}

TEST_CASE("runaway queue aborts with an instability error") {
  SimConfig cfg;
  cfg.traffic = TrafficModel::reno(12000.0, 0.010);
  cfg.n_flows = 10000;
  cfg.capacity = 1e6;
  cfg.aqm = AqmCurve::curvy(1.0, 10.0);
  CHECK_THROWS_AS(run(cfg), InstabilityError);
}

TEST_CASE("config validation") {
  SimConfig cfg = design_scenario(4);
  cfg.warmup_rounds = cfg.duration_rounds;
  CHECK_THROWS_AS(run(cfg), DomainError);
  cfg = design_scenario(4);
  cfg.n_flows = 0;
  CHECK_THROWS_AS(run(cfg), DomainError);
  cfg = design_scenario(4);
  cfg.capacity = 0;
  CHECK_THROWS_AS(run(cfg), DomainError);
  CHECK_THROWS_AS(seed_average(design_scenario(4), 0), DomainError);
}

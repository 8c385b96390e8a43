#include <cmath>
#include <random>
#include <vector>

#include "curvyaqm/errors.hpp"
#include "curvyaqm/provisioning.hpp"
#include "curvyaqm/steady_state.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvyaqm;
namespace orc = curvyaqm::oracle;

namespace {

const TrafficModel kTm = TrafficModel::reno(12000.0, 0.020);
const DesignPoint kDp = DesignPoint::create(0.020, 0.02);

}  // namespace

TEST_CASE("required_capacity") {
  const double x = required_capacity({kTm, kDp, 100});
  CHECK(orc::relative_error(x, orc::kRequiredCapacity100) < 1e-12);
  CHECK(required_capacity({kTm, kDp, 200}) == doctest::Approx(2 * x));
  CHECK(supportable_flows(kTm, x, kDp) == doctest::Approx(100).epsilon(1e-12));
  CHECK_THROWS_AS(required_capacity({kTm, kDp, 0}), DomainError);
}

TEST_CASE("supportable_flows") {
  CHECK(supportable_flows(kTm, 2.598e8, kDp) ==
        doctest::Approx(100).epsilon(1e-3));
  const double small = supportable_flows(kTm, 4e6, kDp);
  CHECK(orc::relative_error(small, orc::kFlows4MbpsQ20) < 1e-12);
  CHECK(small == doctest::Approx(flows_from_point(kTm, 4e6, 0.020, 0.02)));
  CHECK(supportable_flows(kTm, 12e6, kDp) == doctest::Approx(3 * small));
  CHECK_THROWS_AS(supportable_flows(kTm, 0.0, kDp), DomainError);
}

TEST_CASE("overprovision_factor") {
  const double f = overprovision_factor(0.020, 0.020, 100);
  CHECK(orc::relative_error(f, orc::kOverprovision100) < 1e-14);
  CHECK(std::abs(f - 1.8) < 0.02);
  CHECK(overprovision_factor(0.020, 0.020, 1.0) == 1.0);
  CHECK(overprovision_factor(0.020, 0.020, 1.0 + 1e-9) ==
        doctest::Approx(1.0));
  CHECK(overprovision_factor(0.020, 0.0, 100) == 1.0);
  CHECK(overprovision_factor(0.020, 1e-12, 100) == doctest::Approx(1.0));
  CHECK_THROWS_AS(overprovision_factor(0.020, 0.020, 0.5), DomainError);
}

TEST_CASE("aggregated_delay_target") {
  CHECK(aggregated_delay_target(0.020, 100) ==
        doctest::Approx(0.002).epsilon(1e-15));
  CHECK(aggregated_delay_target(0.017, 1) == 0.017);
  CHECK(aggregated_delay_target(0.020, 4) ==
        doctest::Approx(0.010).epsilon(1e-15));
}

TEST_CASE("effective_flow_count") {
  CHECK(effective_flow_count(100, 10) == 100);
  CHECK(effective_flow_count(37.5, 37.5) == 1);
  CHECK(effective_flow_count(100, 50) == 4);
  CHECK_THROWS_AS(effective_flow_count(100, 0), DomainError);
}

TEST_CASE("plan_aggregation") {
  const std::vector<double> ms = {1, 4, 25, 100};
  const auto rows = plan_aggregation({kTm, kDp, 100}, ms);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].factor == 1.0);
  CHECK(rows[0].capacity == doctest::Approx(orc::kRequiredCapacity100));
  CHECK(rows[3].delay_target == doctest::Approx(0.002));
  CHECK(rows[3].factor == doctest::Approx(orc::kOverprovision100));
  CHECK(rows[3].flows == 10000);
  CHECK(rows[3].capacity ==
        doctest::Approx(orc::kRequiredCapacity100 * 100 * 1.8181818181818));
  for (const auto& r : rows) CHECK_FALSE(r.below_queue_floor);

  // One flow at 2.6 Mb/s: six packets take 27.7 ms, more than the 20 ms
  // design delay.
  const auto tiny = plan_aggregation({kTm, kDp, 1}, ms);
  CHECK(tiny[0].below_queue_floor);
}

TEST_CASE("property: capacity and flows are exact inverses") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> log_n(0.0, std::log(1e6));
  std::uniform_real_distribution<double> base(1e-3, 0.3);
  std::uniform_real_distribution<double> dq(1e-4, 0.1);
  std::uniform_real_distribution<double> p(1e-4, 1.0);
  std::uniform_real_distribution<double> k(1.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tm = TrafficModel::create(k(rng), 12000.0, base(rng));
    const auto dp = DesignPoint::create(dq(rng), p(rng));
    const double n = std::exp(log_n(rng));
    const double x = required_capacity({tm, dp, n});
    CHECK(orc::relative_error(supportable_flows(tm, x, dp), n) < 1e-12);
  }
}

TEST_CASE("property: provisioned capacity sits on the design point") {
  const auto curve = anchored_curve(kDp, 2.0);
  for (double n : {1.0, 10.0, 100.0, 5000.0}) {
    const double x = required_capacity({kTm, kDp, n});
    const double load = normalized_load(kTm, n, x);
    CHECK(orc::relative_error(solve_delay(kTm, curve, load), 0.020) < 1e-6);
    CHECK(orc::relative_error(solve_loss(kTm, curve, load), 0.02) < 1e-6);
  }
}

TEST_CASE("property: aggregation with over-provisioning holds p*") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> log_m(0.0, std::log(1e4));
  for (int trial = 0; trial < 200; ++trial) {
    const double m = std::exp(log_m(rng));
    const double n = 50;
    const double x = required_capacity({kTm, kDp, n});
    const double x_agg = x * m * overprovision_factor(0.020, 0.020, m);
    const double target = aggregated_delay_target(0.020, m);
    const double load = normalized_load(kTm, m * n, x_agg);
    CHECK(orc::relative_error(clamp_point(kTm, target, load).probability,
                              0.02) < 1e-6);
  }
}

TEST_CASE("property: factor rises with m toward its bound") {
  const double bound = (0.020 + 0.020) / 0.020;
  double prev = 1.0;
  for (double m = 1.5; m < 1e8; m *= 1.7) {
    const double f = overprovision_factor(0.020, 0.020, m);
    CHECK(f > prev);
    CHECK(f < bound);
    prev = f;
  }
}

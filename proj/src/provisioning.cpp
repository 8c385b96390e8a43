#include "curvyaqm/provisioning.hpp"

#include <cmath>
#include <string>

#include "curvyaqm/errors.hpp"

namespace curvyaqm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and > 0");
  }
}

void require_agg_factor(double m) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    throw DomainError("aggregation factor must be >= 1, got " +
                      std::to_string(m));
  }
}

}  // namespace

double required_capacity(const ProvisioningInput& in) {
  in.traffic.validate();
  in.design.validate();
  require_positive(in.flows, "flow count");
  const auto& tm = in.traffic;
  return tm.tcp_constant * in.flows * tm.mss_bits /
         ((tm.base_rtt + in.design.dq_star) * std::sqrt(in.design.p_star));
}

double supportable_flows(const TrafficModel& tm, double capacity,
                         const DesignPoint& dp) {
  tm.validate();
  dp.validate();
  require_positive(capacity, "link capacity");
  return capacity * (tm.base_rtt + dp.dq_star) * std::sqrt(dp.p_star) /
         (tm.tcp_constant * tm.mss_bits);
}

double overprovision_factor(double base_rtt, double dq_star,
                            double agg_factor) {
  require_positive(base_rtt, "base RTT");
  if (!(dq_star >= 0.0)) throw DomainError("design delay must be >= 0");
  require_agg_factor(agg_factor);
  return (base_rtt + dq_star) /
         (base_rtt + aggregated_delay_target(dq_star, agg_factor));
}

double aggregated_delay_target(double dq_star, double agg_factor) {
  if (!(dq_star >= 0.0)) throw DomainError("design delay must be >= 0");
  require_agg_factor(agg_factor);
  return dq_star / std::sqrt(agg_factor);
}

double effective_flow_count(double bdp, double queue_variation) {
  require_positive(bdp, "BDP");
  require_positive(queue_variation, "queue variation");
  const double ratio = bdp / queue_variation;
  return ratio * ratio;
}

std::vector<AggregationRow> plan_aggregation(
    const ProvisioningInput& in, std::span<const double> agg_factors) {
  const double base_capacity = required_capacity(in);
  const auto& tm = in.traffic;
  std::vector<AggregationRow> rows;
  rows.reserve(agg_factors.size());
  for (double m : agg_factors) {
    AggregationRow row;
    row.agg_factor = m;
    row.delay_target = aggregated_delay_target(in.design.dq_star, m);
    row.factor = overprovision_factor(tm.base_rtt, in.design.dq_star, m);
    row.capacity = base_capacity * m * row.factor;
    row.flows = in.flows * m;
    row.below_queue_floor =
        row.delay_target <
        kMinQueuePackets * serialization_delay(tm.mss_bits, row.capacity);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace curvyaqm

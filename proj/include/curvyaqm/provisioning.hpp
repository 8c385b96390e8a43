#pragma once

// Capacity planning against a design point.

#include <span>
#include <vector>

#include "curvyaqm/model.hpp"

namespace curvyaqm {

/// A queue does not shrink below about half a dozen packets however much
/// traffic is aggregated.
inline constexpr double kMinQueuePackets = 6.0;

struct ProvisioningInput {
  TrafficModel traffic;
  DesignPoint design;
  double flows;  // expected flow count n, > 0
};

/// One row of an over-provisioning plan: the baseline link and flow count
/// are both scaled by `agg_factor`, the delay target drops by its square
/// root, and capacity grows by an extra `factor` to hold p* unchanged.
struct AggregationRow {
  double agg_factor = 1.0;    // m
  double delay_target = 0.0;  // dq* / sqrt(m), seconds
  double factor = 1.0;        // X' / (m X)
  double capacity = 0.0;      // X' = m X factor, bits/second
  double flows = 0.0;         // m n
  /// Delay target shorter than kMinQueuePackets serialization times at X'.
  bool below_queue_floor = false;
};

/// X = K n s / ((D_R + dq*) sqrt(p*)).
double required_capacity(const ProvisioningInput& in);

/// Flows a capacity supports at the design point; inverse of
/// required_capacity.
double supportable_flows(const TrafficModel& tm, double capacity,
                         const DesignPoint& dp);

/// X'/X = (D_R + dq*) / (D_R + dq* / sqrt(m)). Accepts m >= 1.
double overprovision_factor(double base_rtt, double dq_star, double agg_factor);

/// dq* / sqrt(m).
double aggregated_delay_target(double dq_star, double agg_factor);

/// Reno flows equivalent to an observed queue variation: (BDP / nu)^2.
/// Both arguments in the same unit.
double effective_flow_count(double bdp, double queue_variation);

/// Over-provisioning rows for each aggregation factor, relative to a
/// baseline of `in.flows` flows on required_capacity(in).
std::vector<AggregationRow> plan_aggregation(
    const ProvisioningInput& in, std::span<const double> agg_factors);

}  // namespace curvyaqm

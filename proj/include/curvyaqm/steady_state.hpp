#pragma once

// Steady-state solutions of the coupled TCP/AQM system: queuing delay and
// drop as functions of normalized load, for curvy and clamp AQMs.

#include <cstddef>
#include <span>
#include <vector>

#include "curvyaqm/model.hpp"

namespace curvyaqm {

/// Bisection parameters for solve_delay.
inline constexpr double kBracketFloor = 1e-12;  // seconds
inline constexpr int kMaxBisections = 200;

/// Default ECN coupling factor between marking and drop.
inline constexpr double kDefaultCoupling = 2.0;

/// One point of a delay/loss-vs-load curve.
struct CurvePoint {
  double load = 0.0;
  double queue_delay = 0.0;  // seconds
  double drop = 0.0;
  double rate = 0.0;  // per-flow bits/second, K s / (D_R L)
  bool saturated = false;
  bool operator==(const CurvePoint&) const = default;
};

/// Delay/loss curves for several AQMs over a shared load grid. A clamp
/// member is recorded with curviness = +infinity.
struct CurveFamily {
  std::vector<double> curviness;
  std::vector<double> grid;
  std::vector<std::vector<CurvePoint>> points;  // [member][grid index]
};

enum class Signal { drop, mark };

/// Steady state of a delay clamp. The probability is a drop probability or
/// an ECN mark probability depending on `signal`.
struct ClampPoint {
  double queue_delay = 0.0;
  double probability = 0.0;
  bool saturated = false;
  Signal signal = Signal::drop;

  double delay_impairment() const noexcept { return queue_delay; }
  /// Marks carry congestion information without losing packets.
  double loss_impairment() const noexcept {
    return signal == Signal::drop ? probability : 0.0;
  }
};

/// L reached when the curvy AQM holds queuing delay at `queue_delay`.
/// Requires 0 < queue_delay <= D_q.
double load_from_delay(const TrafficModel& tm, const AqmCurve& curve,
                       double queue_delay);

/// Largest load a curvy curve supports with p <= 1, (D_R + D_q) / D_R.
double saturation_load(const TrafficModel& tm, const AqmCurve& curve);

/// Inverts load_from_delay by bisection. Throws SaturationError past the
/// saturation load.
double solve_delay(const TrafficModel& tm, const AqmCurve& curve, double load);

/// Drop probability at the solved delay.
double solve_loss(const TrafficModel& tm, const AqmCurve& curve, double load);

/// Clamp steady state: d_q = T at every load, p = (L D_R / (D_R + T))^2
/// capped at 1.
ClampPoint clamp_point(const TrafficModel& tm, double target, double load);

/// Same math as clamp_point, but the probability is an ECN mark rate and
/// causes no loss.
ClampPoint ecn_clamp_point(const TrafficModel& tm, double target, double load);

/// Steady state of any AQM at `load`. Never throws on overload: a curvy
/// curve past saturation reports p = 1 with d_q = L D_R - D_R (the fixed
/// point of the saturated map), a clamp reports p = 1; both set `saturated`.
CurvePoint solve_point(const TrafficModel& tm, const AqmCurve& curve,
                       double load);

/// As solve_point, with the absolute scale of a link filled in.
OperatingPoint operating_point(const TrafficModel& tm, const AqmCurve& curve,
                               const Link& link, double load);

/// Load at which every curve anchored at `dp` crosses the design point.
double design_crossing_load(const TrafficModel& tm, const DesignPoint& dp);

/// Drop probability equivalent to ECN marking: (p_mark / k)^2, capped at 1.
double mark_to_drop_equiv(double p_mark, double coupling = kDefaultCoupling);
/// Inverse coupling: k sqrt(p_drop), capped at 1.
double drop_to_mark(double p_drop, double coupling = kDefaultCoupling);

std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);
/// 200 log-spaced loads over [0.02, 2.0].
std::vector<double> default_grid();

/// Solves every curve at every grid load in parallel (OpenMP). Clamps are
/// recorded with curviness +infinity.
CurveFamily solve_family(const TrafficModel& tm,
                         std::span<const AqmCurve> curves,
                         std::span<const double> grid);

/// Single-threaded reference for solve_family. Results are identical.
CurveFamily solve_family_serial(const TrafficModel& tm,
                                std::span<const AqmCurve> curves,
                                std::span<const double> grid);

/// Anchors each curviness at `dp`, adds a clamp at T = dq_star when
/// requested, and solves every member at every grid load with solve_family.
/// Members follow the order of `curviness`, clamp last.
CurveFamily generate_family(const TrafficModel& tm, const DesignPoint& dp,
                            std::span<const double> curviness,
                            bool include_clamp, std::span<const double> grid);

/// Single-threaded reference for generate_family. Results are identical.
CurveFamily generate_family_serial(const TrafficModel& tm,
                                   const DesignPoint& dp,
                                   std::span<const double> curviness,
                                   bool include_clamp,
                                   std::span<const double> grid);

}  // namespace curvyaqm

#include "curvyaqm/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvyaqm/errors.hpp"

namespace curvyaqm {

namespace {

void require_load(double load) {
  if (!(load > 0.0) || !std::isfinite(load)) {
    throw DomainError("normalized load must be finite and > 0, got " +
                      std::to_string(load));
  }
}

// L as a function of d_q, without precondition checks; the bisection calls
// this on its own bracket.
double load_at(double base_rtt, const CurvyCurve& c, double queue_delay) {
  return (base_rtt + queue_delay) *
         std::pow(queue_delay / c.scale_delay, c.curviness / 2.0) / base_rtt;
}

std::vector<AqmCurve> family_members(const DesignPoint& dp,
                                     std::span<const double> curviness,
                                     bool include_clamp) {
  std::vector<AqmCurve> members;
  members.reserve(curviness.size() + 1);
  for (double u : curviness) members.push_back(anchored_curve(dp, u));
  if (include_clamp) members.push_back(AqmCurve::clamp(dp.dq_star));
  return members;
}

void check_family_inputs(const TrafficModel& tm,
                         std::span<const AqmCurve> curves,
                         std::span<const double> grid) {
  tm.validate();
  if (grid.empty()) throw DomainError("load grid is empty");
  if (curves.empty()) throw DomainError("family has no members");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_load(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError("load grid must be strictly increasing");
    }
  }
}

CurveFamily empty_family(std::span<const AqmCurve> curves,
                         std::span<const double> grid) {
  CurveFamily family;
  family.grid.assign(grid.begin(), grid.end());
  for (const auto& c : curves) {
    family.curviness.push_back(c.is_clamp()
                                   ? std::numeric_limits<double>::infinity()
                                   : c.as_curvy().curviness);
  }
  family.points.assign(curves.size(), std::vector<CurvePoint>(grid.size()));
  return family;
}

}  // namespace

double load_from_delay(const TrafficModel& tm, const AqmCurve& curve,
                       double queue_delay) {
  const auto& c = curve.as_curvy();
  if (!(queue_delay > 0.0) || queue_delay > c.scale_delay) {
    throw DomainError("queuing delay must lie in (0, D_q], got " +
                      std::to_string(queue_delay));
  }
  return load_at(tm.base_rtt, c, queue_delay);
}

double saturation_load(const TrafficModel& tm, const AqmCurve& curve) {
  const auto& c = curve.as_curvy();
  return (tm.base_rtt + c.scale_delay) / tm.base_rtt;
}

double solve_delay(const TrafficModel& tm, const AqmCurve& curve,
                   double load) {
  const auto& c = curve.as_curvy();
  require_load(load);
  const double max_load = saturation_load(tm, curve);
  if (load > max_load) {
    throw SaturationError("load " + std::to_string(load) +
                              " exceeds the saturation load " +
                              std::to_string(max_load),
                          max_load);
  }
  if (load == max_load) return c.scale_delay;

  double lo = kBracketFloor;
  double hi = c.scale_delay;
  // Below the bracket floor the map is still monotone down to 0.
  if (load_at(tm.base_rtt, c, lo) > load) lo = 0.0;

  // Run to the resolution of a double; the round-trip error in L is then
  // far below 1e-9 even for steep curves.
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = load_at(tm.base_rtt, c, mid);
    if (f == load) return mid;
    if (f < load) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double f_lo = load_at(tm.base_rtt, c, lo);
  const double f_hi = load_at(tm.base_rtt, c, hi);
  return (load - f_lo) <= (f_hi - load) ? lo : hi;
}

double solve_loss(const TrafficModel& tm, const AqmCurve& curve, double load) {
  return drop_prob(curve, solve_delay(tm, curve, load));
}

ClampPoint clamp_point(const TrafficModel& tm, double target, double load) {
  tm.validate();
  require_load(load);
  if (!(target > 0.0)) throw DomainError("clamp target must be > 0");
  const double root = load * tm.base_rtt / (tm.base_rtt + target);
  ClampPoint pt;
  pt.queue_delay = target;
  pt.probability = root * root;
  if (pt.probability > 1.0) {
    pt.probability = 1.0;
    pt.saturated = true;
  }
  return pt;
}

ClampPoint ecn_clamp_point(const TrafficModel& tm, double target,
                           double load) {
  ClampPoint pt = clamp_point(tm, target, load);
  pt.signal = Signal::mark;
  return pt;
}

CurvePoint solve_point(const TrafficModel& tm, const AqmCurve& curve,
                       double load) {
  CurvePoint pt;
  pt.load = load;
  if (curve.is_clamp()) {
    const ClampPoint cp = clamp_point(tm, curve.as_clamp().target, load);
    pt.queue_delay = cp.queue_delay;
    pt.drop = cp.probability;
    pt.saturated = cp.saturated;
  } else if (load > saturation_load(tm, curve)) {
    pt.queue_delay = load * tm.base_rtt - tm.base_rtt;
    pt.drop = 1.0;
    pt.saturated = true;
  } else {
    pt.queue_delay = solve_delay(tm, curve, load);
    pt.drop = drop_prob(curve, pt.queue_delay);
  }
  // Off saturation the Reno rate at (d_q, p) reduces to K s / (D_R L).
  pt.rate = pt.saturated ? reno_rate(tm, rtt(tm, pt.queue_delay), pt.drop)
                         : tm.tcp_constant * tm.mss_bits / (tm.base_rtt * load);
  return pt;
}

OperatingPoint operating_point(const TrafficModel& tm, const AqmCurve& curve,
                               const Link& link, double load) {
  const CurvePoint pt = solve_point(tm, curve, load);
  return OperatingPoint{
      .load = load,
      .flows = load * tm.base_rtt * link.capacity /
               (tm.tcp_constant * tm.mss_bits),
      .queue_delay = pt.queue_delay,
      .drop = pt.drop,
      .rate = pt.rate,
      .rtt = rtt(tm, pt.queue_delay),
  };
}

double design_crossing_load(const TrafficModel& tm, const DesignPoint& dp) {
  tm.validate();
  dp.validate();
  return std::sqrt(dp.p_star) * (tm.base_rtt + dp.dq_star) / tm.base_rtt;
}

double mark_to_drop_equiv(double p_mark, double coupling) {
  if (!(p_mark >= 0.0) || p_mark > 1.0) {
    throw DomainError("mark probability must lie in [0, 1]");
  }
  if (!(coupling > 0.0)) throw DomainError("coupling factor must be > 0");
  const double ratio = p_mark / coupling;
  return std::min(1.0, ratio * ratio);
}

double drop_to_mark(double p_drop, double coupling) {
  if (!(p_drop >= 0.0) || p_drop > 1.0) {
    throw DomainError("drop probability must lie in [0, 1]");
  }
  if (!(coupling > 0.0)) throw DomainError("coupling factor must be > 0");
  return std::min(1.0, coupling * std::sqrt(p_drop));
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw DomainError("log grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> grid(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo * std::exp(step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (!(hi > lo) || count < 2) {
    throw DomainError("linear grid needs lo < hi and at least 2 points");
  }
  std::vector<double> grid(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + step * static_cast<double>(i);
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> default_grid() { return log_grid(0.02, 2.0, 200); }

CurveFamily solve_family(const TrafficModel& tm,
                         std::span<const AqmCurve> curves,
                         std::span<const double> grid) {
  check_family_inputs(tm, curves, grid);
  CurveFamily family = empty_family(curves, grid);

  const auto n_curves = static_cast<std::ptrdiff_t>(curves.size());
  const auto n_grid = static_cast<std::ptrdiff_t>(grid.size());
  // Inputs are validated above, so solve_point cannot throw in here.
#pragma omp parallel for collapse(2) schedule(static)
  for (std::ptrdiff_t m = 0; m < n_curves; ++m) {
    for (std::ptrdiff_t i = 0; i < n_grid; ++i) {
      family.points[m][i] = solve_point(tm, curves[m], grid[i]);
    }
  }
  return family;
}

CurveFamily solve_family_serial(const TrafficModel& tm,
                                std::span<const AqmCurve> curves,
                                std::span<const double> grid) {
  check_family_inputs(tm, curves, grid);
  CurveFamily family = empty_family(curves, grid);
  for (std::size_t m = 0; m < curves.size(); ++m) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      family.points[m][i] = solve_point(tm, curves[m], grid[i]);
    }
  }
  return family;
}

CurveFamily generate_family(const TrafficModel& tm, const DesignPoint& dp,
                            std::span<const double> curviness,
                            bool include_clamp, std::span<const double> grid) {
  const auto members = family_members(dp, curviness, include_clamp);
  return solve_family(tm, members, grid);
}

CurveFamily generate_family_serial(const TrafficModel& tm,
                                   const DesignPoint& dp,
                                   std::span<const double> curviness,
                                   bool include_clamp,
                                   std::span<const double> grid) {
  const auto members = family_members(dp, curviness, include_clamp);
  return solve_family_serial(tm, members, grid);
}

}  // namespace curvyaqm

#include "curvyaqm/model.hpp"

#include <cmath>
#include <string>

#include "curvyaqm/errors.hpp"

namespace curvyaqm {

namespace {

// !(v > 0) also rejects NaN.
void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " +
                      std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and >= 0, got " +
                      std::to_string(v));
  }
}

void require_probability(double p, const char* name) {
  if (!(p > 0.0) || p > 1.0) {
    throw DomainError(std::string(name) + " must lie in (0, 1], got " +
                      std::to_string(p));
  }
}

}  // namespace

TrafficModel TrafficModel::create(double tcp_constant, double mss_bits,
                                  double base_rtt) {
  TrafficModel tm{tcp_constant, mss_bits, base_rtt};
  tm.validate();
  return tm;
}

void TrafficModel::validate() const {
  require_positive(tcp_constant, "TCP constant K");
  require_positive(mss_bits, "MSS");
  require_positive(base_rtt, "base RTT");
}

AqmCurve AqmCurve::curvy(double curviness, double scale_delay) {
  require_positive(curviness, "curviness u");
  require_positive(scale_delay, "scale delay D_q");
  return AqmCurve(CurvyCurve{curviness, scale_delay});
}

AqmCurve AqmCurve::clamp(double target) {
  require_positive(target, "clamp target");
  return AqmCurve(DelayClamp{target});
}

const CurvyCurve& AqmCurve::as_curvy() const {
  if (const auto* c = std::get_if<CurvyCurve>(&kind_)) return *c;
  throw UnsupportedOperation(
      "a delay clamp has no delay-to-probability map");
}

const DelayClamp& AqmCurve::as_clamp() const {
  if (const auto* c = std::get_if<DelayClamp>(&kind_)) return *c;
  throw UnsupportedOperation("curve is not a delay clamp");
}

DesignPoint DesignPoint::create(double dq_star, double p_star) {
  DesignPoint dp{dq_star, p_star};
  dp.validate();
  return dp;
}

void DesignPoint::validate() const {
  require_positive(dq_star, "design delay");
  require_probability(p_star, "design drop probability");
}

Link Link::create(double capacity) {
  require_positive(capacity, "link capacity");
  return Link{capacity};
}

double drop_prob(const CurvyCurve& curve, double queue_delay) {
  require_nonnegative(queue_delay, "queuing delay");
  if (queue_delay == 0.0) return 0.0;
  if (queue_delay >= curve.scale_delay) return 1.0;
  return std::pow(queue_delay / curve.scale_delay, curve.curviness);
}

double drop_prob(const AqmCurve& curve, double queue_delay) {
  return drop_prob(curve.as_curvy(), queue_delay);
}

double scale_from_design(const DesignPoint& dp, double curviness) {
  require_positive(curviness, "curviness u");
  dp.validate();
  return dp.dq_star / std::pow(dp.p_star, 1.0 / curviness);
}

AqmCurve anchored_curve(const DesignPoint& dp, double curviness) {
  return AqmCurve::curvy(curviness, scale_from_design(dp, curviness));
}

double reno_rate(const TrafficModel& tm, double rtt, double drop) {
  require_positive(rtt, "RTT");
  if (drop == 0.0) {
    throw DomainError("zero drop probability gives an unbounded Reno rate");
  }
  require_probability(drop, "drop probability");
  return tm.tcp_constant * tm.mss_bits / (rtt * std::sqrt(drop));
}

double rtt(const TrafficModel& tm, double queue_delay) {
  require_nonnegative(queue_delay, "queuing delay");
  return tm.base_rtt + queue_delay;
}

double flows_from_point(const TrafficModel& tm, double capacity,
                        double queue_delay, double drop) {
  require_positive(capacity, "link capacity");
  require_probability(drop, "drop probability");
  return capacity * rtt(tm, queue_delay) * std::sqrt(drop) /
         (tm.tcp_constant * tm.mss_bits);
}

double normalized_load(const TrafficModel& tm, double flows, double capacity) {
  require_nonnegative(flows, "flow count");
  require_positive(capacity, "link capacity");
  return tm.tcp_constant * tm.mss_bits * flows / (tm.base_rtt * capacity);
}

double serialization_delay(double mss_bits, double capacity) {
  require_positive(mss_bits, "MSS");
  require_positive(capacity, "link capacity");
  return mss_bits / capacity;
}

double harmonic_mean_rtt(std::span<const double> base_rtts) {
  if (base_rtts.empty()) throw DomainError("no base RTTs given");
  double inv_sum = 0.0;
  for (double r : base_rtts) {
    require_positive(r, "base RTT");
    inv_sum += 1.0 / r;
  }
  return static_cast<double>(base_rtts.size()) / inv_sum;
}

}  // namespace curvyaqm

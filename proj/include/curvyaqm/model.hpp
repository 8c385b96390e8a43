#pragma once

// Domain types and closed-form primitives of the steady-state TCP/AQM model.
//
// Units are SI throughout: seconds, bits, bits per second, probabilities as
// fractions. Conversion from the human units (ms, bytes, %, Mb/s) happens in
// the CLI only.

#include <span>
#include <variant>

namespace curvyaqm {

/// sqrt(3/2), the Reno constant of the simple square-root rate law.
inline constexpr double kRenoConstant = 1.2247448713915890491;
/// Constant for Cubic operating in its Reno-emulation mode.
inline constexpr double kCubicRenoConstant = 1.68;

/// Everything characterizing the flows and their paths.
struct TrafficModel {
  double tcp_constant = kRenoConstant;  // K
  double mss_bits = 12000.0;            // s
  double base_rtt = 0.020;              // D_R, seconds

  /// Validating constructor; throws DomainError unless all fields are > 0.
  static TrafficModel create(double tcp_constant, double mss_bits,
                             double base_rtt);
  static TrafficModel reno(double mss_bits, double base_rtt) {
    return create(kRenoConstant, mss_bits, base_rtt);
  }
  static TrafficModel cubic_reno(double mss_bits, double base_rtt) {
    return create(kCubicRenoConstant, mss_bits, base_rtt);
  }

  void validate() const;
};

/// Curvy RED: p = min(1, (d_q / D_q)^u).
struct CurvyCurve {
  double curviness;    // u
  double scale_delay;  // D_q, seconds; the delay at which p reaches 1
};

/// Idealized PIE/CoDel: queuing delay pinned at a target (u = infinity).
struct DelayClamp {
  double target;  // T, seconds
};

/// The AQM policy. Either a curvy power law or a delay clamp.
class AqmCurve {
 public:
  static AqmCurve curvy(double curviness, double scale_delay);
  static AqmCurve clamp(double target);

  bool is_clamp() const noexcept {
    return std::holds_alternative<DelayClamp>(kind_);
  }
  /// Throws UnsupportedOperation for a clamp.
  const CurvyCurve& as_curvy() const;
  /// Throws UnsupportedOperation for a curvy curve.
  const DelayClamp& as_clamp() const;

 private:
  explicit AqmCurve(std::variant<CurvyCurve, DelayClamp> kind)
      : kind_(kind) {}

  std::variant<CurvyCurve, DelayClamp> kind_;
};

/// The (delay, drop) pair every configured curve passes through.
struct DesignPoint {
  double dq_star;  // seconds
  double p_star;   // fraction, 0 < p_star <= 1

  static DesignPoint create(double dq_star, double p_star);
  void validate() const;
};

struct Link {
  double capacity;  // X, bits/second

  static Link create(double capacity);
};

/// One solved steady state.
struct OperatingPoint {
  double load;         // L
  double flows;        // n, fluid count
  double queue_delay;  // d_q, seconds
  double drop;         // p
  double rate;         // x, bits/second per flow
  double rtt;          // d_R = D_R + d_q
};

/// Curvy RED drop probability at queuing delay `queue_delay`. Exactly 0 at
/// zero delay, exactly 1 at or beyond the scale delay.
double drop_prob(const AqmCurve& curve, double queue_delay);
double drop_prob(const CurvyCurve& curve, double queue_delay);

/// D_q that makes a curve of curviness `u` pass through the design point.
double scale_from_design(const DesignPoint& dp, double curviness);

/// Convenience: the curvy curve of curviness `u` anchored at `dp`.
AqmCurve anchored_curve(const DesignPoint& dp, double curviness);

/// Per-flow Reno rate x = K s / (d_R sqrt(p)).
double reno_rate(const TrafficModel& tm, double rtt, double drop);

/// d_R = D_R + d_q.
double rtt(const TrafficModel& tm, double queue_delay);

/// Fluid flow count that fills `capacity` at the given delay and drop.
double flows_from_point(const TrafficModel& tm, double capacity,
                        double queue_delay, double drop);

/// L = K s n / (D_R X).
double normalized_load(const TrafficModel& tm, double flows, double capacity);

/// Serialization delay of one segment, s / X.
double serialization_delay(double mss_bits, double capacity);

/// Harmonic mean of a set of base RTTs; the D_R that represents them all.
double harmonic_mean_rtt(std::span<const double> base_rtts);

}  // namespace curvyaqm

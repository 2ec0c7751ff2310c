#pragma once

#include <stdexcept>
#include <string>

namespace cwing {

/// Downstream state of a planar Chaplygin shock in the polar plane.
/// The shock is characteristic: the downstream sonic circle of radius c1
/// about (u1, v1) is tangent to the shock line at angle gamma.
struct PolarState {
  double u1 = 0.0;
  double v1 = 0.0;
  double c1 = 0.0;
  double gamma = 0.0;  ///< shock angle [rad]
  double theta = 0.0;  ///< deflection angle [rad]

  double speed() const;
};

/// Thrown when the deflection reaches the shock angle and the downstream
/// density blows up. Carries (theta, gamma) so callers can map it to a
/// regime label.
class ConcentrationError : public std::runtime_error {
 public:
  ConcentrationError(double theta, double gamma)
      : std::runtime_error("concentration: deflection theta=" + std::to_string(theta) +
                           " reaches shock angle gamma=" + std::to_string(gamma)),
        theta(theta),
        gamma(gamma) {}
  double theta;
  double gamma;
};

/// Shock angle gamma = arcsin(c0/u0) for supersonic normal-plane flow.
double shock_angle(double u0, double c0);

/// True iff c0 < u0 < c0/sin(theta) with theta in (0, pi/2), i.e. theta < gamma.
bool admissible(double u0, double c0, double theta);

/// Downstream state for deflection theta in [0, gamma). theta = 0 returns
/// the upstream state exactly; theta < 0 is rejected (only compressive
/// deflections are modeled).
PolarState polar_state(double u0, double c0, double theta);

}  // namespace cwing

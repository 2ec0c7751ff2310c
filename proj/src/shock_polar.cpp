#include "cwing/shock_polar.hpp"

#include <cmath>
#include <numbers>

namespace cwing {

double PolarState::speed() const { return std::hypot(u1, v1); }

double shock_angle(double u0, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("shock_angle: c0 must be positive");
  if (!(u0 > c0)) {
    throw std::invalid_argument("shock_angle: u0 must exceed c0 (supersonic normal-plane flow)");
  }
  return std::asin(c0 / u0);
}

bool admissible(double u0, double c0, double theta) {
  if (!(c0 > 0.0)) return false;
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) return false;
  return u0 > c0 && u0 * std::sin(theta) < c0;
}

PolarState polar_state(double u0, double c0, double theta) {
  if (theta < 0.0) {
    throw std::invalid_argument("polar_state: theta must be nonnegative");
  }
  const double gamma = shock_angle(u0, c0);
  if (theta == 0.0) {
    // Zero-deflection limit: the upstream state, exactly.
    return PolarState{u0, 0.0, c0, gamma, 0.0};
  }
  if (!admissible(u0, c0, theta)) {
    throw ConcentrationError(theta, gamma);
  }
  const double s = std::sqrt(u0 * u0 - c0 * c0);
  const double tt = std::tan(theta);
  const double denom = s + c0 * tt;
  PolarState st;
  st.u1 = u0 * s / denom;
  st.v1 = st.u1 * tt;
  st.c1 = (c0 - tt * s) * s / denom;
  st.gamma = gamma;
  st.theta = theta;
  return st;
}

}  // namespace cwing

#pragma once

#include <cmath>
#include <stdexcept>

namespace cwing {

/// Constants of the Chaplygin state equation p = a^2 (1/rho_* - 1/rho).
struct GasConstants {
  double a = 1.0;
  double rho_star = 1.0;
};

/// Incoming uniform flow, normalized so that q^2 - c^2 = 1 (Bernoulli
/// constant 1/2). The constructor path in normalize_freestream() is the
/// only way to obtain one; q and c are never accepted independently.
struct FreeStream {
  GasConstants gas;
  double q_inf = 0.0;    ///< freestream speed
  double c_inf = 0.0;    ///< freestream sound speed, sqrt(q^2 - 1)
  double rho_inf = 0.0;  ///< freestream density, a / c_inf
  double alpha = 0.0;    ///< attack angle [rad]
  double v1_inf = 0.0;   ///< q_inf sin(alpha)
  double v3_inf = 0.0;   ///< q_inf cos(alpha)
};

/// Local sound speed at speed q under the q^2 - c^2 = 1 normalization.
inline double sound_speed_from_speed(double q) {
  if (q <= 1.0) {
    throw std::domain_error("sound_speed_from_speed: q must exceed 1 (sonic normalization)");
  }
  return std::sqrt(q * q - 1.0);
}

/// Density rho = a / sqrt(q^2 - 1).
inline double density_from_speed(double q, const GasConstants& gas = {}) {
  return gas.a / sound_speed_from_speed(q);
}

/// Chaplygin pressure p = a^2 (1/rho_* - 1/rho). May be negative.
inline double pressure(double rho, const GasConstants& gas = {}) {
  if (rho <= 0.0) throw std::domain_error("pressure: rho must be positive");
  return gas.a * gas.a * (1.0 / gas.rho_star - 1.0 / rho);
}

FreeStream normalize_freestream(double q_inf, double alpha, GasConstants gas = {});

}  // namespace cwing

#include "cwing/gas.hpp"

#include <numbers>

namespace cwing {

FreeStream normalize_freestream(double q_inf, double alpha, GasConstants gas) {
  if (gas.a <= 0.0 || gas.rho_star <= 0.0) {
    throw std::invalid_argument("normalize_freestream: gas constants must be positive");
  }
  if (q_inf <= 1.0) {
    throw std::invalid_argument("normalize_freestream: q_inf must exceed 1");
  }
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2)) {
    throw std::invalid_argument("normalize_freestream: alpha must lie in (0, pi/2)");
  }
  FreeStream fs;
  fs.gas = gas;
  fs.q_inf = q_inf;
  fs.c_inf = std::sqrt(q_inf * q_inf - 1.0);
  fs.rho_inf = gas.a / fs.c_inf;
  fs.alpha = alpha;
  fs.v1_inf = q_inf * std::sin(alpha);
  fs.v3_inf = q_inf * std::cos(alpha);
  return fs;
}

}  // namespace cwing

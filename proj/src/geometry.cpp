#include "cwing/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cwing {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;        // absolute tolerance for angle comparisons
constexpr double kTangencyTol = 1e-9;      // relative discriminant tolerance

Vector2d wing_ray_dir(double beta) { return {-std::sin(beta), std::cos(beta)}; }
}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::DeltaWing: return "DeltaWing";
    case Regime::Subcritical: return "Subcritical";
    case Regime::PlanarShock: return "PlanarShock";
    case Regime::Reflected: return "Reflected";
    case Regime::BeyondScope: return "BeyondScope";
    case Regime::ShockDetached: return "ShockDetached";
    case Regime::Concentration: return "Concentration";
  }
  return "?";
}

WingBasis wing_basis(const WingAngles& angles) {
  const double sb = std::sin(angles.beta), cb = std::cos(angles.beta);
  const double ss = std::sin(angles.sigma), cs = std::cos(angles.sigma);
  WingBasis b;
  b.ei = {cb, sb, 0.0};
  b.ej = {-cs * sb, cs * cb, ss};
  b.ek = b.ei.cross(b.ej);  // (ss*sb, -ss*cb, cs)
  return b;
}

std::pair<double, double> normal_plane_decomposition(const FreeStream& fs,
                                                     const WingAngles& angles) {
  const double sb = std::sin(angles.beta), cb = std::cos(angles.beta);
  const double ss = std::sin(angles.sigma), cs = std::cos(angles.sigma);
  const double vi = fs.v1_inf * cb;                       // along e_i
  const double vk = fs.v1_inf * ss * sb + fs.v3_inf * cs; // along e_k
  const double q_tilde = std::hypot(vi, vk);
  const double theta_n = std::atan2(vi, vk);
  return {q_tilde, theta_n};
}

DownstreamUniform downstream_state(const FreeStream& fs, const WingAngles& angles) {
  const auto [q_tilde, theta_n] = normal_plane_decomposition(fs, angles);
  const PolarState ps = polar_state(q_tilde, fs.c_inf, theta_n);
  const double q_j = ps.speed();

  const double sb = std::sin(angles.beta), cb = std::cos(angles.beta);
  const double ss = std::sin(angles.sigma), cs = std::cos(angles.sigma);

  DownstreamUniform st;
  st.q_tilde = q_tilde;
  st.theta_n = theta_n;
  st.q_j = q_j;
  st.v1 = fs.v1_inf * cs * cs * sb * sb - fs.v3_inf * ss * cs * sb + q_j * ss * sb;
  st.v2 = -fs.v1_inf * cs * cs * sb * cb + fs.v3_inf * ss * cs * cb - q_j * ss * cb;
  st.v3 = -fs.v1_inf * cs * ss * sb + fs.v3_inf * ss * ss + q_j * cs;
  st.c = std::sqrt(st.v1 * st.v1 + st.v2 * st.v2 + st.v3 * st.v3 - 1.0);
  return st;
}

double critical_alpha(const FreeStream& fs) { return std::asin(fs.c_inf / fs.q_inf); }

double critical_sigma(const FreeStream& fs) {
  const double arg = std::sqrt(fs.q_inf * fs.q_inf - fs.c_inf * fs.c_inf) / fs.v3_inf;
  if (arg >= 1.0) {
    throw std::domain_error("critical_sigma: no attached-edge sweep exists (alpha too large)");
  }
  return std::asin(arg);
}

bool concentration_check(const FreeStream& fs, const WingAngles& angles) {
  const auto [q_tilde, theta_n] = normal_plane_decomposition(fs, angles);
  return fs.c_inf < q_tilde && q_tilde * std::sin(theta_n) < fs.c_inf;
}

ConicCurve mach_cone_inf(const FreeStream& fs) { return {fs.v1_inf, 0.0, fs.v3_inf}; }

ConicCurve mach_cone_downstream(const DownstreamUniform& st) { return {st.v1, st.v2, st.v3}; }

ShockLine shock_line_ob(const FreeStream& fs, const DownstreamUniform& st) {
  ShockLine s;
  s.n1 = st.v1 - fs.v1_inf;
  s.n2 = st.v2;
  s.d = st.v3 - fs.v3_inf;
  if (std::abs(s.n1) < 1e-14 && std::abs(s.n2) < 1e-14 && std::abs(s.d) < 1e-14) {
    throw std::domain_error("shock_line_ob: degenerate shock (no deflection)");
  }
  const Vector3d jump(fs.v1_inf - st.v1, -st.v2, fs.v3_inf - st.v3);
  s.normal3d = jump.normalized();
  return s;
}

TangencyResult tangency_point(const ShockLine& line, const ConicCurve& conic) {
  // Eliminate the variable with the larger line coefficient.
  double A, B, C;
  bool elim_xi1 = std::abs(line.n1) >= std::abs(line.n2);
  double a, b;  // substituted variable = a*other + b
  double al, ga;
  if (elim_xi1) {
    a = -line.n2 / line.n1;
    b = -line.d / line.n1;
    al = conic.p1 * a + conic.p2;
    ga = conic.p1 * b + conic.p0;
  } else {
    a = -line.n1 / line.n2;
    b = -line.d / line.n2;
    al = conic.p2 * a + conic.p1;
    ga = conic.p2 * b + conic.p0;
  }
  A = al * al - a * a - 1.0;
  B = 2.0 * (al * ga - a * b);
  C = ga * ga - b * b - 1.0;
  const double scale = std::max({std::abs(A), std::abs(B), std::abs(C), 1e-300});
  const double disc = B * B - 4.0 * A * C;
  const double rel = std::abs(disc) / (scale * scale);
  if (rel > kTangencyTol) {
    throw std::runtime_error("tangency_point: line is not tangent to conic (relative discriminant " +
                             std::to_string(rel) + ")");
  }
  if (std::abs(A) < 1e-14 * scale) {
    throw std::runtime_error("tangency_point: degenerate (linear) substitution, no double root");
  }
  const double root = -B / (2.0 * A);
  Vector2d p;
  if (elim_xi1) {
    p = {a * root + b, root};
  } else {
    p = {root, a * root + b};
  }
  return {p, rel};
}

double ray_root(const ConicCurve& conic, const Vector2d& dir) {
  const Vector2d d = dir.normalized();
  const double pd = conic.p1 * d[0] + conic.p2 * d[1];
  const double A = pd * pd - 1.0;
  const double B = 2.0 * pd * conic.p0;
  const double C = conic.p0 * conic.p0 - 1.0;
  const double scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
  if (std::abs(A) < 1e-14 * scale) {
    if (B >= 0.0) throw std::runtime_error("ray_root: ray never reaches the curve");
    const double t = -C / B;
    if (t <= 0.0) throw std::runtime_error("ray_root: no positive intersection");
    return t;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw std::runtime_error("ray_root: ray never reaches the curve");
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
  double best = std::numeric_limits<double>::infinity();
  for (double t : {q / A, (q != 0.0 ? C / q : std::numeric_limits<double>::quiet_NaN())}) {
    if (std::isfinite(t) && t > 1e-14 && t < best) best = t;
  }
  if (!std::isfinite(best)) throw std::runtime_error("ray_root: no positive intersection");
  return best;
}

std::map<std::string, Vector2d> key_points(const FreeStream& fs, const WingAngles& angles,
                                           const DownstreamUniform& st) {
  std::map<std::string, Vector2d> pts;
  const ConicCurve ci = mach_cone_inf(fs);
  const ConicCurve cs = mach_cone_downstream(st);
  const Vector2d uw = wing_ray_dir(angles.beta);
  const Vector2d axis(-1.0, 0.0);

  pts["P2"] = ray_root(ci, axis) * axis;
  pts["P0"] = ray_root(ci, uw) * uw;
  pts["P4"] = ray_root(cs, uw) * uw;
  pts["P5"] = (1.0 / std::tan(angles.sigma)) * uw;
  const double dn1 = st.v1 - fs.v1_inf;
  if (std::abs(dn1) > 1e-300) {
    pts["P6"] = Vector2d(-(st.v3 - fs.v3_inf) / dn1, 0.0);
  }
  return pts;
}

double critical_beta_c(const FreeStream& fs, double sigma) {
  const double xi1_p2 = -ray_root(mach_cone_inf(fs), Vector2d(-1.0, 0.0));
  const double arg = -xi1_p2 * std::tan(sigma);
  if (arg < 0.0 || arg > 1.0) {
    throw std::domain_error("critical_beta_c: arcsin argument outside [0,1] (inconsistent sigma)");
  }
  return std::asin(arg);
}

ReflectedConstruction resulting_shock_state(const FreeStream& fs, const DownstreamUniform& st) {
  const double dn1 = st.v1 - fs.v1_inf;
  const double dn3 = st.v3 - fs.v3_inf;
  if (std::abs(dn1) < 1e-12) {
    throw std::runtime_error("resulting_shock_state: attached shocks do not intersect on the axis");
  }
  const double X = -dn3 / dn1;  // xi1-coordinate of P6

  // Orthonormal frame about the intersection line L_R (direction (X,0,1)).
  const Vector3d ei_p(0.0, -1.0, 0.0);
  const Vector3d ej_p = Vector3d(X, 0.0, 1.0).normalized();
  const Vector3d ek_p = ei_p.cross(ej_p);  // (-1,0,X)/|.|

  const Vector3d v_sigma = st.velocity();
  const double vj = v_sigma.dot(ej_p);
  const double ai = v_sigma.dot(ei_p);  // = -v2 >= 0
  const double ak = v_sigma.dot(ek_p);
  const double q_tilde_sigma = std::hypot(ai, ak);
  const double theta_n_prime = std::atan2(ai, std::abs(ak));

  const PolarState ps = polar_state(q_tilde_sigma, st.c, theta_n_prime);
  const double q_jR = ps.speed();

  const Vector3d m_hat = (ak >= 0.0 ? 1.0 : -1.0) * ek_p;
  const Vector3d vR = vj * ej_p + q_jR * m_hat;

  ReflectedConstruction rc;
  rc.state.v1R = vR[0];
  rc.state.v3R = vR[2];
  rc.state.cR = std::sqrt(vR.squaredNorm() - 1.0);
  rc.state.q_tilde_sigma = q_tilde_sigma;
  rc.state.theta_n_prime = theta_n_prime;
  rc.state.q_jR = q_jR;

  rc.s_r.n1 = rc.state.v1R - st.v1;
  rc.s_r.n2 = -st.v2;
  rc.s_r.d = rc.state.v3R - st.v3;
  rc.s_r.normal3d = (v_sigma - vR).normalized();

  rc.c_sigma_prime = {rc.state.v1R, 0.0, rc.state.v3R};
  return rc;
}

namespace {

// g(beta) = beta - arcsin(|OP4|/|OP6|); NaN where the construction fails.
double beta0_g(const FreeStream& fs, double sigma, double beta) {
  try {
    const WingAngles a{sigma, beta};
    const DownstreamUniform st = downstream_state(fs, a);
    const ConicCurve cs = mach_cone_downstream(st);
    const double op4 = ray_root(cs, wing_ray_dir(beta));
    const double dn1 = st.v1 - fs.v1_inf;
    if (std::abs(dn1) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
    const double op6 = std::abs((st.v3 - fs.v3_inf) / dn1);
    const double arg = op4 / op6;
    if (arg > 1.0) return std::numeric_limits<double>::quiet_NaN();
    return beta - std::asin(arg);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

Beta0Result critical_beta_0(const FreeStream& fs, double sigma, double scan_step) {
  Beta0Result res;
  const double beta_c = critical_beta_c(fs, sigma);
  const double lo = beta_c + 1e-6;
  const double hi = kPi / 2 - 1e-3;

  double prev_b = lo;
  double prev_g = beta0_g(fs, sigma, lo);
  res.g_trace.emplace_back(prev_b, prev_g);
  for (double b = lo + scan_step; b <= hi + 0.5 * scan_step; b += scan_step) {
    const double bb = std::min(b, hi);
    const double g = beta0_g(fs, sigma, bb);
    res.g_trace.emplace_back(bb, g);
    if (std::isfinite(prev_g) && std::isfinite(g) && prev_g * g <= 0.0 && prev_g != g) {
      double a = prev_b, c = bb, ga = prev_g;
      while (c - a > 1e-10) {
        const double m = 0.5 * (a + c);
        const double gm = beta0_g(fs, sigma, m);
        if (!std::isfinite(gm)) break;
        if (ga * gm <= 0.0) {
          c = m;
        } else {
          a = m;
          ga = gm;
        }
      }
      res.roots.push_back(0.5 * (a + c));
    }
    prev_b = bb;
    prev_g = g;
  }
  if (!res.roots.empty()) {
    res.found = true;
    res.beta0 = *std::min_element(res.roots.begin(), res.roots.end());
  }
  return res;
}

RegimeReport classify_regime(const FreeStream& fs, const WingAngles& angles) {
  RegimeReport rep;
  rep.fs = fs;
  rep.angles = angles;
  rep.alpha0 = critical_alpha(fs);

  if (fs.alpha >= rep.alpha0 - kAngleTol) {
    rep.regime = Regime::Concentration;
    rep.diagnostic = "attack angle at or above alpha0";
    return rep;
  }
  rep.sigma0 = critical_sigma(fs);
  if (angles.sigma > *rep.sigma0 + kAngleTol) {
    rep.regime = Regime::ShockDetached;
    rep.diagnostic = "sweep angle above sigma0";
    return rep;
  }
  if (!concentration_check(fs, angles)) {
    rep.regime = Regime::Concentration;
    rep.diagnostic = "concentration condition violated";
    return rep;
  }

  rep.beta_c = critical_beta_c(fs, angles.sigma);
  const Beta0Result b0 = critical_beta_0(fs, angles.sigma);
  if (b0.found) rep.beta0 = b0.beta0;

  DownstreamUniform st;
  try {
    st = downstream_state(fs, angles);
  } catch (const ConcentrationError& e) {
    rep.regime = Regime::Concentration;
    rep.diagnostic = e.what();
    return rep;
  }
  rep.state = st;
  rep.c_inf = mach_cone_inf(fs);
  rep.c_sigma = mach_cone_downstream(st);
  rep.s_ob = shock_line_ob(fs, st);
  rep.points = key_points(fs, angles, st);
  rep.points["P1"] = tangency_point(*rep.s_ob, *rep.c_inf).point;

  const double beta = angles.beta;
  if (beta < kAngleTol) {
    rep.regime = Regime::DeltaWing;
  } else if (std::abs(beta - *rep.beta_c) <= kAngleTol) {
    rep.regime = Regime::PlanarShock;
  } else if (beta < *rep.beta_c) {
    rep.regime = Regime::Subcritical;
  } else if (rep.beta0 && beta <= *rep.beta0 + kAngleTol) {
    rep.regime = Regime::Reflected;
  } else {
    rep.regime = Regime::BeyondScope;
    rep.diagnostic = rep.beta0 ? "anhedral angle above beta0" : "no beta0 located";
  }

  if (rep.regime == Regime::Reflected) {
    try {
      ReflectedConstruction rc = resulting_shock_state(fs, st);
      rep.resulting = rc.state;
      rep.s_r = rc.s_r;
      rep.c_sigma_prime = rc.c_sigma_prime;
      rep.points["PR"] = tangency_point(rc.s_r, *rep.c_sigma).point;
      rep.points["P7"] = ray_root(rc.c_sigma_prime, Vector2d(-1.0, 0.0)) * Vector2d(-1.0, 0.0);
    } catch (const std::exception& e) {
      rep.regime = Regime::BeyondScope;
      rep.diagnostic = e.what();
    }
  }
  return rep;
}

}  // namespace cwing

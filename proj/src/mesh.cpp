#include "cwing/mesh.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cwing {

namespace {
constexpr double kPi = std::numbers::pi;

Vector2d dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

const ArcSegment& select_arc(const DomainSpec& spec, double theta) {
  for (const ArcSegment& a : spec.outer_arcs) {
    if (theta >= a.theta_lo - 1e-12) return a;
  }
  throw std::domain_error("DomainSpec: angle below the wing ray");
}
}  // namespace

double DomainSpec::radius(double theta) const {
  return ray_root(select_arc(*this, theta).conic, dir(theta));
}

void DomainSpec::radius3(double theta, double& R, double& dR, double& d2R) const {
  const ArcSegment& a = select_arc(*this, theta);
  const Vector2d d = dir(theta);
  const Vector2d dp(-d[1], d[0]);
  R = ray_root(a.conic, d);
  // Implicit differentiation of (u R + p0)^2 = 1 + R^2 with u = p.d(theta),
  // using u' = p.d_perp and u'' = -u.
  const double u = a.conic.p1 * d[0] + a.conic.p2 * d[1];
  const double up = a.conic.p1 * dp[0] + a.conic.p2 * dp[1];
  const double l = u * R + a.conic.p0;
  const double denom = R - u * l;
  if (std::abs(denom) < 1e-12 * std::max(1.0, R)) {
    throw std::runtime_error("DomainSpec::radius3: ray tangent to outer arc");
  }
  dR = l * up * R / denom;
  const double lp = up * R + u * dR;
  d2R = (dR * dR + u * R * l - 2.0 * up * dR * l - lp * lp) / (-denom);
}

std::string tag_name(NodeTag t) {
  switch (t) {
    case NodeTag::Interior: return "Interior";
    case NodeTag::Wing: return "Wing";
    case NodeTag::Sym: return "Sym";
    case NodeTag::Degenerate: return "Degenerate";
    case NodeTag::CornerO: return "CornerO";
  }
  return "?";
}

DomainSpec build_domain(const RegimeReport& report) {
  const bool reflected = report.regime == Regime::Reflected;
  const bool attached = report.regime == Regime::DeltaWing ||
                        report.regime == Regime::Subcritical ||
                        report.regime == Regime::PlanarShock;
  if (!attached && !reflected) {
    throw std::domain_error("build_domain: regime has no elliptic region (" +
                            regime_name(report.regime) + ")");
  }
  if (!report.c_sigma || !report.points.count("P4") ||
      (reflected && !report.c_sigma_prime)) {
    throw std::domain_error("build_domain: report lacks the downstream construction");
  }

  DomainSpec spec;
  spec.beta = report.angles.beta;
  spec.theta_wing = kPi / 2 + spec.beta;

  const std::string axis_name = reflected ? "P7" : "P2";
  const std::string split_name = reflected ? "PR" : "P1";
  const ConicCurve upper = reflected ? *report.c_sigma_prime : *report.c_inf;
  const Vector2d p_axis = report.points.at(axis_name);
  const Vector2d p_split = report.points.at(split_name);
  const Vector2d p4 = report.points.at("P4");

  spec.sym_extent = p_axis.norm();
  spec.wing_extent = p4.norm();
  spec.corners[axis_name] = p_axis;
  spec.corners[split_name] = p_split;
  spec.corners["P4"] = p4;

  double theta_split = std::atan2(p_split[1], p_split[0]);
  if (theta_split < 0.0) theta_split += 2.0 * kPi;  // split point can sit at -0 below the axis
  theta_split = std::min(theta_split, kPi);
  if (kPi - theta_split > 1e-10) {
    spec.outer_arcs.push_back({upper, theta_split, kPi});
    spec.outer_arcs.push_back({*report.c_sigma, spec.theta_wing, theta_split});
  } else {
    // Planar shock: the split point sits on the axis, one arc remains.
    spec.outer_arcs.push_back({*report.c_sigma, spec.theta_wing, kPi});
  }

  // Corner consistency against the classification output.
  if (std::abs(spec.radius(kPi) - spec.sym_extent) > 1e-9 ||
      std::abs(spec.radius(spec.theta_wing) - spec.wing_extent) > 1e-9) {
    throw std::runtime_error("build_domain: corner points inconsistent with arcs");
  }

  // Star-shape certificate: R finite, positive, with bounded variation on a
  // dense angular sample.
  const int n = 2000;
  double prev = spec.radius(kPi);
  for (int k = 1; k <= n; ++k) {
    const double theta = kPi - (kPi / 2 - spec.beta) * k / n;
    const double r = spec.radius(theta);
    if (!(r > 0.0) || !std::isfinite(r) || std::abs(r - prev) > 0.05 * std::max(1.0, prev)) {
      throw std::runtime_error("build_domain: star-shape check failed at theta=" +
                               std::to_string(theta));
    }
    prev = r;
  }
  return spec;
}

Grid generate_grid(const DomainSpec& spec, int Ns, int Nt, double stretch) {
  if (Ns < 9 || Nt < 9) throw std::invalid_argument("generate_grid: Ns, Nt must be >= 9");
  if (!(stretch >= 1.0)) throw std::invalid_argument("generate_grid: stretch must be >= 1");

  Grid g;
  g.Ns = Ns;
  g.Nt = Nt;
  g.stretch = stretch;
  g.domain = spec;

  g.s.resize(Ns);
  for (int i = 0; i < Ns; ++i) g.s[i] = static_cast<double>(i) / (Ns - 1);

  // Radial widths shrink geometrically toward t=1 (ratio 1/stretch).
  g.t.resize(Nt);
  g.t[0] = 0.0;
  double total = 0.0, w = 1.0;
  std::vector<double> widths(Nt - 1);
  for (int j = 0; j < Nt - 1; ++j, w /= stretch) {
    widths[j] = w;
    total += w;
  }
  for (int j = 1; j < Nt; ++j) g.t[j] = g.t[j - 1] + widths[j - 1] / total;
  g.t[Nt - 1] = 1.0;

  g.xi.resize(Ns * Nt);
  g.tags.resize(Ns * Nt);
  for (int i = 0; i < Ns; ++i) {
    const double theta = g.theta(g.s[i]);
    double R, dR, d2R;
    spec.radius3(theta, R, dR, d2R);
    // det J = t R^2 (pi/2 - beta) > 0 wherever t > 0.
    if (!(R > 0.0)) {
      throw std::runtime_error("generate_grid: non-positive Jacobian at i=" + std::to_string(i));
    }
    const Vector2d d = dir(theta);
    for (int j = 0; j < Nt; ++j) {
      const int k = g.idx(i, j);
      g.xi[k] = g.t[j] * R * d;
      if (j == 0) {
        g.tags[k] = NodeTag::CornerO;
      } else if (j == Nt - 1) {
        g.tags[k] = NodeTag::Degenerate;
      } else if (i == 0) {
        g.tags[k] = NodeTag::Sym;
      } else if (i == Ns - 1) {
        g.tags[k] = NodeTag::Wing;
      } else {
        g.tags[k] = NodeTag::Interior;
      }
    }
  }
  return g;
}

void write_grid_csv(const Grid& grid, std::ostream& os) {
  os << "i,j,xi1,xi2,tag\n";
  os.precision(17);
  for (int i = 0; i < grid.Ns; ++i) {
    for (int j = 0; j < grid.Nt; ++j) {
      const Vector2d& p = grid.xi[grid.idx(i, j)];
      os << i << ',' << j << ',' << p[0] << ',' << p[1] << ','
         << tag_name(grid.tags[grid.idx(i, j)]) << '\n';
    }
  }
}

}  // namespace cwing

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cwing/geometry.hpp"

using namespace cwing;
namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

FreeStream ref_fs() { return normalize_freestream(2.0, kPi / 6); }

// Both velocities must see the shock plane as characteristic: |w.n| = c.
void check_characteristic(const Vector3d& n, const Vector3d& w_up, double c_up,
                          const Vector3d& w_dn, double c_dn) {
  CHECK(std::abs(w_up.dot(n)) == doctest::Approx(c_up).epsilon(1e-10));
  CHECK(std::abs(w_dn.dot(n)) == doctest::Approx(c_dn).epsilon(1e-10));
  // Tangential continuity: the jump is parallel to n.
  const Vector3d jump = w_up - w_dn;
  CHECK(jump.cross(n).norm() <= 1e-10 * jump.norm());
}
}  // namespace

TEST_CASE("wing basis is orthonormal and right-handed") {
  const WingBasis b = wing_basis({0.5, 0.3});
  CHECK(b.ei.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.ej.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.ek.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.ei.dot(b.ej) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(b.ei.cross(b.ej).isApprox(b.ek, 1e-14));
  CHECK(b.ek[0] == doctest::Approx(std::sin(0.5) * std::sin(0.3)).epsilon(1e-14));
  CHECK(b.ek[1] == doctest::Approx(-std::sin(0.5) * std::cos(0.3)).epsilon(1e-14));
  CHECK(b.ek[2] == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
}

TEST_CASE("normal-plane decomposition at beta = 0") {
  const auto [q_tilde, theta_n] = normal_plane_decomposition(ref_fs(), {0.5, 0.0});
  CHECK(q_tilde == doctest::Approx(std::sqrt(1.0 + 3.0 * std::cos(0.5) * std::cos(0.5)))
                       .epsilon(1e-12));
  CHECK(theta_n == doctest::Approx(std::atan(1.0 / (kSqrt3 * std::cos(0.5)))).epsilon(1e-12));
}

TEST_CASE("critical angles in closed form") {
  const FreeStream fs = ref_fs();
  CHECK(critical_alpha(fs) == doctest::Approx(kPi / 3).epsilon(1e-14));
  CHECK(critical_sigma(fs) == doctest::Approx(std::asin(1.0 / kSqrt3)).epsilon(1e-12));
  const FreeStream fs_hi = normalize_freestream(2.0, kPi / 3 - 1e-3);
  CHECK_NOTHROW(critical_sigma(fs_hi));
  CHECK_THROWS_AS(critical_sigma(normalize_freestream(2.0, kPi / 3)), std::domain_error);
}

TEST_CASE("concentration check for the reference configuration") {
  CHECK(concentration_check(ref_fs(), {0.5, 0.0}));
  CHECK(concentration_check(ref_fs(), {0.5, 0.1}));
}

TEST_CASE("xi1 coordinate of P2 is -1/sqrt(3)") {
  const FreeStream fs = ref_fs();
  const double t = ray_root(mach_cone_inf(fs), Vector2d(-1.0, 0.0));
  CHECK(-t == doctest::Approx(-1.0 / kSqrt3).epsilon(1e-12));
}

TEST_CASE("critical anhedral angle beta_c") {
  const double bc = critical_beta_c(ref_fs(), 0.5);
  CHECK(bc == doctest::Approx(std::asin(std::tan(0.5) / kSqrt3)).epsilon(1e-12));
}

TEST_CASE("downstream slip condition on the wing") {
  const FreeStream fs = ref_fs();
  for (double beta : {0.0, 0.1, 0.2, 0.3}) {
    const DownstreamUniform st = downstream_state(fs, {0.5, beta});
    CHECK(st.v1 * std::cos(beta) + st.v2 * std::sin(beta) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // Bernoulli downstream: |v|^2 - c^2 = 1.
    const double q2 = st.velocity().squaredNorm();
    CHECK(q2 - st.c * st.c == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("planar shock at beta = beta_c: v1 = v2 = 0 and P1 = P2") {
  const FreeStream fs = ref_fs();
  const double bc = critical_beta_c(fs, 0.5);
  const DownstreamUniform st = downstream_state(fs, {0.5, bc});
  CHECK(std::abs(st.v1) < 1e-9);
  CHECK(std::abs(st.v2) < 1e-9);
  const ShockLine s = shock_line_ob(fs, st);
  const TangencyResult tr = tangency_point(s, mach_cone_inf(fs));
  CHECK(tr.point[0] == doctest::Approx(-1.0 / kSqrt3).epsilon(1e-9));
  CHECK(std::abs(tr.point[1]) < 1e-9);
}

TEST_CASE("oblique shock plane is characteristic on both sides") {
  const FreeStream fs = ref_fs();
  for (double beta : {0.0, 0.1, 0.25}) {
    const DownstreamUniform st = downstream_state(fs, {0.5, beta});
    const ShockLine s = shock_line_ob(fs, st);
    check_characteristic(s.normal3d, Vector3d(fs.v1_inf, 0.0, fs.v3_inf), fs.c_inf,
                         st.velocity(), st.c);
  }
}

TEST_CASE("shock line S_ob is tangent to C_inf with P1 on both curves") {
  const FreeStream fs = ref_fs();
  const DownstreamUniform st = downstream_state(fs, {0.5, 0.1});
  const ShockLine s = shock_line_ob(fs, st);
  const ConicCurve ci = mach_cone_inf(fs);
  const TangencyResult tr = tangency_point(s, ci);
  CHECK(tr.residual <= 1e-9);
  CHECK(std::abs(s.eval(tr.point)) < 1e-10);
  CHECK(std::abs(ci.residual(tr.point)) < 1e-9);
  // The downstream cone passes through the same shock line region: the
  // shock is the locus where the two linear potentials agree.
  const ConicCurve cs = mach_cone_downstream(st);
  CHECK(std::abs(ci.ell(tr.point) - cs.ell(tr.point)) < 1e-10);
}

TEST_CASE("key points of the subcritical construction") {
  const FreeStream fs = ref_fs();
  const WingAngles a{0.5, 0.1};
  const DownstreamUniform st = downstream_state(fs, a);
  const auto pts = key_points(fs, a, st);
  CHECK(pts.count("P0") == 1);
  CHECK(pts.count("P2") == 1);
  CHECK(pts.count("P4") == 1);
  CHECK(pts.count("P5") == 1);
  CHECK(pts.count("P6") == 1);
  // P2 on C_inf along the negative axis.
  CHECK(pts.at("P2")[0] == doctest::Approx(-1.0 / kSqrt3).epsilon(1e-12));
  // P0 on C_inf, P4 on C_sigma, both on the wing ray.
  CHECK(std::abs(mach_cone_inf(fs).residual(pts.at("P0"))) < 1e-10);
  CHECK(std::abs(mach_cone_downstream(st).residual(pts.at("P4"))) < 1e-10);
  const Vector2d uw(-std::sin(a.beta), std::cos(a.beta));
  CHECK(pts.at("P0").normalized().isApprox(uw, 1e-12));
  CHECK(pts.at("P4").normalized().isApprox(uw, 1e-12));
  // P4 strictly inside the segment O-P0 (downstream cone is smaller).
  CHECK(pts.at("P4").norm() < pts.at("P0").norm());
  // P5 = cot(sigma) along the wing ray (wing tip direction).
  CHECK(pts.at("P5").norm() == doctest::Approx(1.0 / std::tan(0.5)).epsilon(1e-12));
}

TEST_CASE("P1 -> P2 as beta -> beta_c from below") {
  const FreeStream fs = ref_fs();
  const double bc = critical_beta_c(fs, 0.5);
  double prev = 1e9;
  for (double db : {1e-2, 1e-4, 1e-6}) {
    const DownstreamUniform st = downstream_state(fs, {0.5, bc - db});
    const ShockLine s = shock_line_ob(fs, st);
    const Vector2d p1 = tangency_point(s, mach_cone_inf(fs)).point;
    const double gap = (p1 - Vector2d(-1.0 / kSqrt3, 0.0)).norm();
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("beta_0 root agrees with a dense scan") {
  const FreeStream fs = ref_fs();
  const Beta0Result coarse = critical_beta_0(fs, 0.5);
  REQUIRE(coarse.found);
  const Beta0Result dense = critical_beta_0(fs, 0.5, 1e-5);
  REQUIRE(dense.found);
  CHECK(std::abs(coarse.beta0 - dense.beta0) < 1e-8);
  const double bc = critical_beta_c(fs, 0.5);
  CHECK(coarse.beta0 > bc);
  CHECK(coarse.beta0 < kPi / 2);
  // Sign behavior: g < 0 just above beta_c, g > 0 near pi/2 (where defined).
  double first_g = std::numeric_limits<double>::quiet_NaN();
  double last_g = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [b, g] : coarse.g_trace) {
    if (std::isfinite(g)) {
      if (!std::isfinite(first_g)) first_g = g;
      last_g = g;
    }
  }
  CHECK(first_g < 0.0);
  CHECK(last_g > 0.0);
}

TEST_CASE("reflected construction is characteristic and symmetric") {
  const FreeStream fs = ref_fs();
  const double bc = critical_beta_c(fs, 0.5);
  const Beta0Result b0 = critical_beta_0(fs, 0.5);
  REQUIRE(b0.found);
  const double beta = 0.5 * (bc + b0.beta0);
  const DownstreamUniform st = downstream_state(fs, {0.5, beta});
  const ReflectedConstruction rc = resulting_shock_state(fs, st);
  // Reflected state lies in the symmetry plane with Bernoulli normalization.
  const Vector3d vR = rc.state.velocity();
  CHECK(vR.squaredNorm() - rc.state.cR * rc.state.cR == doctest::Approx(1.0).epsilon(1e-10));
  // The reflected shock plane is characteristic on both sides.
  check_characteristic(rc.s_r.normal3d, st.velocity(), st.c, vR, rc.state.cR);
  // S_R is tangent to C_sigma.
  const TangencyResult tr = tangency_point(rc.s_r, mach_cone_downstream(st));
  CHECK(tr.residual <= 1e-9);
  // The shock line passes through P6 on the symmetry axis.
  const double x6 = -(st.v3 - fs.v3_inf) / (st.v1 - fs.v1_inf);
  CHECK(std::abs(rc.s_r.eval(Vector2d(x6, 0.0))) < 1e-9);
}

TEST_CASE("regime classification across beta") {
  const FreeStream fs = ref_fs();
  const double bc = critical_beta_c(fs, 0.5);
  const Beta0Result b0 = critical_beta_0(fs, 0.5);
  REQUIRE(b0.found);

  CHECK(classify_regime(fs, {0.5, 0.0}).regime == Regime::DeltaWing);
  const RegimeReport sub = classify_regime(fs, {0.5, 0.1});
  CHECK(sub.regime == Regime::Subcritical);
  CHECK(sub.points.count("P1") == 1);
  CHECK(sub.state.has_value());
  CHECK(classify_regime(fs, {0.5, bc}).regime == Regime::PlanarShock);

  const RegimeReport refl = classify_regime(fs, {0.5, 0.5 * (bc + b0.beta0)});
  CHECK(refl.regime == Regime::Reflected);
  CHECK(refl.resulting.has_value());
  CHECK(refl.points.count("PR") == 1);
  CHECK(refl.points.count("P7") == 1);

  CHECK(classify_regime(fs, {0.5, b0.beta0 + 0.05}).regime == Regime::BeyondScope);
  CHECK(classify_regime(fs, {0.7, 0.1}).regime == Regime::ShockDetached);
  CHECK(classify_regime(normalize_freestream(2.0, kPi / 3 - 1e-14), {0.5, 0.1}).regime ==
        Regime::Concentration);
}

TEST_CASE("regime names are stable identifiers") {
  CHECK(regime_name(Regime::DeltaWing) == "DeltaWing");
  CHECK(regime_name(Regime::Reflected) == "Reflected");
  CHECK(regime_name(Regime::BeyondScope) == "BeyondScope");
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cwing/oracle.hpp"

using namespace cwing;
namespace {
constexpr double kPi = std::numbers::pi;

struct Reference {
  FreeStream fs = normalize_freestream(2.0, kPi / 6);
  RegimeReport report = classify_regime(fs, {0.5, 0.1});
  DomainSpec spec = build_domain(report);
};

const Reference& ref() {
  static const Reference r;
  return r;
}
}  // namespace

TEST_CASE("exact_w spot values and scaling linearity") {
  CHECK(exact_w({0, 0, 2}, {0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(exact_w({1, 0, 0}, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 10; ++k) {
    const Vector3d eta(U(rng), U(rng), U(rng));
    const Vector2d xi(U(rng), U(rng));
    const double tau = std::abs(U(rng)) + 0.1;
    CHECK(exact_w(tau * eta, xi) ==
          doctest::Approx(tau * exact_w(eta, xi)).epsilon(1e-13));
  }
}

TEST_CASE("w^eta satisfies the continuous w-equation for random (eta, xi, mu)") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0), M(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vector3d eta(U(rng), U(rng), U(rng));
    const Vector2d xi(U(rng), U(rng));
    CHECK(std::abs(w_equation_residual(eta, xi, M(rng))) < 1e-10);
  }
}

TEST_CASE("envelopes: admissibility, ordering, boundary contact, interior gap") {
  const double eps = 0.05;
  Grid g = generate_grid(ref().spec, 33, 33, 1.05);
  const EnvelopePair env = make_envelope_pair(g, eps, ref().fs, ref().report, 256);
  CHECK(env.samples_plus.size() >= 256);
  CHECK(env.samples_minus.size() >= 256);

  // Recheck every sample against its sector and boundary-inequality
  // definition, exactly as stated.
  const double beta = 0.1;
  auto check_samples = [&](const std::vector<Vector3d>& etas, bool upper) {
    for (const Vector3d& eta : etas) {
      REQUIRE(eta[2] > 0.0);
      double ang = std::atan2(eta[1] / eta[2], eta[0] / eta[2]);
      if (ang < 0.0) ang += 2.0 * kPi;
      if (upper) {
        CHECK(ang > 1.5 * kPi + beta);
        CHECK(ang < 2.0 * kPi);
      } else {
        CHECK(ang > 0.5 * kPi + beta);
        CHECK(ang < kPi);
      }
      for (size_t k = 0; k < g.xi.size(); ++k) {
        if (g.tags[k] != NodeTag::Degenerate) continue;
        const double w = exact_w(eta, g.xi[k]);
        if (upper) {
          CHECK(w > 1.0 + eps);
        } else {
          CHECK(w < 1.0 + eps);
        }
      }
    }
  };
  check_samples(env.samples_plus, true);
  check_samples(env.samples_minus, false);

  for (size_t k = 0; k < g.xi.size(); ++k) {
    CHECK(env.w_minus[k] <= env.w_plus[k]);
    if (g.tags[k] == NodeTag::Degenerate) {
      CHECK(env.w_plus[k] == doctest::Approx(1.0 + eps).epsilon(1e-8));
    }
    if (g.tags[k] == NodeTag::Interior) CHECK(env.w_minus[k] > 1.0 + eps);
  }
}

TEST_CASE("envelope rejects undersized sampling requests") {
  Grid g = generate_grid(ref().spec, 17, 17, 1.05);
  CHECK_THROWS_AS(envelope(g, 0.05, ref().fs, ref().report, EnvelopeDirection::Upper, 32),
                  std::invalid_argument);
}

TEST_CASE("bound_check: converged solve inside the band, perturbation flagged") {
  const double eps = 0.05;
  Grid g = generate_grid(ref().spec, 33, 33, 1.05);
  Discretization disc(g, BCMode::Mixed);
  SolverConfig cfg;
  const ContinuationResult cr = continuation_solve(disc, eps, cfg);
  REQUIRE(cr.completed);
  SolutionField sf = reconstruct_fields(disc, cr.psi, 1.0, eps);
  const EnvelopePair env = make_envelope_pair(g, eps, ref().fs, ref().report, 256);

  const BoundReport clean = bound_check(sf, env);
  CHECK(clean.violations.empty());

  // The envelopes evaluated as fields trivially sit inside their own band.
  SolutionField as_field = sf;
  as_field.w = env.w_plus;
  CHECK(bound_check(as_field, env).violations.empty());
  as_field.w = env.w_minus;
  CHECK(bound_check(as_field, env).violations.empty());

  // A +0.1 bump at an interior node where the band is tighter than 0.1
  // must produce an upper violation at exactly that node.
  int k_tight = -1;
  for (size_t k = 0; k < g.xi.size(); ++k) {
    if (g.tags[k] != NodeTag::Interior) continue;
    if (env.w_plus[k] + 5e-3 - sf.w[k] < 0.1 - 1e-6) {
      k_tight = static_cast<int>(k);
      break;
    }
  }
  REQUIRE(k_tight >= 0);
  SolutionField bumped = sf;
  bumped.w[k_tight] += 0.1;
  const BoundReport rep = bound_check(bumped, env);
  CHECK(rep.n_upper >= 1);
  bool found = false;
  for (const BoundViolation& v : rep.violations) {
    if (v.i * g.Nt + v.j == k_tight) found = true;
  }
  CHECK(found);
}

TEST_CASE("manufactured convergence table reports second order for mu in {0, 1}") {
  for (double mu : {0.0, 1.0}) {
    const MmsTable t = mms_convergence(ref().spec, {0, 0, 2}, mu, {17, 33, 65});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows.front().err < 1e-2);
    for (double order : t.orders) {
      CHECK(order > 1.5);
      CHECK(order < 2.5);
    }
  }
}

TEST_CASE("mms_convergence rejects eta that does not dominate 1 on the domain") {
  CHECK_THROWS_AS(mms_convergence(ref().spec, {0, 0, 0.5}, 1.0, {17}),
                  std::invalid_argument);
}

// Times the OpenMP residual/Jacobian assembly against the serial reference
// loop on a sequence of grid sizes.
#include <chrono>
#include <cstdio>
#include <numbers>

#include "cwing/solver.hpp"

using namespace cwing;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  // One warm-up, then the best of `reps` runs.
  fn();
  double best = 1e300;
  for (int k = 0; k < reps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  const FreeStream fs = normalize_freestream(2.0, std::numbers::pi / 6);
  const RegimeReport report = classify_regime(fs, {0.5, 0.1});
  const DomainSpec spec = build_domain(report);

  std::printf("%6s  %12s  %12s  %7s  %12s  %12s  %7s\n", "n", "res_ser[ms]", "res_par[ms]",
              "speedup", "jac_ser[ms]", "jac_par[ms]", "speedup");
  for (int n : {65, 129, 257}) {
    const Grid grid = generate_grid(spec, n, n, 1.05);
    Discretization disc(grid, BCMode::Mixed);
    VectorXd psi = initial_psi(disc, 0.05);
    const int reps = n <= 129 ? 20 : 5;

    const double rs = time_ms([&] { disc.residual(psi, 0.7, 0.05, false); }, reps);
    const double rp = time_ms([&] { disc.residual(psi, 0.7, 0.05, true); }, reps);
    const double js = time_ms([&] { disc.jacobian(psi, 0.7, 0.05, false); }, reps);
    const double jp = time_ms([&] { disc.jacobian(psi, 0.7, 0.05, true); }, reps);

    const VectorXd d = disc.residual(psi, 0.7, 0.05, false) - disc.residual(psi, 0.7, 0.05, true);
    if (d.lpNorm<Eigen::Infinity>() != 0.0) {
      std::printf("n=%d: serial and parallel residuals disagree\n", n);
      return 1;
    }
    std::printf("%6d  %12.3f  %12.3f  %6.2fx  %12.3f  %12.3f  %6.2fx\n", n, rs, rp, rs / rp,
                js, jp, js / jp);
  }
  return 0;
}

// Small tour of the library: thresholds, the eigenvalue branch, the
// perturbative and numerical critical couplings, a stationary state and a
// short time integration.
//
// Usage: quickstart [params.cfg]

#include "kvsync/kvsync.hpp"

#include <cstdio>

int main(int argc, char** argv) {
  using namespace kvsync;

  ModelParams p;
  p.tilt = 0.5;
  p.field = 0.1;
  p.coupling = 2.5;
  if (argc > 1) p = load_params(argv[1]);
  p.validate();

  std::printf("closed-form thresholds (Gamma = %g, R = %g):\n", p.gamma_noise, p.radius);
  for (auto v : kAllVariants) {
    for (int dim : {2, 1}) {
      const auto t = critical_coupling_h0(v, p.gamma_noise, p.radius, dim);
      std::printf("  %-16s %dD  gamma_c = %.10g\n", std::string(to_string(v)).c_str(), dim, t.gamma_c);
    }
  }

  const auto br = eigen_branch(p, continuation_grid(p.field), 32);
  const cplx pert = br.start + p.field * p.field * lambda2(p);
  std::printf("\nlambda_+(h = %g): numeric %.8f %+.8fi, second order %.8f %+.8fi\n", p.field,
              br.lambdas.back().real(), br.lambdas.back().imag(), pert.real(), pert.imag());

  const auto gp = gamma_c_perturbative(p.field, p.tilt, p.gamma_noise, PerturbativeMode::LeadingOrder);
  const auto gn = critical_coupling_numeric(p.field, p);
  std::printf("gamma_c(h): perturbative %.8f, numerical %.8f\n", gp.gamma_c, gn.gamma_c);

  ModelParams still = p;
  still.tilt = 0.0;
  FourierSeries seed = AngularDensity::uniform(32).series();
  seed.set(1, cplx{0.05, 0.0});
  const auto st = solve_stationary_homogeneous(still, SelfConsistencyConfig{}, AngularDensity(seed));
  const auto m1 = moments(st.density, 1);
  std::printf("\nstationary state at F = 0: %d iterations, r1c = %.8f, r1s = %.3g\n", st.iterations,
              m1.cos_moment, m1.sin_moment);

  EvolveConfig cfg;
  cfg.t_max = 50.0;
  const auto tr = evolve_angular(p, sine_bump_density(cfg.n_theta / 2 - 1), cfg);
  std::printf("angular evolution: r(%g) = %.6f\n", tr.final_time, tr.order_params.back());
  return 0;
}

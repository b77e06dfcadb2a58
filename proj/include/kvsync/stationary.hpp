#pragma once

//=============================================================================
// Stationary states by self-consistency iteration.
//
// For a potential U(theta) = -F theta + P(theta) with P periodic, the
// stationary density of the angular Fokker-Planck equation is
//
//   rho(theta) = Z^{-1} exp(-P(theta)/Gamma) Iper(theta),
//   Iper(theta) = int_0^{2 pi} exp(Gamma^{-1} [-F t + P(t + theta)]) dt,
//
// which is 2 pi periodic even when F != 0. U depends on rho only through its
// first n Fourier moments, so T: rho -> rho is iterated to a fixed point.
//
// Iper is evaluated either by the composite trapezoid rule in t (second order,
// the integrand is not periodic in t) or spectrally: expand
// p(s) = exp(P(s)/Gamma) = sum_m p_m exp(i m s) and integrate each exponential
// exactly, Iper = sum_m p_m w_m exp(i m theta), w_m = (1 - e^{-2 pi c})/(c - i m),
// c = F/Gamma.
//=============================================================================

#include "kvsync/errors.hpp"
#include "kvsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace kvsync {

enum class QuadratureRule { Spectral, Trapezoid };

struct SelfConsistencyConfig {
  int quad_points = 512;
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 1.0;
  QuadratureRule rule = QuadratureRule::Spectral;

  void validate() const {
    if (quad_points < 64) throw std::invalid_argument("quad_points must be >= 64");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  }
};

/// Iper on the quad grid, stored as values * exp(log_scale) to survive large
/// potential amplitudes.
struct PeriodicIntegral {
  std::vector<double> values;
  double log_scale = 0.0;

  double at(std::size_t j) const { return values[j] * std::exp(log_scale); }
};

namespace detail {

// Weight of exp(i m t) integrated against exp(-c t) over [0, 2 pi].
inline cplx exp_weight(double c, int m) {
  if (c == 0.0) return m == 0 ? cplx{kTwoPi, 0.0} : cplx{0.0, 0.0};
  return -std::expm1(-kTwoPi * c) / cplx{c, -static_cast<double>(m)};
}

// Iper on the m-node grid given samples of the periodic potential part.
inline PeriodicIntegral periodic_integral_from_samples(std::span<const double> periodic, double slope,
                                                       double gamma_noise, QuadratureRule rule) {
  const int m = static_cast<int>(periodic.size());
  const double pmax = *std::max_element(periodic.begin(), periodic.end());
  std::vector<double> p(periodic.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp((periodic[j] - pmax) / gamma_noise);

  PeriodicIntegral out;
  out.log_scale = pmax / gamma_noise;
  out.values.assign(p.size(), 0.0);

  // Trapezoid in t evaluated per node as a log-sum-exp; positive whenever the
  // result is representable relative to the largest node.
  auto log_domain_trapezoid = [&] {
    const double dt = kTwoPi / m;
    std::vector<double> logs(p.size());
    std::vector<double> terms(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j < m; ++j) {
      double top = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= m; ++i) {
        const double e = (slope * i * dt + periodic[static_cast<std::size_t>((j + i) % m)] - pmax) / gamma_noise;
        terms[static_cast<std::size_t>(i)] = e;
        top = std::max(top, e);
      }
      double acc = 0.0;
      for (int i = 0; i <= m; ++i) {
        acc += ((i == 0 || i == m) ? 0.5 : 1.0) * std::exp(terms[static_cast<std::size_t>(i)] - top);
      }
      logs[static_cast<std::size_t>(j)] = top + std::log(acc * dt);
    }
    const double lmax = *std::max_element(logs.begin(), logs.end());
    out.log_scale = pmax / gamma_noise + lmax;
    for (std::size_t j = 0; j < logs.size(); ++j) out.values[j] = std::exp(logs[j] - lmax);
  };

  if (rule == QuadratureRule::Spectral) {
    std::vector<cplx> in(p.begin(), p.end());
    std::vector<cplx> spec;
    fft_engine().fwd(spec, in);
    const double c = -slope / gamma_noise;
    const int half = (m - 1) / 2;
    std::vector<cplx> weighted(static_cast<std::size_t>(m), cplx{0.0, 0.0});
    for (int n = -half; n <= half; ++n) {
      const auto s = static_cast<std::size_t>(fft_slot(n, m));
      weighted[s] = spec[s] / static_cast<double>(m) * exp_weight(c, n);
    }
    std::vector<cplx> vals;
    fft_engine().inv(vals, weighted);
    for (int j = 0; j < m; ++j) out.values[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j)].real() * m;
    // Sharp potentials: the series loses relative accuracy at the small nodes.
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    if (!std::isfinite(*hi) || !(*lo > 1e-8 * *hi)) log_domain_trapezoid();
  } else if (std::abs(slope) * kTwoPi / gamma_noise > 700.0) {
    log_domain_trapezoid();
  } else {
    const double dt = kTwoPi / m;
    std::vector<double> ramp(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
      ramp[static_cast<std::size_t>(i)] = std::exp(slope * i * dt / gamma_noise) * ((i == 0 || i == m) ? 0.5 : 1.0);
    }
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int i = 0; i <= m; ++i) acc += ramp[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>((j + i) % m)];
      out.values[static_cast<std::size_t>(j)] = acc * dt;
    }
  }
  for (double& v : out.values) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw SolverError("overflow", "periodic integral produced a non-positive or non-finite value");
    }
  }
  return out;
}

// Normalized stationary profile for potential slope*theta + periodic(theta).
inline FourierSeries stationary_profile(const FourierSeries& periodic, double slope, double gamma_noise,
                                        const SelfConsistencyConfig& cfg, int max_mode) {
  const auto pv = periodic.sample(cfg.quad_points);
  const auto integral = periodic_integral_from_samples(pv, slope, gamma_noise, cfg.rule);
  const double pmin = *std::min_element(pv.begin(), pv.end());
  std::vector<double> g(pv.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    g[j] = std::exp(-(pv[j] - pmin) / gamma_noise) * integral.values[j];
  }
  FourierSeries s = FourierSeries::from_samples(g, max_mode);
  s *= kUniformDensity / s[0].real();
  s.set(0, kUniformDensity);
  return s;
}

}  // namespace detail

/// Iper(theta_j) on cfg.quad_points uniform nodes.
inline PeriodicIntegral periodic_integral(const PotentialSpec& pot, const ModelParams& params,
                                          const SelfConsistencyConfig& cfg) {
  cfg.validate();
  const auto pv = pot.periodic.sample(cfg.quad_points);
  return detail::periodic_integral_from_samples(pv, pot.slope, params.gamma_noise, cfg.rule);
}

/// Iper at an arbitrary angle. The spectral rule evaluates the exact
/// exponential integrals of the cfg.quad_points-mode expansion of exp(P/Gamma).
inline double periodic_integral_at(const PotentialSpec& pot, const ModelParams& params, double theta,
                                   const SelfConsistencyConfig& cfg) {
  cfg.validate();
  const int m = cfg.quad_points;
  const double gn = params.gamma_noise;
  if (cfg.rule == QuadratureRule::Trapezoid) {
    const double dt = kTwoPi / m;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double t = i * dt;
      const double w = (i == 0 || i == m) ? 0.5 : 1.0;
      acc += w * std::exp((pot.slope * t + pot.periodic(theta + t)) / gn);
    }
    return acc * dt;
  }
  const auto pv = pot.periodic.sample(m);
  std::vector<cplx> in(pv.size());
  for (std::size_t j = 0; j < pv.size(); ++j) in[j] = std::exp(pv[j] / gn);
  std::vector<cplx> spec;
  detail::fft_engine().fwd(spec, in);
  const double c = -pot.slope / gn;
  const int half = (m - 1) / 2;
  double acc = (spec[0] / static_cast<double>(m) * detail::exp_weight(c, 0)).real();
  for (int n = 1; n <= half; ++n) {
    const cplx term = spec[static_cast<std::size_t>(n)] / static_cast<double>(m) * detail::exp_weight(c, n) *
                      std::polar(1.0, n * theta);
    acc += 2.0 * term.real();
  }
  return acc;
}

/// One application of the self-consistency map T.
inline AngularDensity selfconsistency_map(const AngularDensity& rho, const ModelParams& params,
                                          const SelfConsistencyConfig& cfg) {
  cfg.validate();
  if (cfg.quad_points <= 2 * rho.max_mode()) {
    throw std::invalid_argument("selfconsistency_map: quad_points must exceed 2 * max_mode");
  }
  const PotentialSpec pot = angular_potential(rho, params);
  return AngularDensity(
      detail::stationary_profile(pot.periodic, pot.slope, params.gamma_noise, cfg, rho.max_mode()));
}

struct StationaryResult {
  AngularDensity density;
  int iterations = 0;
  double residual = 0.0;
  double final_damping = 1.0;
};

/// Damped Picard iteration rho <- (1 - d) rho + d T rho until the L1 change
/// drops below cfg.tol. The damping falls to 0.5 after two successive
/// increases of the residual.
inline StationaryResult solve_stationary_homogeneous(const ModelParams& params, const SelfConsistencyConfig& cfg,
                                                     const AngularDensity& init) {
  cfg.validate();
  AngularDensity rho = init;
  double damping = cfg.damping;
  double prev = std::numeric_limits<double>::infinity();
  double prev2 = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const AngularDensity mapped = selfconsistency_map(rho, params, cfg);
    AngularDensity next = damping == 1.0 ? mapped : rho.mixed(mapped, damping);
    residual = l1_distance(next, rho, cfg.quad_points);
    rho = std::move(next);
    if (residual < cfg.tol) return {rho, it, residual, damping};
    if (residual > prev && prev > prev2) damping = std::min(damping, 0.5);
    prev2 = prev;
    prev = residual;
  }
  throw NonConvergenceError<AngularDensity>(rho, cfg.max_iter, residual,
                                            "self-consistency iteration did not converge (residual " +
                                                std::to_string(residual) + ")");
}

/// -d(b rho) + Gamma d^2 rho in Fourier space, restricted to the modes the
/// truncation does not contaminate (|m| <= N - n).
inline FourierSeries stationarity_residual(const AngularDensity& rho, const ModelParams& params) {
  const int n = params.potential_degree();
  const int keep = rho.max_mode() - n;
  if (keep < 1) throw std::invalid_argument("stationarity_residual: max_mode too small");
  const FourierSeries b = drift(rho.series(), params);
  FourierSeries flux = b.multiply(rho.series(), keep + 1);
  FourierSeries out(keep);
  for (int m = 1; m <= keep; ++m) {
    const cplx im{0.0, static_cast<double>(m)};
    out.set(m, -im * flux[m] - params.gamma_noise * m * m * rho[m]);
  }
  return out;
}

/// Positive random density exp(sum of low harmonics), normalized. Used for
/// seeded property checks.
template <class Rng>
AngularDensity random_density(Rng& rng, int max_mode, int harmonics = 3, double amplitude = 1.0,
                              int quad_points = 512) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierSeries log_rho(harmonics);
  for (int k = 1; k <= harmonics; ++k) {
    log_rho.set(k, amplitude / k * cplx{normal(rng), normal(rng)} * 0.5);
  }
  auto v = log_rho.sample(quad_points);
  for (double& x : v) x = std::exp(x);
  return AngularDensity::from_samples(v, max_mode);
}

//-----------------------------------------------------------------------------
// Spatial (1D periodic x) stationary states, v0 = 0
//-----------------------------------------------------------------------------

/// Coefficients c(k, n) of rho(x, theta) = sum_{k,n} c(k,n) exp(2 pi i k x) exp(i n theta),
/// |k| <= K, |n| <= N, with c(-k,-n) = conj(c(k,n)) and c(0,0) = 1/(2 pi).
class SpatialAngularDensity {
 public:
  SpatialAngularDensity(int spatial_modes, int max_mode)
      : K_(spatial_modes), N_(max_mode),
        coeffs_(static_cast<std::size_t>((2 * spatial_modes + 1) * (2 * max_mode + 1)), cplx{0.0, 0.0}) {
    if (spatial_modes < 0 || max_mode < 1) throw std::invalid_argument("SpatialAngularDensity: bad mode counts");
    coeffs_[index(0, 0)] = kUniformDensity;
  }

  static SpatialAngularDensity uniform(int spatial_modes, int max_mode) {
    return SpatialAngularDensity(spatial_modes, max_mode);
  }

  /// x-independent density with angular profile rho.
  static SpatialAngularDensity homogeneous(const AngularDensity& rho, int spatial_modes) {
    SpatialAngularDensity s(spatial_modes, rho.max_mode());
    for (int n = 1; n <= rho.max_mode(); ++n) s.set(0, n, rho[n]);
    return s;
  }

  int spatial_modes() const noexcept { return K_; }
  int max_mode() const noexcept { return N_; }

  cplx operator()(int k, int n) const noexcept {
    if (std::abs(k) > K_ || std::abs(n) > N_) return {0.0, 0.0};
    return coeffs_[index(k, n)];
  }

  /// Sets c(k,n) and its mirror c(-k,-n). The (0,0) total-mass mode is fixed.
  void set(int k, int n, cplx v) {
    if (std::abs(k) > K_ || std::abs(n) > N_) throw std::out_of_range("SpatialAngularDensity::set");
    if (k == 0 && n == 0) throw std::invalid_argument("SpatialAngularDensity: the (0,0) mode is fixed");
    coeffs_[index(k, n)] = v;
    coeffs_[index(-k, -n)] = std::conj(v);
  }

  /// Angular slices rho(x_j, .) at nx >= 2K + 1 uniform nodes x_j = j / nx.
  std::vector<FourierSeries> slices(int nx) const {
    if (nx < 2 * K_ + 1) throw std::invalid_argument("SpatialAngularDensity::slices: too few nodes");
    std::vector<FourierSeries> out(static_cast<std::size_t>(nx), FourierSeries(N_));
    std::vector<cplx> spec(static_cast<std::size_t>(nx));
    std::vector<cplx> vals;
    for (int n = 0; n <= N_; ++n) {
      std::fill(spec.begin(), spec.end(), cplx{0.0, 0.0});
      for (int k = -K_; k <= K_; ++k) spec[static_cast<std::size_t>(detail::fft_slot(k, nx))] = (*this)(k, n);
      detail::fft_engine().inv(vals, spec);
      for (int j = 0; j < nx; ++j) out[static_cast<std::size_t>(j)].set(n, vals[static_cast<std::size_t>(j)] * static_cast<double>(nx));
    }
    return out;
  }

  /// Inverse of slices(); requires slices.size() >= 2K + 1.
  static SpatialAngularDensity from_slices(std::span<const FourierSeries> slices, int spatial_modes) {
    const int nx = static_cast<int>(slices.size());
    if (nx < 2 * spatial_modes + 1) throw std::invalid_argument("from_slices: too few slices");
    const int N = slices.front().max_mode();
    SpatialAngularDensity s(spatial_modes, N);
    std::vector<cplx> vals(static_cast<std::size_t>(nx));
    std::vector<cplx> spec;
    for (int n = 0; n <= N; ++n) {
      for (int j = 0; j < nx; ++j) vals[static_cast<std::size_t>(j)] = slices[static_cast<std::size_t>(j)][n];
      detail::fft_engine().fwd(spec, vals);
      for (int k = -spatial_modes; k <= spatial_modes; ++k) {
        if (n == 0 && k <= 0) continue;
        s.set(k, n, spec[static_cast<std::size_t>(detail::fft_slot(k, nx))] / static_cast<double>(nx));
      }
    }
    return s;
  }

  /// max_{k != 0} |c(k, 0)|: zero when every x slice carries unit angular mass.
  double local_mass_defect() const {
    double d = 0.0;
    for (int k = 1; k <= K_; ++k) d = std::max(d, std::abs((*this)(k, 0)));
    return d;
  }

  /// sup over spatial modes k != 0 of |c(k, n)|.
  double spatial_inhomogeneity() const {
    double d = 0.0;
    for (int k = 1; k <= K_; ++k)
      for (int n = -N_; n <= N_; ++n) d = std::max(d, std::abs((*this)(k, n)));
    return d;
  }

  /// The k = 0 slice as an angular density.
  AngularDensity spatial_mean() const {
    FourierSeries s(N_);
    for (int n = 0; n <= N_; ++n) s.set(n, (*this)(0, n));
    return AngularDensity(std::move(s));
  }

  SpatialAngularDensity mixed(const SpatialAngularDensity& other, double w) const {
    SpatialAngularDensity out(*this);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = (1.0 - w) * coeffs_[i] + w * other.coeffs_[i];
    out.coeffs_[index(0, 0)] = kUniformDensity;
    return out;
  }

 private:
  std::size_t index(int k, int n) const noexcept {
    return static_cast<std::size_t>((k + K_) * (2 * N_ + 1) + (n + N_));
  }

  int K_;
  int N_;
  std::vector<cplx> coeffs_;
};

/// Fourier multipliers W(q), q = 0..K, of the 1D interval kernel of half-width R,
/// scaled so that W(0) = kappa0: W(q) = kappa0 sin(2 pi q R) / (2 pi q R).
inline std::vector<double> top_hat_kernel(const ModelParams& params, int spatial_modes) {
  std::vector<double> w(static_cast<std::size_t>(spatial_modes) + 1);
  w[0] = params.kappa0;
  for (int q = 1; q <= spatial_modes; ++q) {
    const double z = kTwoPi * q * params.radius;
    w[static_cast<std::size_t>(q)] = params.kappa0 * std::sin(z) / z;
  }
  return w;
}

struct SpatialStationaryResult {
  SpatialAngularDensity density;
  int iterations = 0;
  double residual = 0.0;
};

/// Pointwise-in-x self-consistency for v0 = 0. Each x node sees the potential
/// built from the kernel-convolved moments C_k(x), S_k(x); the L1 residual is
/// the supremum over nodes. Nodes are processed independently.
inline SpatialStationaryResult solve_stationary_spatial(const ModelParams& params,
                                                        std::span<const double> kernel_profile,
                                                        const SelfConsistencyConfig& cfg,
                                                        const SpatialAngularDensity& init) {
  cfg.validate();
  if (params.speed != 0.0) {
    throw std::invalid_argument("solve_stationary_spatial requires speed = 0 (transport term absent)");
  }
  const int K = init.spatial_modes();
  const int N = init.max_mode();
  const int n = params.potential_degree();
  detail::check_potential_fits(params, N);
  if (static_cast<int>(kernel_profile.size()) < K + 1) {
    throw std::invalid_argument("kernel_profile must provide W(q) for q = 0..K");
  }
  if (cfg.quad_points <= 2 * N) throw std::invalid_argument("quad_points must exceed 2 * max_mode");
  const int nx = 2 * K + 1;
  const auto xs = uniform_grid(nx, 1.0);

  SpatialAngularDensity rho = init;
  double damping = cfg.damping;
  double prev = std::numeric_limits<double>::infinity();
  double prev2 = prev;
  double residual = prev;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto old_slices = rho.slices(nx);
    std::vector<FourierSeries> new_slices(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) {
      FourierSeries periodic(std::max(n, 1));
      periodic.set(1, cplx{-0.5 * params.field, 0.0});
      for (int k = 1; k <= n; ++k) {
        // C_k + i S_k = sum_q W(q) 2 pi c(q, -k) exp(2 pi i q x)
        cplx conv{0.0, 0.0};
        for (int q = -K; q <= K; ++q) {
          conv += kernel_profile[static_cast<std::size_t>(std::abs(q))] * kTwoPi * rho(q, -k) *
                  std::polar(1.0, kTwoPi * q * xs[static_cast<std::size_t>(j)]);
        }
        const double a = params.potential[static_cast<std::size_t>(k - 1)];
        periodic.set(k, periodic[k] - 0.5 * params.coupling * a * std::conj(conv));
      }
      new_slices[static_cast<std::size_t>(j)] =
          detail::stationary_profile(periodic, -params.tilt, params.gamma_noise, cfg, N);
    }
    SpatialAngularDensity mapped = SpatialAngularDensity::from_slices(new_slices, K);
    SpatialAngularDensity next = damping == 1.0 ? mapped : rho.mixed(mapped, damping);
    const auto next_slices = next.slices(nx);
    residual = 0.0;
    for (int j = 0; j < nx; ++j) {
      const auto a = next_slices[static_cast<std::size_t>(j)].sample(cfg.quad_points);
      const auto b = old_slices[static_cast<std::size_t>(j)].sample(cfg.quad_points);
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      residual = std::max(residual, s * kTwoPi / cfg.quad_points);
    }
    rho = std::move(next);
    if (residual < cfg.tol) return {rho, it, residual};
    if (residual > prev && prev > prev2) damping = std::min(damping, 0.5);
    prev2 = prev;
    prev = residual;
  }
  throw NonConvergenceError<SpatialAngularDensity>(rho, cfg.max_iter, residual,
                                                   "spatial self-consistency iteration did not converge");
}

}  // namespace kvsync

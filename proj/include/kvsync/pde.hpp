#pragma once

//=============================================================================
// Spectral time integration of
//
//   d_t rho = -v0 cos(theta) d_x rho - d_theta([F - h sin - gamma I[rho]] rho) + Gamma d_theta^2 rho
//
// (a) angular only: Galerkin in theta; the products with the low-degree drift
//     are formed exactly on the coefficients, so no aliasing arises.
// (b) periodic x in [0, 1] times theta: pseudospectral products on an
//     n_x x n_theta grid with optional 2/3 dealiasing; transport is applied
//     exactly in coefficient space.
//
// Both use an integrating-factor RK4 (Lawson) step with the diagonal part
// L = -Gamma n^2 - i n F treated exactly.
//=============================================================================

#include "kvsync/errors.hpp"
#include "kvsync/model.hpp"
#include "kvsync/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace kvsync {

struct EvolveConfig {
  int n_theta = 60;
  int n_x = 40;
  double dt = 1e-3;
  double t_max = 300.0;
  double steady_tol = 1e-9;  // <= 0 disables the early exit
  bool dealias = true;
  double record_every = 1.0;
  bool record_states = false;

  void validate() const {
    if (n_theta < 8 || n_theta % 2 != 0) throw std::invalid_argument("n_theta must be an even integer >= 8");
    if (n_x < 4 || n_x % 2 != 0) throw std::invalid_argument("n_x must be an even integer >= 4");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    if (!(record_every > 0.0)) throw std::invalid_argument("record_every must be > 0");
  }
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<double> order_params;
  std::vector<State> states;  // filled when cfg.record_states
  State final_state;
  double final_time = 0.0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();  // last L1 change per unit time
  double max_mass_error = 0.0;
  long steps = 0;
};

//-----------------------------------------------------------------------------
// Order parameter and initial data
//-----------------------------------------------------------------------------

inline double order_parameter(const AngularDensity& rho) { return kTwoPi * std::abs(rho[1]); }

/// Mean over x of the local first-moment magnitude |int e^{i theta} rho(x, theta) d theta|.
inline double order_parameter(const SpatialAngularDensity& rho) {
  const int K = rho.spatial_modes();
  const int nx = std::max(2 * K + 1, 8);
  double acc = 0.0;
  for (double xj : uniform_grid(nx, 1.0)) {
    cplx c1{0.0, 0.0};
    for (int q = -K; q <= K; ++q) c1 += rho(q, 1) * std::polar(1.0, kTwoPi * q * xj);
    acc += kTwoPi * std::abs(c1);
  }
  return acc / nx;
}

/// rho(theta, 0) proportional to sin(theta) + 2.
inline AngularDensity sine_bump_density(int max_mode) {
  AngularDensity u = AngularDensity::uniform(max_mode);
  FourierSeries s = u.series();
  s.set(1, cplx{0.0, -1.0 / (8.0 * kPi)});
  return AngularDensity(std::move(s));
}

/// rho(x, theta, 0) proportional to cos(theta) sin(2 pi x) + 2.
inline SpatialAngularDensity cosine_wave_density(int spatial_modes, int max_mode) {
  SpatialAngularDensity s(spatial_modes, max_mode);
  if (spatial_modes >= 1) {
    const cplx v{0.0, -1.0 / (16.0 * kPi)};
    s.set(1, 1, v);
    s.set(1, -1, v);
  }
  return s;
}

//-----------------------------------------------------------------------------
// Angular evolution
//-----------------------------------------------------------------------------

namespace detail {

// Coefficients c_0..c_N of a real function, with c_{-n} = conj(c_n).
using HalfSpectrum = std::vector<cplx>;

inline cplx half_at(const HalfSpectrum& c, int n) {
  const int N = static_cast<int>(c.size()) - 1;
  if (std::abs(n) > N) return {0.0, 0.0};
  return n >= 0 ? c[static_cast<std::size_t>(n)] : std::conj(c[static_cast<std::size_t>(-n)]);
}

// i n ((h sin + gamma I[rho]) rho)_n, n = 0..N, with the exact banded product.
inline HalfSpectrum angular_nonlinear(const HalfSpectrum& c, const ModelParams& p) {
  const int N = static_cast<int>(c.size()) - 1;
  const int deg = std::max(1, p.potential_degree());
  std::vector<cplx> g(static_cast<std::size_t>(deg) + 1, cplx{0.0, 0.0});  // g_0..g_deg
  g[1] += p.field * cplx{0.0, -0.5};                                       // h sin
  for (int k = 1; k <= p.potential_degree(); ++k) {
    const double w = p.kappa0 * k * p.potential[static_cast<std::size_t>(k - 1)];
    g[static_cast<std::size_t>(k)] += p.coupling * cplx{0.0, -kPi * w} * c[static_cast<std::size_t>(k)];
  }
  auto gat = [&](int j) -> cplx {
    if (std::abs(j) > deg) return {0.0, 0.0};
    return j >= 0 ? g[static_cast<std::size_t>(j)] : std::conj(g[static_cast<std::size_t>(-j)]);
  };
  HalfSpectrum out(c.size(), cplx{0.0, 0.0});
  for (int n = 1; n <= N; ++n) {
    cplx acc{0.0, 0.0};
    for (int j = -deg; j <= deg; ++j) acc += gat(j) * half_at(c, n - j);
    out[static_cast<std::size_t>(n)] = cplx{0.0, static_cast<double>(n)} * acc;
  }
  return out;
}

inline double half_l1(const HalfSpectrum& a, const HalfSpectrum& b, int m) {
  FourierSeries d(static_cast<int>(a.size()) - 1);
  for (std::size_t n = 0; n < a.size(); ++n) d.set(static_cast<int>(n), a[n] - b[n]);
  const auto v = d.sample(m);
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s * kTwoPi / m;
}

inline AngularDensity to_density(const HalfSpectrum& c) {
  FourierSeries s(static_cast<int>(c.size()) - 1);
  for (std::size_t n = 0; n < c.size(); ++n) s.set(static_cast<int>(n), c[n]);
  return AngularDensity(std::move(s));
}

inline void check_finite(const std::vector<cplx>& c, double t) {
  for (const auto& v : c) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw BlowUpError("blow_up", t, "non-finite state at t = " + std::to_string(t));
    }
  }
}

}  // namespace detail

/// Angular-only evolution with N = n_theta/2 - 1 retained modes.
inline Trajectory<AngularDensity> evolve_angular(const ModelParams& params, const AngularDensity& init,
                                                 const EvolveConfig& cfg) {
  cfg.validate();
  detail::check_potential_fits(params, cfg.n_theta / 2 - 1);
  const int N = cfg.n_theta / 2 - 1;
  const double dt = cfg.dt;
  const int m_l1 = std::max(4 * N + 4, 256);

  detail::HalfSpectrum c(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) c[static_cast<std::size_t>(n)] = init[n];
  c[0] = kUniformDensity;

  std::vector<cplx> E(c.size()), E2(c.size());
  for (int n = 0; n <= N; ++n) {
    const cplx L{-params.gamma_noise * n * n, -static_cast<double>(n) * params.tilt};
    E[static_cast<std::size_t>(n)] = std::exp(L * dt);
    E2[static_cast<std::size_t>(n)] = std::exp(L * (0.5 * dt));
  }

  const long total = std::max(1L, std::lround(cfg.t_max / dt));
  const long per_record = std::max(1L, std::lround(cfg.record_every / dt));

  Trajectory<AngularDensity> tr{{}, {}, {}, init.resized(N), 0.0, false,
                                std::numeric_limits<double>::infinity(), 0.0, 0};
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.order_params.push_back(kTwoPi * std::abs(c[1]));
    if (cfg.record_states) tr.states.push_back(detail::to_density(c));
    tr.max_mass_error = std::max(tr.max_mass_error, std::abs(c[0].real() - kUniformDensity));
  };
  record(0.0);

  detail::HalfSpectrum snapshot = c;
  detail::HalfSpectrum tmp(c.size());
  const std::size_t sz = c.size();
  long step = 0;
  for (step = 1; step <= total; ++step) {
    const auto k1 = detail::angular_nonlinear(c, params);
    for (std::size_t n = 0; n < sz; ++n) tmp[n] = E2[n] * (c[n] + 0.5 * dt * k1[n]);
    const auto k2 = detail::angular_nonlinear(tmp, params);
    for (std::size_t n = 0; n < sz; ++n) tmp[n] = E2[n] * c[n] + 0.5 * dt * k2[n];
    const auto k3 = detail::angular_nonlinear(tmp, params);
    for (std::size_t n = 0; n < sz; ++n) tmp[n] = E[n] * c[n] + dt * E2[n] * k3[n];
    const auto k4 = detail::angular_nonlinear(tmp, params);
    for (std::size_t n = 1; n < sz; ++n) {
      c[n] = E[n] * c[n] + dt / 6.0 * (E[n] * k1[n] + 2.0 * E2[n] * (k2[n] + k3[n]) + k4[n]);
    }
    if (step % per_record == 0 || step == total) {
      const double t = step * dt;
      detail::check_finite(c, t);
      record(t);
      if (step % per_record == 0) {
        const double elapsed = per_record * dt;
        tr.residual = detail::half_l1(c, snapshot, m_l1) / elapsed;
        snapshot = c;
        if (cfg.steady_tol > 0.0 && tr.residual < cfg.steady_tol) {
          tr.converged = true;
          break;
        }
      }
    }
  }
  tr.steps = std::min(step, total);
  tr.final_time = tr.steps * dt;
  tr.final_state = detail::to_density(c);
  return tr;
}

//-----------------------------------------------------------------------------
// Spatial (1D x) evolution
//-----------------------------------------------------------------------------

namespace detail {

// Row-major n_x x n_theta complex array; spectral arrays are in FFT order in
// both indices (q along rows, n along columns).
class Grid2 {
 public:
  Grid2(int nx, int nt) : nx_(nx), nt_(nt), data_(static_cast<std::size_t>(nx * nt), cplx{0.0, 0.0}) {}
  int nx() const noexcept { return nx_; }
  int nt() const noexcept { return nt_; }
  cplx& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * nt_ + j)]; }
  cplx operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * nt_ + j)]; }
  std::vector<cplx>& raw() noexcept { return data_; }
  const std::vector<cplx>& raw() const noexcept { return data_; }

 private:
  int nx_, nt_;
  std::vector<cplx> data_;
};

// Unnormalized 2D DFT (forward) or inverse including 1/(nx nt) (inverse = false
// gives forward / (nx nt), so coefficients equal the Fourier coefficients).
inline void fft2(Grid2& g, bool to_physical) {
  auto& eng = fft_engine();
  const int nx = g.nx();
  const int nt = g.nt();
  std::vector<cplx> in, out;
  in.resize(static_cast<std::size_t>(nt));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nt; ++j) in[static_cast<std::size_t>(j)] = g(i, j);
    if (to_physical) {
      eng.inv(out, in);
      for (int j = 0; j < nt; ++j) g(i, j) = out[static_cast<std::size_t>(j)] * static_cast<double>(nt);
    } else {
      eng.fwd(out, in);
      for (int j = 0; j < nt; ++j) g(i, j) = out[static_cast<std::size_t>(j)] / static_cast<double>(nt);
    }
  }
  in.resize(static_cast<std::size_t>(nx));
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < nx; ++i) in[static_cast<std::size_t>(i)] = g(i, j);
    if (to_physical) {
      eng.inv(out, in);
      for (int i = 0; i < nx; ++i) g(i, j) = out[static_cast<std::size_t>(i)] * static_cast<double>(nx);
    } else {
      eng.fwd(out, in);
      for (int i = 0; i < nx; ++i) g(i, j) = out[static_cast<std::size_t>(i)] / static_cast<double>(nx);
    }
  }
}

inline int signed_mode(int slot, int m) { return slot <= m / 2 ? slot : slot - m; }

struct SpatialWorkspace {
  int nx, nt;
  std::vector<double> kernel;      // W(q) by x-slot
  std::vector<unsigned char> keep;  // dealias mask by (i, j)
};

inline SpatialWorkspace make_workspace(const ModelParams& p, const EvolveConfig& cfg) {
  SpatialWorkspace ws{cfg.n_x, cfg.n_theta, {}, {}};
  ws.kernel.resize(static_cast<std::size_t>(cfg.n_x));
  for (int i = 0; i < cfg.n_x; ++i) {
    const int q = signed_mode(i, cfg.n_x);
    const double z = kTwoPi * q * p.radius;
    ws.kernel[static_cast<std::size_t>(i)] = q == 0 ? 2.0 * p.radius : 2.0 * p.radius * std::sin(z) / z;
  }
  ws.keep.assign(static_cast<std::size_t>(cfg.n_x * cfg.n_theta), 1);
  for (int i = 0; i < cfg.n_x; ++i) {
    for (int j = 0; j < cfg.n_theta; ++j) {
      const int q = signed_mode(i, cfg.n_x);
      const int n = signed_mode(j, cfg.n_theta);
      bool k = std::abs(q) < cfg.n_x / 2 && std::abs(n) < cfg.n_theta / 2;  // Nyquist always dropped
      if (cfg.dealias) k = k && 3 * std::abs(q) <= cfg.n_x && 3 * std::abs(n) <= cfg.n_theta;
      ws.keep[static_cast<std::size_t>(i * cfg.n_theta + j)] = k ? 1 : 0;
    }
  }
  return ws;
}

inline Grid2 spatial_rhs(const Grid2& C, const ModelParams& p, const SpatialWorkspace& ws, double t) {
  const int nx = ws.nx;
  const int nt = ws.nt;
  Grid2 rho = C;
  fft2(rho, true);

  // Numerator J(x, theta) = sum_k k a_k (W * int sin(k(theta - theta')) rho dtheta').
  Grid2 J(nx, nt);
  for (int k = 1; k <= p.potential_degree(); ++k) {
    if (2 * k >= nt) break;
    const double w = k * p.potential[static_cast<std::size_t>(k - 1)];
    for (int i = 0; i < nx; ++i) {
      const double W = ws.kernel[static_cast<std::size_t>(i)];
      J(i, k) = W * cplx{0.0, -kPi * w} * C(i, k);
      J(i, nt - k) = W * cplx{0.0, kPi * w} * C(i, nt - k);
    }
  }
  fft2(J, true);

  Grid2 D(nx, nt);
  bool has_denominator = true;
  switch (p.variant) {
    case NormalizationVariant::Unnormalised: has_denominator = false; break;
    case NormalizationVariant::FullyNormalised:
      for (int i = 0; i < nx; ++i) D(i, 0) = ws.kernel[static_cast<std::size_t>(i)] * kTwoPi * C(i, 0);
      break;
    case NormalizationVariant::PartialTheta:
      for (int i = 0; i < nx; ++i) D(i, 0) = kTwoPi * C(i, 0);
      break;
    case NormalizationVariant::PartialX:
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j) D(i, j) = ws.kernel[static_cast<std::size_t>(i)] * C(i, j);
      break;
  }
  if (has_denominator) fft2(D, true);

  Grid2 prod(nx, nt);
  const auto thetas = uniform_grid(nt);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nt; ++j) {
      double interaction = J(i, j).real();
      if (has_denominator) {
        const double d = D(i, j).real();
        if (!(d > 1e-8)) {
          throw BlowUpError("division_guard", t,
                            "normalization denominator fell below 1e-8 at t = " + std::to_string(t));
        }
        interaction /= d;
      }
      const double g = p.field * std::sin(thetas[static_cast<std::size_t>(j)]) + p.coupling * interaction;
      prod(i, j) = g * rho(i, j).real();
    }
  }
  fft2(prod, false);

  Grid2 out(nx, nt);
  for (int i = 0; i < nx; ++i) {
    const double q = signed_mode(i, nx);
    const cplx transport = -p.speed * cplx{0.0, kTwoPi * q} * 0.5;
    for (int j = 0; j < nt; ++j) {
      if (!ws.keep[static_cast<std::size_t>(i * nt + j)]) continue;
      const int n = signed_mode(j, nt);
      cplx v = cplx{0.0, static_cast<double>(n)} * prod(i, j);
      if (q != 0 && p.speed != 0.0) {
        cplx nb{0.0, 0.0};
        if (std::abs(n - 1) < nt / 2) nb += C(i, fft_slot(n - 1, nt));
        if (std::abs(n + 1) < nt / 2) nb += C(i, fft_slot(n + 1, nt));
        v += transport * nb;
      }
      out(i, j) = v;
    }
  }
  return out;
}

inline double grid_l1(const Grid2& a, const Grid2& b) {
  Grid2 d = a;
  for (std::size_t s = 0; s < d.raw().size(); ++s) d.raw()[s] -= b.raw()[s];
  fft2(d, true);
  double acc = 0.0;
  for (const auto& v : d.raw()) acc += std::abs(v.real());
  return acc * kTwoPi / static_cast<double>(d.raw().size());
}

inline SpatialAngularDensity to_spatial_density(const Grid2& C) {
  const int K = C.nx() / 2 - 1;
  const int N = C.nt() / 2 - 1;
  SpatialAngularDensity s(K, N);
  for (int q = -K; q <= K; ++q) {
    for (int n = 0; n <= N; ++n) {
      if (n == 0 && q <= 0) continue;
      s.set(q, n, C(fft_slot(q, C.nx()), fft_slot(n, C.nt())));
    }
  }
  return s;
}

inline double spatial_order(const Grid2& C) {
  const int nx = C.nx();
  std::vector<cplx> col(static_cast<std::size_t>(nx)), vals;
  for (int i = 0; i < nx; ++i) col[static_cast<std::size_t>(i)] = C(i, 1);
  fft_engine().inv(vals, col);
  double acc = 0.0;
  for (const auto& v : vals) acc += kTwoPi * std::abs(v * static_cast<double>(nx));
  return acc / nx;
}

}  // namespace detail

/// 1D-space x angle evolution on an n_x x n_theta grid; the interaction uses
/// the interval kernel of half-width R (mass 2R) and the variant's denominator.
inline Trajectory<SpatialAngularDensity> evolve_spatial(const ModelParams& params, const SpatialAngularDensity& init,
                                                        const EvolveConfig& cfg) {
  cfg.validate();
  const int nx = cfg.n_x;
  const int nt = cfg.n_theta;
  const double dt = cfg.dt;
  const auto ws = detail::make_workspace(params, cfg);

  detail::Grid2 C(nx, nt);
  const int K = std::min(init.spatial_modes(), nx / 2 - 1);
  const int N = std::min(init.max_mode(), nt / 2 - 1);
  for (int q = -K; q <= K; ++q)
    for (int n = -N; n <= N; ++n) C(detail::fft_slot(q, nx), detail::fft_slot(n, nt)) = init(q, n);

  std::vector<cplx> E(static_cast<std::size_t>(nt)), E2(static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) {
    const int n = detail::signed_mode(j, nt);
    const cplx L{-params.gamma_noise * n * n, -static_cast<double>(n) * params.tilt};
    E[static_cast<std::size_t>(j)] = std::exp(L * dt);
    E2[static_cast<std::size_t>(j)] = std::exp(L * (0.5 * dt));
  }

  const long total = std::max(1L, std::lround(cfg.t_max / dt));
  const long per_record = std::max(1L, std::lround(cfg.record_every / dt));
  const cplx c00 = C(0, 0);

  Trajectory<SpatialAngularDensity> tr{{}, {}, {}, SpatialAngularDensity(nx / 2 - 1, nt / 2 - 1), 0.0, false,
                                       std::numeric_limits<double>::infinity(), 0.0, 0};
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.order_params.push_back(detail::spatial_order(C));
    if (cfg.record_states) tr.states.push_back(detail::to_spatial_density(C));
    tr.max_mass_error = std::max(tr.max_mass_error, std::abs(C(0, 0) - c00));
  };
  record(0.0);

  detail::Grid2 snapshot = C;
  detail::Grid2 tmp(nx, nt);
  auto apply = [&](auto&& f) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nt; ++j) f(i, j);
  };
  long step = 0;
  for (step = 1; step <= total; ++step) {
    const double t0 = (step - 1) * dt;
    const auto k1 = detail::spatial_rhs(C, params, ws, t0);
    apply([&](int i, int j) { tmp(i, j) = E2[static_cast<std::size_t>(j)] * (C(i, j) + 0.5 * dt * k1(i, j)); });
    const auto k2 = detail::spatial_rhs(tmp, params, ws, t0);
    apply([&](int i, int j) { tmp(i, j) = E2[static_cast<std::size_t>(j)] * C(i, j) + 0.5 * dt * k2(i, j); });
    const auto k3 = detail::spatial_rhs(tmp, params, ws, t0);
    apply([&](int i, int j) {
      tmp(i, j) = E[static_cast<std::size_t>(j)] * C(i, j) + dt * E2[static_cast<std::size_t>(j)] * k3(i, j);
    });
    const auto k4 = detail::spatial_rhs(tmp, params, ws, t0);
    apply([&](int i, int j) {
      const auto e = E[static_cast<std::size_t>(j)];
      const auto e2 = E2[static_cast<std::size_t>(j)];
      C(i, j) = e * C(i, j) + dt / 6.0 * (e * k1(i, j) + 2.0 * e2 * (k2(i, j) + k3(i, j)) + k4(i, j));
    });
    if (step % per_record == 0 || step == total) {
      const double t = step * dt;
      detail::check_finite(C.raw(), t);
      record(t);
      if (step % per_record == 0) {
        tr.residual = detail::grid_l1(C, snapshot) / (per_record * dt);
        snapshot = C;
        if (cfg.steady_tol > 0.0 && tr.residual < cfg.steady_tol) {
          tr.converged = true;
          break;
        }
      }
    }
  }
  tr.steps = std::min(step, total);
  tr.final_time = tr.steps * dt;
  tr.final_state = detail::to_spatial_density(C);
  return tr;
}

}  // namespace kvsync

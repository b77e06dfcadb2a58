#pragma once

//=============================================================================
// Fourier-Galerkin matrix of the operator linearized about
// rho_h = 1/(2 pi) + h rho1:
//
//   L_h eta = -d(q_h eta) + gamma d(rho_h I[eta]) + Gamma d^2 eta,
//   q_h     = F - h sin(theta) - gamma I[rho_h],
//
// on the modes n in {-N..N} \ {0}. Every multiplier is a first harmonic, so
// entries follow from exact product rules:
//
//   M[m][n] += -i m q_{m-n}                      (|m - n| <= 1)
//   M[m][s] += i m gamma r_{m-s} iota_s          (s = +-1, iota_{+-1} = -+ i pi W)
//   M[m][m] += -Gamma m^2
//
// with r_0 = 1/(2 pi), r_{+-1} = h c_{+-1}. The spatial extension adds the
// transport coupling -(i v0 / 2)[(k1 - i k2) eta_{m-1} + (k1 + i k2) eta_{m+1}]
// and uses the kernel multiplier W(k) in place of kappa0 inside I.
//=============================================================================

#include "kvsync/errors.hpp"
#include "kvsync/kato.hpp"
#include "kvsync/model.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

namespace kvsync {

struct GalerkinOperator {
  int max_mode = 32;
  Eigen::MatrixXcd entries;
  ModelParams params_snapshot;
  double h = 0.0;
  std::optional<std::array<double, 2>> spatial_k;

  /// Row/column of angular mode n (n != 0).
  static int index_of(int n, int max_mode) {
    if (n == 0 || std::abs(n) > max_mode) throw std::out_of_range("GalerkinOperator: mode outside {-N..N}\\{0}");
    return n < 0 ? n + max_mode : n + max_mode - 1;
  }
  static int mode_of(int index, int max_mode) { return index < max_mode ? index - max_mode : index - max_mode + 1; }

  cplx entry(int row_mode, int col_mode) const {
    return entries(index_of(row_mode, max_mode), index_of(col_mode, max_mode));
  }

  int size() const noexcept { return 2 * max_mode; }
};

namespace detail {

inline void add_entry(Eigen::MatrixXcd& m, int row, int col, int N, cplx v) {
  if (row == 0 || col == 0 || std::abs(row) > N || std::abs(col) > N) return;
  m(GalerkinOperator::index_of(row, N), GalerkinOperator::index_of(col, N)) += v;
}

// Shared assembly; `kernel_weight` is the multiplier inside I[eta].
inline Eigen::MatrixXcd assemble_core(const ModelParams& params, double h, int N, double kernel_weight) {
  const int dim = 2 * N;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx i{0.0, 1.0};
  const double gamma = params.coupling;

  cplx q1{0.0, 0.0};
  cplx c1{0.0, 0.0};
  if (h != 0.0) {
    q1 = h * drift_first_harmonic(params);
    c1 = h * rho1_coefficient(params.alpha(), params.tilt);
  }
  auto q = [&](int j) -> cplx {
    if (j == 0) return {params.tilt, 0.0};
    if (j == 1) return q1;
    if (j == -1) return std::conj(q1);
    return {0.0, 0.0};
  };
  auto r = [&](int j) -> cplx {
    if (j == 0) return {kUniformDensity, 0.0};
    if (j == 1) return c1;
    if (j == -1) return std::conj(c1);
    return {0.0, 0.0};
  };

  for (int row = -N; row <= N; ++row) {
    if (row == 0) continue;
    const double rm = static_cast<double>(row);
    add_entry(m, row, row, N, cplx{-params.gamma_noise * rm * rm, 0.0});
    for (int d = -1; d <= 1; ++d) {
      const cplx qv = q(d);
      if (qv != cplx{0.0, 0.0}) add_entry(m, row, row - d, N, -i * rm * qv);
    }
  }
  for (int s : {-1, 1}) {
    const cplx iota{0.0, -static_cast<double>(s) * kPi * kernel_weight};
    for (int row = s - 1; row <= s + 1; ++row) {
      if (row == 0) continue;
      const cplx rv = r(row - s);
      if (rv != cplx{0.0, 0.0}) add_entry(m, row, s, N, i * static_cast<double>(row) * gamma * rv * iota);
    }
  }
  return m;
}

}  // namespace detail

/// M_h for the homogeneous problem; needs N >= 4.
inline GalerkinOperator assemble_Mh(const ModelParams& params, double h, int N = 32) {
  if (N < 4) throw std::invalid_argument("assemble_Mh: N must be >= 4");
  GalerkinOperator op;
  op.max_mode = N;
  op.entries = detail::assemble_core(params, h, N, params.kappa0);
  op.params_snapshot = params;
  op.h = h;
  return op;
}

/// Transport coupling alone: -i v0 (k1 cos + k2 sin) on the retained modes.
inline Eigen::MatrixXcd transport_block(double speed, const std::array<double, 2>& k, int N) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  const cplx i{0.0, 1.0};
  const cplx down = -0.5 * i * speed * cplx{k[0], -k[1]};  // from eta_{m-1}
  const cplx up = -0.5 * i * speed * cplx{k[0], k[1]};     // from eta_{m+1}
  for (int row = -N; row <= N; ++row) {
    if (row == 0) continue;
    detail::add_entry(t, row, row - 1, N, down);
    detail::add_entry(t, row, row + 1, N, up);
  }
  return t;
}

/// L_h(k): kernel multiplier W(k) inside I and transport along k. With k = 0
/// and W = kappa0 it is identical to assemble_Mh.
inline GalerkinOperator assemble_Mh_spatial(const ModelParams& params, double h, const std::array<double, 2>& k,
                                            double kernel_hat, int N = 32) {
  if (N < 4) throw std::invalid_argument("assemble_Mh_spatial: N must be >= 4");
  if (std::abs(kernel_hat) > params.kappa0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("assemble_Mh_spatial: |W(k)| must not exceed kappa0");
  }
  GalerkinOperator op;
  op.max_mode = N;
  op.entries = detail::assemble_core(params, h, N, kernel_hat);
  if (params.speed != 0.0 && (k[0] != 0.0 || k[1] != 0.0)) op.entries += transport_block(params.speed, k, N);
  op.params_snapshot = params;
  op.h = h;
  op.spatial_k = k;
  return op;
}

inline Eigen::VectorXcd eigenvalues(const GalerkinOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.entries, false);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError(op.h, "eigenvalue computation failed at h = " + std::to_string(op.h));
  }
  return solver.eigenvalues();
}

inline double max_real_eigenvalue(const GalerkinOperator& op) {
  const auto ev = eigenvalues(op);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::max(best, ev[j].real());
  return best;
}

struct NearestEigenvalue {
  cplx value{};
  bool tie = false;
};

/// Eigenvalue closest to `target`; among equidistant candidates (relative
/// 1e-12) the one with larger real part wins and `tie` is set.
inline NearestEigenvalue nearest_eigenvalue(const Eigen::VectorXcd& ev, cplx target) {
  NearestEigenvalue best;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    const double d = std::abs(ev[j] - target);
    if (!std::isfinite(best_d)) {
      best = {ev[j], false};
      best_d = d;
      continue;
    }
    const double slack = 1e-12 * std::max(1.0, best_d);
    if (d < best_d - slack) {
      best = {ev[j], false};
      best_d = d;
    } else if (std::abs(d - best_d) <= slack) {
      best.tie = true;
      if (ev[j].real() > best.value.real()) best.value = ev[j];
    }
  }
  return best;
}

struct EigenBranch {
  std::vector<double> h_grid;
  std::vector<cplx> lambdas;
  cplx start{};
  int max_mode = 32;
  std::vector<double> tie_points;  // h values where the nearest eigenvalue was not unique
};

/// Continues the eigenvalue starting nearest lambda0 = alpha - i F along h_grid.
inline EigenBranch eigen_branch(const ModelParams& params, const std::vector<double>& h_grid, int N = 32) {
  if (h_grid.empty() || h_grid.front() != 0.0) throw std::invalid_argument("eigen_branch: h_grid must start at 0");
  for (std::size_t j = 1; j < h_grid.size(); ++j) {
    if (!(h_grid[j] > h_grid[j - 1])) throw std::invalid_argument("eigen_branch: h_grid must be increasing");
  }
  EigenBranch br;
  br.h_grid = h_grid;
  br.max_mode = N;
  br.start = {params.alpha(), -params.tilt};
  cplx prev = br.start;
  for (double h : h_grid) {
    const auto ev = eigenvalues(assemble_Mh(params, h, N));
    const auto pick = nearest_eigenvalue(ev, prev);
    if (pick.tie) {
      br.tie_points.push_back(h);
      std::clog << "warning: equidistant eigenvalues while tracking the branch at h = " << h << "\n";
    }
    br.lambdas.push_back(pick.value);
    prev = pick.value;
  }
  return br;
}

/// Uniform grid 0, dh, ..., h with dh <= max_step.
inline std::vector<double> continuation_grid(double h, double max_step = 0.01) {
  if (h <= 0.0) return {0.0};
  const int steps = static_cast<int>(std::ceil(h / max_step - 1e-12));
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) g[static_cast<std::size_t>(j)] = h * j / steps;
  g.back() = h;
  return g;
}

/// Re lambda_+(h) at a given coupling, continued from h = 0.
inline double branch_growth_rate(const ModelParams& params, double h, int N = 32) {
  return eigen_branch(params, continuation_grid(h), N).lambdas.back().real();
}

/// gamma_c(h) by bisection on Re lambda_+(h, gamma) = 0 over
/// [1.5 Gamma, 4 Gamma] / kappa0, widened once to [0.5 Gamma, 8 Gamma] / kappa0.
inline ThresholdResult critical_coupling_numeric(double h, const ModelParams& params_base, int N = 32,
                                                 double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("critical_coupling_numeric: tol must be > 0");
  if (!(params_base.tilt > 0.0)) throw SingularParametersError("critical_coupling_numeric: requires tilt F > 0");
  ModelParams p = params_base;
  const double G = p.gamma_noise;
  auto f = [&](double gamma) {
    p.coupling = gamma;
    return branch_growth_rate(p, h, N);
  };
  double lo = 1.5 * G / p.kappa0;
  double hi = 4.0 * G / p.kappa0;
  double flo = f(lo);
  double fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0)) {
    lo = 0.5 * G / p.kappa0;
    hi = 8.0 * G / p.kappa0;
    flo = f(lo);
    fhi = f(hi);
    if ((flo > 0.0) == (fhi > 0.0)) {
      throw BracketError("critical_coupling_numeric: Re lambda does not change sign on the expanded bracket");
    }
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < tol || hi - lo < 1e-15 * hi) break;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {mid, p.variant, p.dimension, ThresholdMethod::Bisection};
}

}  // namespace kvsync

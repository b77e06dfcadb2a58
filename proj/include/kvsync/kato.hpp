#pragma once

//=============================================================================
// Small-h perturbation theory around the uniform state.
//
// Stationary branch: rho_h = 1/(2 pi) + h rho1 + O(h^2), rho1 = A cos + B sin,
// with complex coefficient c1 = (A - i B)/2 = -1 / (4 pi (alpha - i F)).
//
// Eigenvalue of the critical mode: lambda(h) = lambda0 + h^2 lambda2 + O(h^4),
//
//   lambda0 = alpha - i F,
//   a = (F - i(2 Gamma + alpha)) / (F + i alpha)       (e2-component of L1 e1)
//   b = -(F + i Gamma) / (2 (F - i alpha))              (e1-component of L1 e2)
//   lambda2 = -a b / (mu2 - lambda0),  mu2 - lambda0 = -(4 Gamma + alpha + i F).
//
// alpha = gamma kappa0 / 2 - Gamma throughout.
//=============================================================================

#include "kvsync/errors.hpp"
#include "kvsync/linstab.hpp"
#include "kvsync/model.hpp"

#include <cmath>
#include <iostream>

namespace kvsync {

struct PerturbationCoeffs {
  double alpha = 0.0;
  double A = 0.0;
  double B = 0.0;
  cplx c1{};
  cplx a_coeff{};
  cplx b_coeff{};
  cplx lambda0{};
  cplx lambda2{};
};

namespace detail {

inline void require_positive_tilt(double tilt, const char* who) {
  if (!(tilt > 0.0)) throw SingularParametersError(std::string(who) + ": requires tilt F > 0");
}

}  // namespace detail

/// c1 from the O(h) balance (alpha - i F) c1 + 1/(4 pi) = 0.
inline cplx rho1_coefficient(double alpha, double tilt) {
  if (alpha == 0.0 && tilt == 0.0) {
    throw SingularParametersError("rho1: alpha = F = 0, the first-order correction is undefined");
  }
  return -1.0 / (4.0 * kPi * cplx{alpha, -tilt});
}

/// rho1 = A cos(theta) + B sin(theta) as a zero-mass trigonometric polynomial.
inline FourierSeries rho1(const ModelParams& params) {
  FourierSeries s(1);
  s.set(1, rho1_coefficient(params.alpha(), params.tilt));
  return s;
}

/// Uniform + h rho1. Warns on std::clog when h^2 > 0.1 (alpha^2 + F^2).
inline AngularDensity perturbative_state(const ModelParams& params, double h, int max_mode = 1) {
  const double a = params.alpha();
  const double scale = a * a + params.tilt * params.tilt;
  if (h * h > 0.1 * scale) {
    std::clog << "warning: perturbative_state with h^2 = " << h * h << " outside the small-field regime (alpha^2 + F^2 = "
              << scale << ")\n";
  }
  FourierSeries s(std::max(1, max_mode));
  s.set(0, kUniformDensity);
  s.set(1, h * rho1_coefficient(a, params.tilt));
  return AngularDensity(std::move(s));
}

/// First harmonic of the drift q_h = F - h sin - gamma I[rho_h] per unit h.
inline cplx drift_first_harmonic(const ModelParams& params) {
  const cplx c1 = rho1_coefficient(params.alpha(), params.tilt);
  const cplx i{0.0, 1.0};
  return 0.5 * i + i * params.coupling * kPi * params.kappa0 * c1;
}

/// a and b assembled from the Fourier pieces of L1 rather than the final formulas.
inline std::pair<cplx, cplx> coupling_coefficients_from_fourier(const ModelParams& params) {
  const cplx i{0.0, 1.0};
  const cplx c1 = rho1_coefficient(params.alpha(), params.tilt);
  const cplx q1 = drift_first_harmonic(params);
  const cplx a = -2.0 * i * q1 + 2.0 * params.coupling * kPi * params.kappa0 * c1;
  const cplx b = -i * std::conj(q1);
  return {a, b};
}

/// lambda2 from the final closed form in (alpha, F, Gamma).
inline cplx lambda2_closed_form(double alpha, double tilt, double gamma_noise) {
  detail::require_positive_tilt(tilt, "lambda2");
  const cplx num = cplx{tilt, -(2.0 * gamma_noise + alpha)} * cplx{tilt, gamma_noise};
  const cplx den = 2.0 * (alpha * alpha + tilt * tilt) * cplx{4.0 * gamma_noise + alpha, tilt};
  return -num / den;
}

/// lambda2 via -a b / (mu2 - lambda0) with a, b from the Fourier assembly.
inline cplx lambda2_product(const ModelParams& params) {
  detail::require_positive_tilt(params.tilt, "lambda2");
  const auto [a, b] = coupling_coefficients_from_fourier(params);
  const double alpha = params.alpha();
  const cplx gap = -cplx{4.0 * params.gamma_noise + alpha, params.tilt};
  return -a * b / gap;
}

inline cplx lambda2(const ModelParams& params) {
  return lambda2_closed_form(params.alpha(), params.tilt, params.gamma_noise);
}

inline PerturbationCoeffs perturbation_coeffs(const ModelParams& params) {
  detail::require_positive_tilt(params.tilt, "perturbation_coeffs");
  PerturbationCoeffs p;
  p.alpha = params.alpha();
  const double F = params.tilt;
  const double G = params.gamma_noise;
  const double d = p.alpha * p.alpha + F * F;
  p.A = -p.alpha / (kTwoPi * d);
  p.B = F / (kTwoPi * d);
  p.c1 = rho1_coefficient(p.alpha, F);
  p.a_coeff = cplx{F, -(2.0 * G + p.alpha)} / cplx{F, p.alpha};
  p.b_coeff = -cplx{F, G} / (2.0 * cplx{F, -p.alpha});
  p.lambda0 = {p.alpha, -F};
  p.lambda2 = lambda2_closed_form(p.alpha, F, G);
  return p;
}

/// Coefficient of h^2 in gamma_c(h) for kappa0 = 1 at alpha = 0:
/// Gamma (3F^2 + 8 Gamma^2) / (F^2 (16 Gamma^2 + F^2)).
inline double confinement_coefficient(double tilt, double gamma_noise) {
  detail::require_positive_tilt(tilt, "confinement_coefficient");
  const double F2 = tilt * tilt;
  const double G2 = gamma_noise * gamma_noise;
  return gamma_noise * (3.0 * F2 + 8.0 * G2) / (F2 * (16.0 * G2 + F2));
}

enum class PerturbativeMode { LeadingOrder, SelfConsistentAlpha };

inline std::string_view to_string(PerturbativeMode m) {
  return m == PerturbativeMode::LeadingOrder ? "LeadingOrder" : "SelfConsistentAlpha";
}

/// gamma_c(h) from Re[alpha - i F + h^2 lambda2(alpha)] = 0, gamma = 2 (alpha + Gamma) / kappa0.
/// LeadingOrder freezes lambda2 at alpha = 0; SelfConsistentAlpha bisects in
/// alpha on [-Gamma, Gamma] to 1e-12.
inline ThresholdResult gamma_c_perturbative(double h, double tilt, double gamma_noise, PerturbativeMode mode,
                                            double kappa0 = 1.0,
                                            NormalizationVariant variant = NormalizationVariant::FullyNormalised) {
  detail::require_positive_tilt(tilt, "gamma_c_perturbative");
  if (!(gamma_noise > 0.0)) throw std::invalid_argument("gamma_c_perturbative: gamma_noise must be > 0");
  const double h2 = h * h;
  double alpha = 0.0;
  if (mode == PerturbativeMode::LeadingOrder) {
    alpha = -h2 * lambda2_closed_form(0.0, tilt, gamma_noise).real();
  } else {
    auto f = [&](double a) { return a + h2 * lambda2_closed_form(a, tilt, gamma_noise).real(); };
    double lo = -gamma_noise;
    double hi = gamma_noise;
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
      alpha = lo;
    } else if (fhi == 0.0) {
      alpha = hi;
    } else {
      if ((flo > 0.0) == (fhi > 0.0)) {
        throw BracketError("gamma_c_perturbative: alpha + h^2 Re lambda2(alpha) has no sign change on [-Gamma, Gamma]");
      }
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      alpha = 0.5 * (lo + hi);
    }
  }
  return {2.0 * (alpha + gamma_noise) / kappa0, variant, 2, ThresholdMethod::Perturbative};
}

}  // namespace kvsync

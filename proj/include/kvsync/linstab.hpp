#pragma once

//=============================================================================
// Linear stability of the uniform state at h = 0.
//
// Perturbations phi = exp(i k.x + i m theta) of rho0 = 1/(2 pi) grow at
//
//   Re lambda_m(k) = A S_R(|k|) - Gamma   (|m| = 1),   -Gamma m^2 otherwise,
//   Im lambda_m(k) = -m F,
//
// where A = gamma kappa0 / 2 depends on the normalization variant and S_R is
// the normalized Fourier transform of the interaction window. The transport
// term is skew-Hermitian and is deliberately left out here.
//=============================================================================

#include "kvsync/model.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace kvsync {

enum class ThresholdMethod { Analytic, Perturbative, Bisection };

inline std::string_view to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::Analytic: return "analytic";
    case ThresholdMethod::Perturbative: return "perturbative";
    case ThresholdMethod::Bisection: return "bisection";
  }
  return "?";
}

struct ThresholdResult {
  double gamma_c = 0.0;
  NormalizationVariant variant = NormalizationVariant::FullyNormalised;
  int dimension = 2;
  ThresholdMethod method = ThresholdMethod::Analytic;
};

struct ModeGrowth {
  double spatial_mode = 0.0;  // |k|
  int angular_mode = 1;
  double re_lambda = 0.0;
  double im_lambda = 0.0;
};

/// S_R(|k|): 2 J1(z)/z in 2D (disc of radius R), sin(z)/z in 1D (interval
/// [-R, R]), z = |k| R. Equals 1 only at k = 0.
inline double kernel_factor(double k_magnitude, double radius, int dimension) {
  if (k_magnitude < 0.0) throw std::invalid_argument("kernel_factor: negative wavenumber");
  const double z = k_magnitude * radius;
  if (z < 1e-6) {
    // Taylor: 1 - z^2/8 (2D), 1 - z^2/6 (1D)
    return dimension == 2 ? 1.0 - z * z / 8.0 : 1.0 - z * z / 6.0;
  }
  if (dimension == 2) return 2.0 * std::cyl_bessel_j(1.0, z) / z;
  return std::sin(z) / z;
}

/// A = gamma kappa0 / 2 with kappa0 taken from the variant in the given dimension.
inline double growth_prefactor(const ModelParams& params, int dimension) {
  return 0.5 * params.coupling * kernel_mass(params.variant, params.radius, dimension);
}

inline ModeGrowth growth_rate(double k_magnitude, int m, const ModelParams& params, int dimension) {
  ModeGrowth g;
  g.spatial_mode = k_magnitude;
  g.angular_mode = m;
  if (std::abs(m) == 1) {
    g.re_lambda = growth_prefactor(params, dimension) * kernel_factor(k_magnitude, params.radius, dimension) -
                  params.gamma_noise;
  } else {
    g.re_lambda = -params.gamma_noise * m * m;
  }
  g.im_lambda = -m * params.tilt;
  return g;
}

/// Closed-form thresholds gamma_c at h = 0.
inline ThresholdResult critical_coupling_h0(NormalizationVariant variant, double gamma_noise, double radius,
                                            int dimension) {
  if (!(gamma_noise > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("critical_coupling_h0: gamma_noise and radius must be positive");
  }
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("critical_coupling_h0: dimension must be 1 or 2");
  double g = 0.0;
  switch (variant) {
    case NormalizationVariant::FullyNormalised: g = 2.0 * gamma_noise; break;
    case NormalizationVariant::Unnormalised:
    case NormalizationVariant::PartialTheta:
      g = dimension == 2 ? 2.0 * gamma_noise / (kPi * radius * radius) : gamma_noise / radius;
      break;
    case NormalizationVariant::PartialX: g = gamma_noise / kPi; break;
  }
  return {g, variant, dimension, ThresholdMethod::Analytic};
}

/// Re lambda_{+1}(k) - Re lambda_{+1}(0) for each sample.
inline std::vector<std::pair<double, double>> dominance_gap(const std::vector<double>& k_samples,
                                                            const ModelParams& params, int dimension) {
  if (k_samples.empty()) throw std::invalid_argument("dominance_gap: empty sample list");
  const double base = growth_rate(0.0, 1, params, dimension).re_lambda;
  std::vector<std::pair<double, double>> out;
  out.reserve(k_samples.size());
  for (double k : k_samples) out.emplace_back(k, growth_rate(k, 1, params, dimension).re_lambda - base);
  return out;
}

/// Growth rates for every (|k|, m) pair, rows ordered by k then m.
inline std::vector<ModeGrowth> dispersion_curve(const std::vector<double>& k_samples, const std::vector<int>& modes,
                                                const ModelParams& params, int dimension) {
  std::vector<ModeGrowth> out;
  out.reserve(k_samples.size() * modes.size());
  for (double k : k_samples)
    for (int m : modes) out.push_back(growth_rate(k, m, params, dimension));
  return out;
}

}  // namespace kvsync

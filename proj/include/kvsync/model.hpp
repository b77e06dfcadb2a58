#pragma once

//=============================================================================
// Model parameters, interaction normalizations and the angular building blocks
// shared by every solver: densities on the circle, their Fourier moments, the
// (multichromatic) alignment field and the angular potential.
//
//   d_t rho = -v0 e(theta).grad rho - d_theta([F - h sin theta - gamma I[rho]] rho)
//             + Gamma d_theta^2 rho
//
// In the homogeneous setting the alignment field reduces to
//
//   I[rho](theta) = kappa0 sum_k k a_k [sin(k theta) r_{k,c} - cos(k theta) r_{k,s}]
//
// with r_{k,c}, r_{k,s} the global cosine/sine moments of rho.
//=============================================================================

#include "kvsync/fourier.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kvsync {

enum class NormalizationVariant { FullyNormalised, Unnormalised, PartialTheta, PartialX };

inline constexpr std::array<NormalizationVariant, 4> kAllVariants = {
    NormalizationVariant::FullyNormalised, NormalizationVariant::Unnormalised,
    NormalizationVariant::PartialTheta, NormalizationVariant::PartialX};

inline std::string_view to_string(NormalizationVariant v) {
  switch (v) {
    case NormalizationVariant::FullyNormalised: return "FullyNormalised";
    case NormalizationVariant::Unnormalised: return "Unnormalised";
    case NormalizationVariant::PartialTheta: return "PartialTheta";
    case NormalizationVariant::PartialX: return "PartialX";
  }
  return "?";
}

inline NormalizationVariant parse_variant(std::string_view s) {
  for (auto v : kAllVariants) {
    if (s == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown normalization variant '" + std::string(s) + "'");
}

/// Spatial kernel mass for a variant: the constant that multiplies the angular
/// alignment integral when rho is spatially homogeneous at unit angular mass.
/// PartialX divides by the windowed density at fixed theta, so at the uniform
/// state its effective constant is 1/rho0 = 2 pi in any dimension.
inline double kernel_mass(NormalizationVariant v, double radius, int dimension) {
  const double window = dimension == 1 ? 2.0 * radius : kPi * radius * radius;
  switch (v) {
    case NormalizationVariant::FullyNormalised: return 1.0;
    case NormalizationVariant::Unnormalised:
    case NormalizationVariant::PartialTheta: return window;
    case NormalizationVariant::PartialX: return kTwoPi;
  }
  return 1.0;
}

struct ModelParams {
  double gamma_noise = 1.0;  // angular diffusion
  double tilt = 0.0;         // F
  double field = 0.0;        // h
  double coupling = 1.0;     // gamma
  double speed = 0.0;        // v0
  double radius = 0.2;       // R
  int dimension = 2;         // 1 or 2 (spatial kernel convention)
  NormalizationVariant variant = NormalizationVariant::FullyNormalised;
  double kappa0 = 1.0;
  std::vector<double> potential{1.0};  // a_1..a_n

  /// Parameters with kappa0 set consistently from variant/radius/dimension.
  static ModelParams make(NormalizationVariant variant, double radius, int dimension) {
    ModelParams p;
    p.variant = variant;
    p.radius = radius;
    p.dimension = dimension;
    p.kappa0 = kernel_mass(variant, radius, dimension);
    return p;
  }

  /// Re-derives kappa0 after variant/radius/dimension were edited.
  ModelParams& sync_kappa() {
    kappa0 = kernel_mass(variant, radius, dimension);
    return *this;
  }

  int potential_degree() const noexcept { return static_cast<int>(potential.size()); }

  /// alpha0 = gamma kappa0 / 2 - Gamma: real part of the critical eigenvalue at h = 0.
  double alpha() const noexcept { return 0.5 * coupling * kappa0 - gamma_noise; }

  void validate() const {
    if (!(gamma_noise > 0.0)) throw std::invalid_argument("gamma_noise must be > 0");
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
    if (!(tilt >= 0.0)) throw std::invalid_argument("tilt must be >= 0");
    if (!(field >= 0.0)) throw std::invalid_argument("field must be >= 0");
    if (!(speed >= 0.0)) throw std::invalid_argument("speed must be >= 0");
    if (!(radius > 0.0 && radius <= 0.5)) throw std::invalid_argument("radius must lie in (0, 0.5]");
    if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (potential.empty()) throw std::invalid_argument("potential must have at least one coefficient");
    for (double a : potential) {
      if (!(a > 0.0)) throw std::invalid_argument("potential coefficients must be > 0");
    }
    const double expected = kernel_mass(variant, radius, dimension);
    if (std::abs(kappa0 - expected) > 1e-12 * std::max(1.0, expected)) {
      throw std::invalid_argument("kappa0 inconsistent with variant " + std::string(to_string(variant)));
    }
  }

  bool operator==(const ModelParams&) const = default;
};

//-----------------------------------------------------------------------------
// Densities on the circle
//-----------------------------------------------------------------------------

inline constexpr double kUniformDensity = 1.0 / kTwoPi;

/// A probability density on the circle: real symmetric coefficients with
/// c_0 = 1/(2 pi).
class AngularDensity {
 public:
  static AngularDensity uniform(int max_mode) {
    FourierSeries s(max_mode);
    s.set(0, kUniformDensity);
    return AngularDensity(std::move(s));
  }

  /// Validates the mass invariant (to 1e-12) and pins c_0 exactly.
  explicit AngularDensity(FourierSeries series) : series_(std::move(series)) {
    if (series_.max_mode() < 1) throw std::invalid_argument("AngularDensity: max_mode must be >= 1");
    if (std::abs(series_[0].real() - kUniformDensity) > 1e-12) {
      throw std::invalid_argument("AngularDensity: c_0 must equal 1/(2 pi)");
    }
    series_.set(0, kUniformDensity);
  }

  /// Normalizes positive grid samples to unit mass and projects to max_mode.
  static AngularDensity from_samples(std::span<const double> values, int max_mode) {
    FourierSeries s = FourierSeries::from_samples(values, max_mode);
    const double c0 = s[0].real();
    if (!(c0 > 0.0)) throw std::invalid_argument("AngularDensity::from_samples: non-positive mass");
    s *= kUniformDensity / c0;
    return AngularDensity(std::move(s));
  }

  int max_mode() const noexcept { return series_.max_mode(); }
  const FourierSeries& series() const noexcept { return series_; }
  cplx operator[](int n) const noexcept { return series_[n]; }
  double operator()(double theta) const { return series_(theta); }
  std::vector<double> sample(int m) const { return series_.sample(m); }

  AngularDensity resized(int max_mode) const { return AngularDensity(series_.resized(max_mode)); }

  /// (1 - w) * this + w * other, which stays a unit-mass density.
  AngularDensity mixed(const AngularDensity& other, double w) const {
    const int n = std::max(max_mode(), other.max_mode());
    FourierSeries s = (1.0 - w) * series_.resized(n) + w * other.series_.resized(n);
    return AngularDensity(std::move(s));
  }

 private:
  FourierSeries series_;
};

/// L1 distance between two densities on an m-node grid.
inline double l1_distance(const AngularDensity& a, const AngularDensity& b, int m = 512) {
  const auto va = a.sample(m);
  const auto vb = b.sample(m);
  double s = 0.0;
  for (std::size_t j = 0; j < va.size(); ++j) s += std::abs(va[j] - vb[j]);
  return s * kTwoPi / m;
}

struct FourierMoments {
  int order = 1;
  double cos_moment = 0.0;  // r_{k,c}
  double sin_moment = 0.0;  // r_{k,s}

  double magnitude() const { return std::hypot(cos_moment, sin_moment); }
};

/// r_{k,c} = 2 pi Re c_k, r_{k,s} = -2 pi Im c_k (exact in the coefficients).
inline FourierMoments moments(const FourierSeries& rho, int k) {
  if (k < 1 || k > rho.max_mode()) {
    throw std::out_of_range("moments: order " + std::to_string(k) + " outside [1, " +
                            std::to_string(rho.max_mode()) + "]");
  }
  const cplx ck = rho[k];
  return {k, kTwoPi * ck.real(), -kTwoPi * ck.imag()};
}

inline FourierMoments moments(const AngularDensity& rho, int k) { return moments(rho.series(), k); }

//-----------------------------------------------------------------------------
// Alignment field and angular potential
//-----------------------------------------------------------------------------

namespace detail {

inline void check_potential_fits(const ModelParams& params, int max_mode) {
  if (params.potential_degree() > max_mode) {
    throw std::invalid_argument("potential degree " + std::to_string(params.potential_degree()) +
                                " exceeds density max_mode " + std::to_string(max_mode));
  }
}

}  // namespace detail

/// Coefficients of I[rho] as a degree-n trigonometric polynomial, scaled by kappa0.
/// On the Fourier basis the k-th harmonic picks up -i pi k a_k kappa0 c_k.
inline FourierSeries interaction_field(const FourierSeries& rho, const ModelParams& params) {
  detail::check_potential_fits(params, rho.max_mode());
  const int n = params.potential_degree();
  FourierSeries field(n);
  for (int k = 1; k <= n; ++k) {
    const double weight = params.kappa0 * k * params.potential[static_cast<std::size_t>(k - 1)];
    field.set(k, cplx{0.0, -kPi * weight} * rho[k]);
  }
  return field;
}

inline FourierSeries interaction_field(const AngularDensity& rho, const ModelParams& params) {
  return interaction_field(rho.series(), params);
}

/// U(theta) = slope * theta + periodic(theta).
struct PotentialSpec {
  double slope = 0.0;
  FourierSeries periodic;

  double operator()(double theta) const { return slope * theta + periodic(theta); }
};

/// U = -F theta - h cos theta - gamma kappa0 sum_k a_k [r_{k,c} cos k theta + r_{k,s} sin k theta].
inline PotentialSpec angular_potential(const FourierSeries& rho, const ModelParams& params) {
  detail::check_potential_fits(params, rho.max_mode());
  const int n = params.potential_degree();
  FourierSeries p(std::max(n, 1));
  p.set(1, cplx{-0.5 * params.field, 0.0});
  for (int k = 1; k <= n; ++k) {
    const auto m = moments(rho, k);
    const double w = params.coupling * params.kappa0 * params.potential[static_cast<std::size_t>(k - 1)];
    // r_c cos + r_s sin  ->  coefficient (r_c - i r_s)/2 on exp(i k theta)
    p.set(k, p[k] - w * 0.5 * cplx{m.cos_moment, -m.sin_moment});
  }
  return {-params.tilt, std::move(p)};
}

inline PotentialSpec angular_potential(const AngularDensity& rho, const ModelParams& params) {
  return angular_potential(rho.series(), params);
}

/// Angular drift b = F - h sin theta - gamma I[rho] (periodic).
inline FourierSeries drift(const FourierSeries& rho, const ModelParams& params) {
  FourierSeries b = interaction_field(rho, params);
  b *= -params.coupling;
  if (b.max_mode() < 1) b = b.resized(1);
  b.set(1, b[1] - params.field * cplx{0.0, -0.5});
  b.set(0, params.tilt);
  return b;
}

}  // namespace kvsync

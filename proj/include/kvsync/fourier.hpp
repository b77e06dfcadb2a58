#pragma once

//=============================================================================
// Real trigonometric polynomials on the circle, stored as complex Fourier
// coefficients c_n, n = -N..N, with c_{-n} = conj(c_n).
//
//   f(theta) = sum_n c_n exp(i n theta)
//
// All model operators used by the solvers (multiplication by low harmonics,
// differentiation, the alignment integral) act exactly on these coefficients.
// Grid sampling is only used for quadrature and output.
//=============================================================================

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvsync {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace detail {

// Eigen::FFT caches plans internally, so keep one engine per thread.
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// Signed mode -> slot in an FFT-ordered array of length m.
inline int fft_slot(int n, int m) { return ((n % m) + m) % m; }

}  // namespace detail

/// Uniform nodes theta_j = 2 pi j / m, j = 0..m-1.
inline std::vector<double> uniform_grid(int m, double length = kTwoPi) {
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) g[static_cast<std::size_t>(j)] = length * j / m;
  return g;
}

class FourierSeries {
 public:
  FourierSeries() : FourierSeries(0) {}

  explicit FourierSeries(int max_mode) : max_mode_(max_mode) {
    if (max_mode < 0) throw std::invalid_argument("FourierSeries: negative max_mode");
    coeffs_.assign(static_cast<std::size_t>(2 * max_mode + 1), cplx{0.0, 0.0});
  }

  int max_mode() const noexcept { return max_mode_; }

  /// Coefficient of exp(i n theta); zero outside the stored range.
  cplx operator[](int n) const noexcept {
    if (n < -max_mode_ || n > max_mode_) return {0.0, 0.0};
    return coeffs_[static_cast<std::size_t>(n + max_mode_)];
  }

  /// Sets c_n and c_{-n} = conj(c_n). For n = 0 only the real part is kept.
  void set(int n, cplx value) {
    if (n < -max_mode_ || n > max_mode_) {
      throw std::out_of_range("FourierSeries::set: mode " + std::to_string(n) +
                              " outside [-" + std::to_string(max_mode_) + ", " +
                              std::to_string(max_mode_) + "]");
    }
    if (n == 0) {
      coeffs_[static_cast<std::size_t>(max_mode_)] = {value.real(), 0.0};
      return;
    }
    coeffs_[static_cast<std::size_t>(n + max_mode_)] = value;
    coeffs_[static_cast<std::size_t>(-n + max_mode_)] = std::conj(value);
  }

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  double operator()(double theta) const {
    double v = coeffs_[static_cast<std::size_t>(max_mode_)].real();
    for (int n = 1; n <= max_mode_; ++n) {
      v += 2.0 * std::real((*this)[n] * std::polar(1.0, n * theta));
    }
    return v;
  }

  /// Values on the m-node uniform grid (m > 2 max_mode required for exactness).
  std::vector<double> sample(int m) const {
    if (m <= 2 * max_mode_) {
      throw std::invalid_argument("FourierSeries::sample: grid too coarse for max_mode");
    }
    std::vector<cplx> spec(static_cast<std::size_t>(m), cplx{0.0, 0.0});
    for (int n = -max_mode_; n <= max_mode_; ++n) {
      spec[static_cast<std::size_t>(detail::fft_slot(n, m))] = (*this)[n];
    }
    std::vector<cplx> vals;
    detail::fft_engine().inv(vals, spec);
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] = vals[static_cast<std::size_t>(j)].real() * m;
    return out;
  }

  /// Discrete Fourier projection of uniform-grid samples, truncated to max_mode.
  /// The Nyquist mode of an even-length grid is discarded.
  static FourierSeries from_samples(std::span<const double> values, int max_mode) {
    const int m = static_cast<int>(values.size());
    if (max_mode > (m - 1) / 2) {
      throw std::invalid_argument("FourierSeries::from_samples: max_mode exceeds grid resolution");
    }
    std::vector<cplx> in(values.begin(), values.end());
    std::vector<cplx> spec;
    detail::fft_engine().fwd(spec, in);
    FourierSeries s(max_mode);
    s.set(0, spec[0] / static_cast<double>(m));
    for (int n = 1; n <= max_mode; ++n) s.set(n, spec[static_cast<std::size_t>(n)] / static_cast<double>(m));
    return s;
  }

  /// Copy with a different truncation (extra modes are zero).
  FourierSeries resized(int max_mode) const {
    FourierSeries r(max_mode);
    const int lim = std::min(max_mode, max_mode_);
    for (int n = 0; n <= lim; ++n) r.set(n, (*this)[n]);
    return r;
  }

  FourierSeries derivative() const {
    FourierSeries d(max_mode_);
    for (int n = 1; n <= max_mode_; ++n) d.set(n, cplx{0.0, static_cast<double>(n)} * (*this)[n]);
    return d;
  }

  /// Exact product; the result carries max_mode = sum of the operands' max modes
  /// unless a smaller truncation is requested.
  FourierSeries multiply(const FourierSeries& other, int truncate_to = -1) const {
    const int full = max_mode_ + other.max_mode_;
    const int out_mode = truncate_to < 0 ? full : truncate_to;
    FourierSeries p(out_mode);
    for (int n = 0; n <= out_mode; ++n) {
      cplx acc{0.0, 0.0};
      const int lo = std::max(-max_mode_, n - other.max_mode_);
      const int hi = std::min(max_mode_, n + other.max_mode_);
      for (int j = lo; j <= hi; ++j) acc += (*this)[j] * other[n - j];
      p.set(n, acc);
    }
    return p;
  }

  FourierSeries& operator+=(const FourierSeries& o) {
    if (o.max_mode_ > max_mode_) *this = resized(o.max_mode_);
    for (int n = 0; n <= o.max_mode_; ++n) set(n, (*this)[n] + o[n]);
    return *this;
  }
  FourierSeries& operator-=(const FourierSeries& o) {
    if (o.max_mode_ > max_mode_) *this = resized(o.max_mode_);
    for (int n = 0; n <= o.max_mode_; ++n) set(n, (*this)[n] - o[n]);
    return *this;
  }
  FourierSeries& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(double s, FourierSeries a) { return a *= s; }

  /// Largest coefficient magnitude, over all stored modes.
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  int max_mode_;
  std::vector<cplx> coeffs_;
};

/// Composite trapezoid integral of periodic samples over one period.
inline double periodic_trapezoid(std::span<const double> values, double period = kTwoPi) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * period / static_cast<double>(values.size());
}

}  // namespace kvsync

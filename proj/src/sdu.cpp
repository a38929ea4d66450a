#include "koss/sdu.hpp"

#include <cmath>
#include <stdexcept>

#include "koss/fft.hpp"

namespace koss {
namespace sdu {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Core pipeline: Re(IDFT(sign * j w_k chi_k * DFT(x))). sign=+1 gives the
// derivative operator D, sign=-1 its transpose (the mask is even in omega,
// so the real operator is antisymmetric).
std::vector<double> apply_spectral(const std::vector<double>& x, const SpectralConfig& cfg,
                                   double sign) {
  const auto omega = frequency_vector(cfg);
  const auto chi = damping_mask(omega, cfg);
  ComplexVector spec = fft(ComplexVector::from_real(x));
  for (size_t k = 0; k < spec.size(); ++k) {
    const double w = sign * omega[k] * chi[k];
    const double re = spec.re[k], im = spec.im[k];
    spec.re[k] = -im * w;  // multiply by j*w
    spec.im[k] = re * w;
  }
  ComplexVector back = ifft(spec);
  return back.re;
}

// Endpoint slope functional: beta = (x_{n-1} - x_0) / ((n-1) dt).
double endpoint_slope(const std::vector<double>& x, double dt) {
  const size_t n = x.size();
  return (x[n - 1] - x[0]) / (static_cast<double>(n - 1) * dt);
}

}  // namespace

void SpectralConfig::validate() const {
  if (n < 2) throw std::invalid_argument("SpectralConfig: n must be >= 2");
  if (dt <= 0.0) throw std::invalid_argument("SpectralConfig: dt must be positive");
  if (mask_kind != MaskKind::kNone && omega_cut <= 0.0)
    throw std::invalid_argument("SpectralConfig: omega_cut must be positive with a mask");
}

std::vector<double> frequency_vector(const SpectralConfig& cfg) {
  cfg.validate();
  const int64_t n = cfg.n;
  std::vector<double> omega(static_cast<size_t>(n));
  const double base = kTwoPi / (static_cast<double>(n) * cfg.dt);
  for (int64_t k = 0; k < n; ++k)
    omega[static_cast<size_t>(k)] = base * static_cast<double>(2 * k < n ? k : k - n);
  return omega;
}

std::vector<double> damping_mask(const std::vector<double>& omega, const SpectralConfig& cfg) {
  std::vector<double> chi(omega.size(), 1.0);
  switch (cfg.mask_kind) {
    case MaskKind::kNone:
      break;
    case MaskKind::kSoftExponential:
      for (size_t k = 0; k < omega.size(); ++k)
        chi[k] = std::exp(-std::fabs(omega[k]) / cfg.omega_cut);
      break;
    case MaskKind::kHardCutoff:
      for (size_t k = 0; k < omega.size(); ++k)
        chi[k] = std::fabs(omega[k]) <= cfg.omega_cut ? 1.0 : 0.0;
      break;
  }
  return chi;
}

std::vector<double> spectral_derivative(const std::vector<double>& x, const SpectralConfig& cfg) {
  cfg.validate();
  if (static_cast<int64_t>(x.size()) != cfg.n)
    throw std::invalid_argument("spectral_derivative: length does not match cfg.n");
  if (!cfg.detrend) return apply_spectral(x, cfg, +1.0);

  const size_t n = x.size();
  const double beta = endpoint_slope(x, cfg.dt);
  std::vector<double> detrended(n);
  for (size_t i = 0; i < n; ++i)
    detrended[i] = x[i] - x[0] - beta * static_cast<double>(i) * cfg.dt;
  std::vector<double> d = apply_spectral(detrended, cfg, +1.0);
  for (double& v : d) v += beta;
  return d;
}

std::vector<double> spectral_derivative_adjoint(const std::vector<double>& g,
                                                const SpectralConfig& cfg) {
  cfg.validate();
  if (static_cast<int64_t>(g.size()) != cfg.n)
    throw std::invalid_argument("spectral_derivative_adjoint: length does not match cfg.n");
  std::vector<double> dt_g = apply_spectral(g, cfg, -1.0);
  if (!cfg.detrend) return dt_g;

  // Full operator with detrend: D_full = D (I - tau r^T) + 1 r^T, where
  // tau_i = i dt and r picks the endpoint slope. Transpose adds a rank-1
  // correction r * (sum(g) - <D tau, g>).
  const size_t n = g.size();
  std::vector<double> tau(n);
  for (size_t i = 0; i < n; ++i) tau[i] = static_cast<double>(i) * cfg.dt;
  std::vector<double> d_tau = apply_spectral(tau, cfg, +1.0);
  double sum_g = 0.0, dtau_g = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sum_g += g[i];
    dtau_g += d_tau[i] * g[i];
  }
  const double coeff = (sum_g - dtau_g) / (static_cast<double>(n - 1) * cfg.dt);
  dt_g[0] -= coeff;
  dt_g[n - 1] += coeff;
  return dt_g;
}

std::vector<double> central_difference(const std::vector<double>& x, double dt) {
  if (x.size() < 3) throw std::invalid_argument("central_difference: need n >= 3");
  if (dt <= 0.0) throw std::invalid_argument("central_difference: dt must be positive");
  const size_t n = x.size();
  std::vector<double> d(n);
  d[0] = (x[1] - x[0]) / dt;
  for (size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
  d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
  return d;
}

std::vector<double> magnitude_spectrum(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("magnitude_spectrum: empty input");
  ComplexVector spec = fft(ComplexVector::from_real(x));
  std::vector<double> mag(spec.size());
  for (size_t k = 0; k < spec.size(); ++k)
    mag[k] = std::hypot(spec.re[k], spec.im[k]);
  return mag;
}

}  // namespace sdu
}  // namespace koss

#pragma once

#include <cstdint>
#include <vector>

namespace koss {
namespace sdu {

enum class MaskKind { kNone, kSoftExponential, kHardCutoff };

// Describes one spectral differentiation operator: length-n periodic grid
// with sample interval dt and an optional high-frequency damping mask.
struct SpectralConfig {
  int64_t n = 0;
  double dt = 1.0;
  MaskKind mask_kind = MaskKind::kNone;
  double omega_cut = 0.0;  // rad/time; required when mask_kind != kNone
  // Endpoint linear detrend before the transform, slope added back after.
  // Off by default: the operator then matches the plain FFT pipeline.
  bool detrend = false;

  void validate() const;
};

// omega[k] = 2 pi k / (n dt) for 2k < n, else 2 pi (k - n) / (n dt).
std::vector<double> frequency_vector(const SpectralConfig& cfg);

// chi(omega) in [0, 1] per bin. Soft: exp(-|w|/w_cut); hard: |w| <= w_cut.
std::vector<double> damping_mask(const std::vector<double>& omega, const SpectralConfig& cfg);

// Re(IDFT(j w_k chi(w_k) DFT(x))). Length of x must equal cfg.n.
std::vector<double> spectral_derivative(const std::vector<double>& x, const SpectralConfig& cfg);

// D^T g for the real linear operator D of spectral_derivative (all mask
// kinds, detrend included). Backward rule for backpropagation through D.
std::vector<double> spectral_derivative_adjoint(const std::vector<double>& g,
                                                const SpectralConfig& cfg);

// (x_{i+1} - x_{i-1}) / 2dt inside, one-sided first-order at the endpoints.
std::vector<double> central_difference(const std::vector<double>& x, double dt);

// |DFT(x)| per bin.
std::vector<double> magnitude_spectrum(const std::vector<double>& x);

}  // namespace sdu
}  // namespace koss

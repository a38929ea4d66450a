#pragma once

#include <cstddef>
#include <vector>

namespace koss {

// Split real/imaginary storage; re and im always have equal length.
struct ComplexVector {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVector() = default;
  explicit ComplexVector(size_t n) : re(n, 0.0), im(n, 0.0) {}
  ComplexVector(std::vector<double> r, std::vector<double> i);

  size_t size() const { return re.size(); }
  static ComplexVector from_real(const std::vector<double>& x);
};

// Forward DFT, X_k = sum_n x_n e^{-j 2 pi k n / N}. Radix-2 Cooley-Tukey for
// power-of-two lengths, Bluestein otherwise (no zero padding of the input:
// the transform length is always exactly N).
ComplexVector fft(const ComplexVector& x);

// Inverse DFT with 1/N scaling; fft(ifft(x)) == x.
ComplexVector ifft(const ComplexVector& x);

}  // namespace koss

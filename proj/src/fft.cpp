#include "koss/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace koss {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2, n a power of two. sign = -1 forward, +1 inverse
// (inverse here is unscaled; callers divide by n).
void fft_radix2(std::vector<double>& re, std::vector<double>& im, int sign) {
  const size_t n = re.size();
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cur_r = 1.0, cur_i = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        const size_t a = i + k, b = i + k + len / 2;
        const double ur = re[a], ui = im[a];
        const double vr = re[b] * cur_r - im[b] * cur_i;
        const double vi = re[b] * cur_i + im[b] * cur_r;
        re[a] = ur + vr;
        im[a] = ui + vi;
        re[b] = ur - vr;
        im[b] = ui - vi;
        const double nr = cur_r * wr - cur_i * wi;
        cur_i = cur_r * wi + cur_i * wr;
        cur_r = nr;
      }
    }
  }
}

// Bluestein's algorithm: DFT of arbitrary length n as a circular convolution
// of length m = next_pow2(2n - 1). Chirp table uses k^2 mod 2n to keep the
// trig argument bounded.
ComplexVector fft_bluestein(const ComplexVector& x, int sign) {
  const size_t n = x.size();
  const size_t m = next_pow2(2 * n - 1);

  std::vector<double> cr(n), ci(n);  // chirp e^{sign * j pi k^2 / n}
  for (size_t k = 0; k < n; ++k) {
    const uint64_t k2 = (static_cast<uint64_t>(k) * k) % (2 * n);
    const double ang = sign * (kTwoPi / 2.0) * static_cast<double>(k2) / static_cast<double>(n);
    cr[k] = std::cos(ang);
    ci[k] = std::sin(ang);
  }

  std::vector<double> ar(m, 0.0), ai(m, 0.0);
  for (size_t k = 0; k < n; ++k) {
    ar[k] = x.re[k] * cr[k] - x.im[k] * ci[k];
    ai[k] = x.re[k] * ci[k] + x.im[k] * cr[k];
  }
  std::vector<double> br(m, 0.0), bi(m, 0.0);
  br[0] = cr[0];
  bi[0] = -ci[0];
  for (size_t k = 1; k < n; ++k) {
    br[k] = br[m - k] = cr[k];
    bi[k] = bi[m - k] = -ci[k];
  }

  fft_radix2(ar, ai, -1);
  fft_radix2(br, bi, -1);
  for (size_t k = 0; k < m; ++k) {
    const double r = ar[k] * br[k] - ai[k] * bi[k];
    ai[k] = ar[k] * bi[k] + ai[k] * br[k];
    ar[k] = r;
  }
  fft_radix2(ar, ai, +1);
  const double inv_m = 1.0 / static_cast<double>(m);

  ComplexVector out(n);
  for (size_t k = 0; k < n; ++k) {
    const double vr = ar[k] * inv_m, vi = ai[k] * inv_m;
    out.re[k] = vr * cr[k] - vi * ci[k];
    out.im[k] = vr * ci[k] + vi * cr[k];
  }
  return out;
}

ComplexVector transform(const ComplexVector& x, int sign) {
  const size_t n = x.size();
  if (n == 0) throw std::invalid_argument("fft: empty input");
  if (n == 1) return x;
  if (is_pow2(n)) {
    ComplexVector out = x;
    fft_radix2(out.re, out.im, sign);
    return out;
  }
  return fft_bluestein(x, sign);
}

}  // namespace

ComplexVector::ComplexVector(std::vector<double> r, std::vector<double> i)
    : re(std::move(r)), im(std::move(i)) {
  if (re.size() != im.size())
    throw std::invalid_argument("ComplexVector: re/im length mismatch");
}

ComplexVector ComplexVector::from_real(const std::vector<double>& x) {
  ComplexVector out(x.size());
  out.re = x;
  return out;
}

ComplexVector fft(const ComplexVector& x) { return transform(x, -1); }

ComplexVector ifft(const ComplexVector& x) {
  ComplexVector out = transform(x, +1);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (size_t k = 0; k < out.size(); ++k) {
    out.re[k] *= inv_n;
    out.im[k] *= inv_n;
  }
  return out;
}

}  // namespace koss

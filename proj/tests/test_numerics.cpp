#include <cmath>
#include <vector>

#include "doctest.h"
#include "koss/fft.hpp"
#include "koss/linalg.hpp"
#include "koss/ode.hpp"
#include "koss/rng.hpp"
#include "koss/tensor.hpp"

using namespace koss;

namespace {

// Direct O(N^2) DFT summation, the independent oracle for the FFT.
ComplexVector dft_oracle(const ComplexVector& x, int sign) {
  const size_t n = x.size();
  ComplexVector out(n);
  for (size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
      const double c = std::cos(ang), s = std::sin(ang);
      re += x.re[t] * c - x.im[t] * s;
      im += x.re[t] * s + x.im[t] * c;
    }
    out.re[k] = re;
    out.im[k] = im;
  }
  return out;
}

ComplexVector random_complex(size_t n, CounterRng& rng) {
  ComplexVector x(n);
  for (size_t i = 0; i < n; ++i) {
    x.re[i] = rng.next_normal();
    x.im[i] = rng.next_normal();
  }
  return x;
}

double max_err(const ComplexVector& a, const ComplexVector& b) {
  double e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    e = std::max(e, std::fabs(a.re[i] - b.re[i]));
    e = std::max(e, std::fabs(a.im[i] - b.im[i]));
  }
  return e;
}

// Truncated power series for exp(M); valid reference after scaling.
Matrix exp_series(const Matrix& m) {
  int s = 0;
  double nrm = norm1(m);
  while (nrm > 0.25) {
    nrm *= 0.5;
    ++s;
  }
  Matrix a = std::ldexp(1.0, -s) * m;
  Matrix sum = Matrix::identity(m.rows);
  Matrix term = Matrix::identity(m.rows);
  for (int k = 1; k <= 40; ++k) {
    term = (1.0 / k) * (term * a);
    sum = sum + term;
    if (norm_max(term) < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Matrix random_matrix(int n, CounterRng& rng, double scale = 1.0) {
  Matrix m(n, n);
  for (double& v : m.a) v = scale * rng.next_normal();
  return m;
}

}  // namespace

TEST_CASE("fft of impulse is flat") {
  ComplexVector x = ComplexVector::from_real({1, 0, 0, 0});
  ComplexVector y = fft(x);
  for (size_t k = 0; k < 4; ++k) {
    CHECK(y.re[k] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(y.im[k] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("fft of constant is DC only") {
  ComplexVector y = fft(ComplexVector::from_real({1, 1, 1, 1}));
  CHECK(y.re[0] == doctest::Approx(4.0));
  for (size_t k = 1; k < 4; ++k) {
    CHECK(std::fabs(y.re[k]) < 1e-13);
    CHECK(std::fabs(y.im[k]) < 1e-13);
  }
}

TEST_CASE("fft matches direct DFT oracle on non-power-of-two lengths") {
  CounterRng rng(7, 0);
  for (size_t n : {size_t(13), size_t(3), size_t(7), size_t(60), size_t(127)}) {
    ComplexVector x = random_complex(n, rng);
    CHECK(max_err(fft(x), dft_oracle(x, -1)) < 1e-10);
    ComplexVector rt = ifft(fft(x));
    CHECK(max_err(rt, x) < 1e-12);
  }
}

TEST_CASE("fft/ifft roundtrip over lengths 1..512") {
  CounterRng rng(11, 0);
  for (size_t n = 1; n <= 512; n += (n < 40 ? 1 : 7)) {
    ComplexVector x = random_complex(n, rng);
    CHECK(max_err(ifft(fft(x)), x) < 1e-12);
  }
}

TEST_CASE("fft of real input is Hermitian symmetric") {
  CounterRng rng(13, 0);
  for (size_t n : {size_t(16), size_t(21)}) {
    ComplexVector x(n);
    for (size_t i = 0; i < n; ++i) x.re[i] = rng.next_normal();
    ComplexVector y = fft(x);
    for (size_t k = 1; k < n; ++k) {
      CHECK(y.re[n - k] == doctest::Approx(y.re[k]).epsilon(1e-11));
      CHECK(y.im[n - k] == doctest::Approx(-y.im[k]).epsilon(1e-11));
    }
  }
}

TEST_CASE("mat_exp basics") {
  SUBCASE("zero matrix") {
    Matrix e = mat_exp(Matrix(3, 3));
    CHECK(norm_max(e - Matrix::identity(3)) < 1e-15);
  }
  SUBCASE("diagonal") {
    Matrix e = mat_exp(Matrix::diag({1.5, -0.3}));
    CHECK(e(0, 0) == doctest::Approx(std::exp(1.5)).epsilon(1e-12));
    CHECK(e(1, 1) == doctest::Approx(std::exp(-0.3)).epsilon(1e-12));
    CHECK(std::fabs(e(0, 1)) < 1e-14);
  }
  SUBCASE("nilpotent") {
    Matrix m(2, 2, {0, 1, 0, 0});
    Matrix e = mat_exp(m);
    CHECK(e(0, 0) == doctest::Approx(1.0));
    CHECK(e(0, 1) == doctest::Approx(1.0));
    CHECK(e(1, 0) == doctest::Approx(0.0));
    CHECK(e(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("non-finite rejected") {
    Matrix m(2, 2, {0, std::nan(""), 0, 0});
    CHECK_THROWS(mat_exp(m));
  }
}

TEST_CASE("mat_exp matches power series within 1e-10 relative") {
  CounterRng rng(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    Matrix m = random_matrix(n, rng, 0.8);
    Matrix e = mat_exp(m);
    Matrix ref = exp_series(m);
    CHECK(norm_fro(e - ref) / norm_fro(ref) < 1e-10);
  }
}

TEST_CASE("mat_exp is multiplicative for commuting matrices") {
  CounterRng rng(19, 0);
  for (int trial = 0; trial < 5; ++trial) {
    // Co-diagonal pair: S D1 S^-1 and S D2 S^-1 commute.
    const int n = 3;
    Matrix s = random_matrix(n, rng) + 3.0 * Matrix::identity(n);
    Matrix s_inv = solve_linear(s, Matrix::identity(n));
    Matrix d1 = Matrix::diag({rng.next_normal(), rng.next_normal(), rng.next_normal()});
    Matrix d2 = Matrix::diag({rng.next_normal(), rng.next_normal(), rng.next_normal()});
    Matrix m1 = s * d1 * s_inv;
    Matrix m2 = s * d2 * s_inv;
    Matrix lhs = mat_exp(m1 + m2);
    Matrix rhs = mat_exp(m1) * mat_exp(m2);
    CHECK(norm_fro(lhs - rhs) / norm_fro(rhs) < 1e-9);
  }
}

TEST_CASE("rk4 basics") {
  SUBCASE("zero field keeps state") {
    auto f = [](double, const std::vector<double>& y) { return std::vector<double>(y.size(), 0.0); };
    std::vector<double> y = rk4_step(f, {2.0, -1.0}, 0.0, 0.1);
    CHECK(y[0] == 2.0);
    CHECK(y[1] == -1.0);
  }
  SUBCASE("exponential growth") {
    auto f = [](double, const std::vector<double>& y) { return y; };
    std::vector<double> y = rk4_step(f, {1.0}, 0.0, 0.01);
    CHECK(std::fabs(y[0] - std::exp(0.01)) < 1e-10);
  }
  SUBCASE("rejects non-positive dt") {
    auto f = [](double, const std::vector<double>& y) { return y; };
    CHECK_THROWS(rk4_step(f, {1.0}, 0.0, 0.0));
  }
}

TEST_CASE("rk4 linear system matches matrix exponential to O(dt^5)") {
  CounterRng rng(23, 0);
  const int n = 3;
  Matrix m = random_matrix(n, rng, 0.7);
  std::vector<double> y0 = {1.0, -0.5, 0.25};
  const double dt = 0.01;
  auto f = [&](double, const std::vector<double>& y) { return matvec(m, y); };
  std::vector<double> got = rk4_step(f, y0, 0.0, dt);
  std::vector<double> want = matvec(mat_exp(dt * m), y0);
  for (int i = 0; i < n; ++i) CHECK(std::fabs(got[i] - want[i]) < 1e-11);
}

TEST_CASE("rk4 global error falls ~16x when dt halves") {
  const double lambda = -1.3;
  auto f = [&](double, const std::vector<double>& y) {
    return std::vector<double>{lambda * y[0]};
  };
  auto global_err = [&](double dt) {
    std::vector<double> y = {1.0};
    const int steps = static_cast<int>(std::llround(1.0 / dt));
    for (int s = 0; s < steps; ++s) y = rk4_step(f, y, s * dt, dt);
    return std::fabs(y[0] - std::exp(lambda));
  };
  const double e1 = global_err(0.02);
  const double e2 = global_err(0.01);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("solve_linear basics") {
  SUBCASE("identity") {
    std::vector<double> b0 = {1.0, 2.0, 3.0};
    std::vector<double> x = solve_linear(Matrix::identity(3), b0);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
  }
  SUBCASE("diagonal") {
    std::vector<double> b = {2.0, 8.0};
    std::vector<double> x = solve_linear(Matrix::diag({2.0, 4.0}), b);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
  }
  SUBCASE("singular reports condition estimate") {
    Matrix m(2, 2, {1.0, 2.0, 2.0, 4.0});
    std::vector<double> b = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(solve_linear(m, b), doctest::Contains("cond estimate"),
                         std::runtime_error);
  }
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
  CounterRng rng(29, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 8;
    Matrix m = random_matrix(n, rng) + 6.0 * Matrix::identity(n);
    std::vector<double> b(n);
    for (double& v : b) v = rng.next_normal();
    std::vector<double> x = solve_linear(m, b);
    std::vector<double> mx = matvec(m, x);
    double rnorm = 0.0, bnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      rnorm += (mx[i] - b[i]) * (mx[i] - b[i]);
      bnorm += b[i] * b[i];
    }
    CHECK(std::sqrt(rnorm) <= 1e-9 * std::sqrt(bnorm));
  }
}

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  t.at({1, 2}) = 5.0;
  CHECK(t[5] == 5.0);
  CHECK(t.all_finite());
  t.at({0, 0}) = std::nan("");
  CHECK_FALSE(t.all_finite());
  CHECK_THROWS(Tensor({2, 2}, {1.0}));
}

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace koss {

// Row-major dense matrix, double precision. Small-state regime (n <= 64);
// no attempt at blocking or BLAS.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  Matrix(int r, int c, std::vector<double> data);

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Matrix identity(int n);
  static Matrix diag(const std::vector<double>& d);
  static Matrix col(const std::vector<double>& v);  // column vector (n x 1)
  static Matrix row(const std::vector<double>& v);  // row vector (1 x n)

  Matrix transposed() const;
  bool is_square() const { return rows == cols; }
};

using SquareMatrix = Matrix;  // square-ness checked at use sites

Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator*(double s, const Matrix& x);

double norm1(const Matrix& m);       // max column sum
double norm_fro(const Matrix& m);
double norm_max(const Matrix& m);    // max |entry|
Matrix symmetrized(const Matrix& m); // (M + M^T)/2

// LU factorization with partial pivoting.
struct LuFactors {
  int n = 0;
  std::vector<double> lu;
  std::vector<int> piv;
  bool singular = false;
};

LuFactors lu_factor(const Matrix& m);
std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& b);

// One-norm condition estimate ||M||_1 * est(||M^-1||_1) via Hager's method.
double condition_estimate_1(const Matrix& m, const LuFactors& f);

// Solve M x = b by partially pivoted elimination. Throws std::runtime_error
// (message carries the condition estimate) when the matrix is singular or the
// estimate exceeds 1e12.
std::vector<double> solve_linear(const Matrix& m, const std::vector<double>& b);
Matrix solve_linear(const Matrix& m, const Matrix& b);

// Matrix exponential, scaling-and-squaring with a Pade (6,6) approximant;
// scaling chosen so ||M / 2^s||_1 < 0.5. Requires finite entries, n <= 64.
Matrix mat_exp(const Matrix& m);

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

}  // namespace koss

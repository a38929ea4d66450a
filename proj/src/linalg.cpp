#include "koss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace koss {

Matrix::Matrix(int r, int c, std::vector<double> data) : rows(r), cols(c), a(std::move(data)) {
  if (a.size() != static_cast<size_t>(r) * c)
    throw std::invalid_argument("Matrix: data length mismatch");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const std::vector<double>& d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

Matrix Matrix::col(const std::vector<double>& v) {
  Matrix m(static_cast<int>(v.size()), 1, v);
  return m;
}

Matrix Matrix::row(const std::vector<double>& v) {
  Matrix m(1, static_cast<int>(v.size()), v);
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

static void check_same_shape(const Matrix& x, const Matrix& y, const char* op) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  check_same_shape(x, y, "matrix add");
  Matrix out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  check_same_shape(x, y, "matrix sub");
  Matrix out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matrix mul: inner dim mismatch");
  Matrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double v = x(i, k);
      if (v == 0.0) continue;
      const double* yr = &y.a[static_cast<size_t>(k) * y.cols];
      double* or_ = &out.a[static_cast<size_t>(i) * y.cols];
      for (int j = 0; j < y.cols; ++j) or_[j] += v * yr[j];
    }
  }
  return out;
}

Matrix operator*(double s, const Matrix& x) {
  Matrix out = x;
  for (double& v : out.a) v *= s;
  return out;
}

double norm1(const Matrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i) s += std::fabs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double norm_fro(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double norm_max(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::fabs(v));
  return s;
}

Matrix symmetrized(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("symmetrized: not square");
  Matrix out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

LuFactors lu_factor(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("lu_factor: not square");
  const int n = m.rows;
  LuFactors f;
  f.n = n;
  f.lu = m.a;
  f.piv.resize(n);
  for (int i = 0; i < n; ++i) f.piv[i] = i;
  auto at = [&](int i, int j) -> double& { return f.lu[static_cast<size_t>(i) * n + j]; };
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(at(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::fabs(at(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) {
      f.singular = true;
      return f;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
      std::swap(f.piv[k], f.piv[p]);
    }
    const double inv = 1.0 / at(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double l = at(i, k) * inv;
      at(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) at(i, j) -= l * at(k, j);
    }
  }
  return f;
}

std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& b) {
  const int n = f.n;
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: rhs size mismatch");
  if (f.singular) throw std::runtime_error("lu_solve: singular factorization");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.piv[i]];
  auto at = [&](int i, int j) { return f.lu[static_cast<size_t>(i) * n + j]; };
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= at(i, j) * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[j];
    x[i] = s / at(i, i);
  }
  return x;
}

// Hager/Higham one-norm estimator for ||M^-1||_1 using a few solves with M
// and M^T.
static double inverse_norm1_estimate(const LuFactors& f, const Matrix& m) {
  const int n = f.n;
  if (n == 1) return 1.0 / std::fabs(m(0, 0));
  LuFactors ft = lu_factor(m.transposed());
  if (ft.singular) return std::numeric_limits<double>::infinity();
  std::vector<double> x(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<double> y = lu_solve(f, x);
    double y1 = 0.0;
    for (double v : y) y1 += std::fabs(v);
    est = std::max(est, y1);
    std::vector<double> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    std::vector<double> z = lu_solve(ft, xi);
    int jmax = 0;
    double zmax = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::fabs(z[i]) > zmax) {
        zmax = std::fabs(z[i]);
        jmax = i;
      }
    }
    double zx = 0.0;
    for (int i = 0; i < n; ++i) zx += z[i] * x[i];
    if (zmax <= zx) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[jmax] = 1.0;
  }
  return est;
}

double condition_estimate_1(const Matrix& m, const LuFactors& f) {
  if (f.singular) return std::numeric_limits<double>::infinity();
  return norm1(m) * inverse_norm1_estimate(f, m);
}

std::vector<double> solve_linear(const Matrix& m, const std::vector<double>& b) {
  LuFactors f = lu_factor(m);
  const double cond = condition_estimate_1(m, f);
  if (f.singular || cond > 1e12)
    throw std::runtime_error("solve_linear: singular or ill-conditioned matrix (cond estimate " +
                             std::to_string(cond) + ")");
  return lu_solve(f, b);
}

Matrix solve_linear(const Matrix& m, const Matrix& b) {
  if (m.rows != b.rows) throw std::invalid_argument("solve_linear: rhs rows mismatch");
  LuFactors f = lu_factor(m);
  const double cond = condition_estimate_1(m, f);
  if (f.singular || cond > 1e12)
    throw std::runtime_error("solve_linear: singular or ill-conditioned matrix (cond estimate " +
                             std::to_string(cond) + ")");
  Matrix x(b.rows, b.cols);
  std::vector<double> col(b.rows);
  for (int j = 0; j < b.cols; ++j) {
    for (int i = 0; i < b.rows; ++i) col[i] = b(i, j);
    std::vector<double> sol = lu_solve(f, col);
    for (int i = 0; i < b.rows; ++i) x(i, j) = sol[i];
  }
  return x;
}

Matrix mat_exp(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("mat_exp: not square");
  if (m.rows > 64) throw std::invalid_argument("mat_exp: n > 64 unsupported");
  for (double v : m.a)
    if (!std::isfinite(v)) throw std::runtime_error("mat_exp: non-finite entry");

  const int n = m.rows;
  double nrm = norm1(m);
  int s = 0;
  while (nrm >= 0.5) {
    nrm *= 0.5;
    ++s;
  }
  Matrix a = std::ldexp(1.0, -s) * m;

  // Pade (6,6): c_k = 6! (12-k)! / (12! k! (6-k)!)
  static const double c[7] = {1.0,          1.0 / 2.0,     5.0 / 44.0,  1.0 / 66.0,
                              1.0 / 792.0,  1.0 / 15840.0, 1.0 / 665280.0};
  Matrix a2 = a * a;
  Matrix a4 = a2 * a2;
  Matrix a6 = a4 * a2;
  Matrix ueven = c[0] * Matrix::identity(n) + c[2] * a2 + c[4] * a4 + c[6] * a6;
  Matrix uodd = a * (c[1] * Matrix::identity(n) + c[3] * a2 + c[5] * a4);
  Matrix p = ueven + uodd;   // numerator N(a)
  Matrix q = ueven - uodd;   // denominator D(a) = N(-a)

  Matrix r = solve_linear(q, p);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
  if (m.cols != static_cast<int>(v.size()))
    throw std::invalid_argument("matvec: dim mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* mr = &m.a[static_cast<size_t>(i) * m.cols];
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += mr[j] * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace koss

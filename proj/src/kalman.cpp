#include "koss/kalman.hpp"

#include <cmath>
#include <stdexcept>

#include "koss/ode.hpp"

namespace koss {
namespace kalman {
namespace {

Matrix from_flat(const std::vector<double>& v, int rows, int cols) {
  Matrix m(rows, cols);
  m.a = v;
  return m;
}

// Solves A X + X A^T + W = 0 for symmetric W via the Kronecker system
// (I (x) A + A (x) I) vec(X) = -vec(W). Small n only.
SquareMatrix solve_lyapunov(const SquareMatrix& a, const SquareMatrix& w) {
  const int n = a.rows;
  if (n > 16) throw std::invalid_argument("solve_lyapunov: n > 16 unsupported");
  Matrix big(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // d(AX)_{ij}/dX_{kj} = A_{ik};  d(XA^T)_{ij}/dX_{ik} = A_{jk}
        big(i * n + j, k * n + j) += a(i, k);
        big(i * n + j, i * n + k) += a(j, k);
      }
  std::vector<double> rhs(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) rhs[static_cast<size_t>(i)] = -w.a[static_cast<size_t>(i)];
  std::vector<double> x = solve_linear(big, rhs);
  return symmetrized(from_flat(x, n, n));
}

Matrix gain_from_p(const RiccatiSystem& sys, const SquareMatrix& p) {
  // K = R^-1 B^T P
  Matrix bt_p = sys.b.transposed() * p;
  return solve_linear(sys.r, bt_p);
}

}  // namespace

Matrix kalman_gain(const SquareMatrix& p_prior, const FilterModel& model) {
  // S = C P- C^T + R (innovation covariance)
  Matrix cp = model.c * p_prior;
  Matrix s = cp * model.c.transposed() + model.r;
  Matrix rhs = cp;  // solve S K^T = C P-  =>  K = P- C^T S^-1
  Matrix kt;
  try {
    kt = solve_linear(s, rhs);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("kalman_gain: singular innovation covariance (") +
                             e.what() + ")");
  }
  return kt.transposed();
}

SquareMatrix covariance_update(const SquareMatrix& p_prior, const Matrix& k,
                               const FilterModel& model) {
  const int n = p_prior.rows;
  Matrix ikc = Matrix::identity(n) - k * model.c;
  Matrix p = ikc * p_prior * ikc.transposed() + k * model.r * k.transposed();
  return symmetrized(p);
}

SquareMatrix riccati_rhs(const SquareMatrix& p, const RiccatiSystem& sys) {
  Matrix ap = sys.a * p;
  Matrix bt_p = sys.b.transposed() * p;           // m x n
  Matrix rinv_bt_p = solve_linear(sys.r, bt_p);   // R^-1 B^T P
  Matrix quad = bt_p.transposed() * rinv_bt_p;    // P B R^-1 B^T P
  return ap + ap.transposed() - quad + sys.q;
}

GainTrajectory integrate_riccati(const RiccatiSystem& sys, const SquareMatrix& p0, double dt,
                                 double t_end) {
  if (dt <= 0.0 || t_end <= 0.0)
    throw std::invalid_argument("integrate_riccati: dt and t_end must be positive");
  const int n = sys.state_dim();
  auto rhs = [&sys, n](double, const std::vector<double>& y) {
    return riccati_rhs(from_flat(y, n, n), sys).a;
  };

  GainTrajectory traj;
  std::vector<double> p = symmetrized(p0).a;
  const int steps = static_cast<int>(std::llround(t_end / dt));
  for (int s = 0; s <= steps; ++s) {
    const double t = s * dt;
    SquareMatrix pm = from_flat(p, n, n);
    if (norm_max(pm) > 1e12)
      throw std::runtime_error("integrate_riccati: divergence at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.gains.push_back(gain_from_p(sys, pm));
    if (s == steps) break;
    p = rk4_step(rhs, p, t, dt);
    SquareMatrix sym = symmetrized(from_flat(p, n, n));
    p = sym.a;
  }
  return traj;
}

SquareMatrix solve_care(const RiccatiSystem& sys) {
  const int n = sys.state_dim();
  // Seed: integrate long enough that P is near the stabilizing solution.
  SquareMatrix p = Matrix::identity(n);
  {
    auto seed_rhs = [&sys, n](double, const std::vector<double>& y) {
      return riccati_rhs(from_flat(y, n, n), sys).a;
    };
    std::vector<double> y = p.a;
    const double dt = 0.01;
    for (int s = 0; s < 4000; ++s) {
      y = rk4_step(seed_rhs, y, s * dt, dt);
      y = symmetrized(from_flat(y, n, n)).a;
      if (norm_max(from_flat(y, n, n)) > 1e10) break;
    }
    p = from_flat(y, n, n);
  }

  // Newton-Kleinman: with S = B R^-1 B^T, solve at each step the Lyapunov
  // equation (A - P_i S) P_{i+1} + P_{i+1} (A - P_i S)^T + P_i S P_i + Q = 0.
  Matrix rinv_bt = solve_linear(sys.r, sys.b.transposed());
  Matrix s_mat = sys.b * rinv_bt;  // n x n
  const int max_iter = 60;
  for (int it = 0; it < max_iter; ++it) {
    Matrix closed = sys.a - p * s_mat;
    Matrix w = p * s_mat * p + sys.q;
    SquareMatrix p_next = solve_lyapunov(closed, w);
    const double delta = norm_fro(p_next - p);
    p = p_next;
    if (norm_fro(riccati_rhs(p, sys)) <= 1e-9) return p;
    if (delta < 1e-14) break;
  }
  if (norm_fro(riccati_rhs(p, sys)) <= 1e-9) return p;
  throw std::runtime_error("solve_care: Newton-Kleinman failed to reach residual 1e-9 (got " +
                           std::to_string(norm_fro(riccati_rhs(p, sys))) + ")");
}

std::vector<GainConvergenceRow> gain_convergence_experiment(const RiccatiSystem& sys, double dt,
                                                            double t_end) {
  if (sys.p0.empty())
    throw std::invalid_argument("gain_convergence_experiment: no initializations");
  SquareMatrix p_inf = solve_care(sys);
  Matrix k_inf = steady_state_gain(sys, p_inf);

  std::vector<GainConvergenceRow> rows;
  for (size_t init = 0; init < sys.p0.size(); ++init) {
    GainTrajectory traj = integrate_riccati(sys, sys.p0[init], dt, t_end);
    for (size_t s = 0; s < traj.times.size(); ++s) {
      GainConvergenceRow row;
      row.init_id = static_cast<int>(init);
      row.t = traj.times[s];
      row.gain = traj.gains[s].a;
      row.gain_inf = k_inf.a;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

RiccatiSystem reference_two_state_system() {
  RiccatiSystem sys;
  sys.a = Matrix::diag({0.9, 0.95});
  sys.b = Matrix::col({1.0, 1.0});
  sys.q = Matrix::identity(2);
  sys.r = Matrix(1, 1, {1.0});
  sys.p0.push_back(Matrix::identity(2));
  sys.p0.push_back(Matrix::diag({5.0, 5.0}));
  sys.p0.push_back(Matrix::diag({0.1, 10.0}));
  sys.p0.push_back(Matrix(2, 2, {2.0, 1.0, 1.0, 2.0}));
  // Near-low-rank: v v^T + 0.05 I with v = (1, 2)^T.
  sys.p0.push_back(Matrix(2, 2, {1.05, 2.0, 2.0, 4.05}));
  return sys;
}

Matrix steady_state_gain(const RiccatiSystem& sys, const SquareMatrix& p_inf) {
  return gain_from_p(sys, p_inf);
}

}  // namespace kalman
}  // namespace koss

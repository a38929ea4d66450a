#pragma once

#include <string>
#include <vector>

#include "koss/linalg.hpp"

namespace koss {
namespace kalman {

// Measurement-update side: x = C h + v with noise covariance R, process
// noise covariance Q under dynamics A.
struct FilterModel {
  SquareMatrix a;  // n x n
  Matrix c;        // m x n
  SquareMatrix r;  // m x m, symmetric positive definite
  SquareMatrix q;  // n x n, symmetric PSD
};

// Dual (control-form) Riccati quadruple with a set of initial covariances,
// dP/dt = A P + P A^T - P B R^-1 B^T P + Q and gain K = R^-1 B^T P.
struct RiccatiSystem {
  SquareMatrix a;           // n x n
  Matrix b;                 // n x m
  SquareMatrix q;           // n x n
  SquareMatrix r;           // m x m
  std::vector<SquareMatrix> p0;  // symmetric PSD initializations

  int state_dim() const { return a.rows; }
  int input_dim() const { return b.cols; }
};

struct GainTrajectory {
  std::vector<double> times;   // strictly increasing
  std::vector<Matrix> gains;   // K(t), m x n each
};

// K = P- C^T (C P- C^T + R)^-1.
Matrix kalman_gain(const SquareMatrix& p_prior, const FilterModel& model);

// Joseph form (I - K C) P- (I - K C)^T + K R K^T; PSD for any K.
SquareMatrix covariance_update(const SquareMatrix& p_prior, const Matrix& k,
                               const FilterModel& model);

// A P + P A^T - P B R^-1 B^T P + Q.
SquareMatrix riccati_rhs(const SquareMatrix& p, const RiccatiSystem& sys);

// RK4 integration of the Riccati ODE from p0, symmetrizing each step and
// recording K(t) = R^-1 B^T P(t) at every step (t = 0 included). Throws when
// ||P|| exceeds 1e12, message carries the blow-up time.
GainTrajectory integrate_riccati(const RiccatiSystem& sys, const SquareMatrix& p0, double dt,
                                 double t_end);

// Stabilizing CARE solution: Newton-Kleinman iteration seeded by a
// long-horizon integration; residual below 1e-9 Frobenius.
SquareMatrix solve_care(const RiccatiSystem& sys);

struct GainConvergenceRow {
  int init_id;
  double t;
  std::vector<double> gain;       // K(t), row-major m x n
  std::vector<double> gain_inf;   // CARE steady-state gain
};

// One row per recorded time per initialization, ordered by init_id then t.
std::vector<GainConvergenceRow> gain_convergence_experiment(const RiccatiSystem& sys, double dt,
                                                            double t_end);

// Fixed system of the two-state convergence study: A = diag(0.9, 0.95),
// B = [1 1]^T, Q = I, R = [1], with five PSD initializations ranging from
// scaled identities to a near-low-rank form.
RiccatiSystem reference_two_state_system();

Matrix steady_state_gain(const RiccatiSystem& sys, const SquareMatrix& p_inf);

}  // namespace kalman
}  // namespace koss

#include "koss/ode.hpp"

#include <stdexcept>

namespace koss {

std::vector<double> rk4_step(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
    const std::vector<double>& y, double t, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("rk4_step: dt must be positive");
  const size_t n = y.size();
  std::vector<double> k1 = f(t, y);
  std::vector<double> tmp(n);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  std::vector<double> k2 = f(t + 0.5 * dt, tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  std::vector<double> k3 = f(t + 0.5 * dt, tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  std::vector<double> k4 = f(t + dt, tmp);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace koss

#pragma once

#include <functional>
#include <vector>

namespace koss {

// Classical RK4 update for y' = f(t, y), flat state vector. Local error
// O(dt^5); caller owns step-size choice.
std::vector<double> rk4_step(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
    const std::vector<double>& y, double t, double dt);

}  // namespace koss

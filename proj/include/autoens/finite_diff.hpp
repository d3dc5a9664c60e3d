#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "autoens/error.hpp"

namespace autoens {

// Central-difference gradient of a scalar function. This is the independent
// oracle every analytic gradient in the library is checked against.
inline std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> x, double eps) {
  if (!(eps > 0.0)) {
    throw PreconditionError("finite_diff_gradient: eps must be > 0");
  }
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = fn(x);
    x[i] = saved - eps;
    const double down = fn(x);
    x[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error("finite_diff_gradient: non-finite function value at coordinate " +
                  std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace autoens

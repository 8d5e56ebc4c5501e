#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tweetslot::testing {

// Central finite difference d f / d x_i with step eps.
inline double central_difference(double& x, double eps, const std::function<double()>& f) {
  const double saved = x;
  x = saved + eps;
  const double up = f();
  x = saved - eps;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * eps);
}

// |a - n| / max(|a|, |n|); pairs where both are below `floor` compare
// absolutely against floor so that exact zeros do not divide by zero.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

}  // namespace tweetslot::testing

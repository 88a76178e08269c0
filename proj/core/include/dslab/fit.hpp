#pragma once

#include <vector>

namespace dslab {

/// Least-squares slope and r^2 of log y against log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dslab

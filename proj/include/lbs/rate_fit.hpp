#pragma once

#include <vector>

namespace lbs {

/// Errors below this are treated as round-off and excluded from fits.
inline constexpr double kNoiseFloor = 1e-12;

struct RateFit {
  double slope = 0.0;
  double residual = 0.0;  // RMS of the log-log fit residuals
  std::vector<double> eocs;  // log2(e_i / e_{i+1}) between consecutive used points
  std::vector<int> used;      // indices of the input points that entered the fit
  std::vector<int> excluded;  // indices dropped for falling below the noise floor
};

/// Least-squares slope of log(error) against log(h). Throws InsufficientData
/// when fewer than three usable points remain.
RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& errors);

/// Same fit restricted to the last `count` usable points.
RateFit fit_rate_tail(const std::vector<double>& h, const std::vector<double>& errors, int count = 3);

}  // namespace lbs

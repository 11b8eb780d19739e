#pragma once

#include <vector>

namespace semibloch {

// log(error) = order * log(eps) + intercept, least squares
struct OrderFit {
  double order = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of the log residuals
};

// needs >= 3 points, all errors > 0 and distinct eps > 0
OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& errors);

}  // namespace semibloch

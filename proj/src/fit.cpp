#include "semibloch/fit.hpp"

#include "semibloch/errors.hpp"

#include <cmath>
#include <string>

namespace semibloch {

OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw FitError("eps and error lists differ in length");
  if (eps.size() < 3) throw FitError("order fit needs at least 3 points, got " + std::to_string(eps.size()));
  const double n = static_cast<double>(eps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw FitError("eps values must be positive");
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw FitError("error values must be positive and finite (got " + std::to_string(errors[i]) + ")");
    double x = std::log(eps[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (std::abs(den) <= 1e-14 * std::max(1.0, n * sxx)) throw FitError("eps values must not all coincide");
  OrderFit f;
  f.order = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.order * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double r = std::log(errors[i]) - f.order * std::log(eps[i]) - f.intercept;
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace semibloch

#include "doctest.h"

#include "semibloch/errors.hpp"
#include "semibloch/fit.hpp"

#include <cmath>

using namespace semibloch;

TEST_CASE("order fit") {
  std::vector<double> eps{0.125, 0.0625, 0.03125};
  std::vector<double> sq, lin;
  for (double e : eps) {
    sq.push_back(3.7 * e * e);
    lin.push_back(0.2 * e);
  }
  OrderFit f = fit_order(eps, sq);
  CHECK(std::abs(f.order - 2.0) < 1e-10);
  CHECK(std::abs(f.intercept - std::log(3.7)) < 1e-10);
  CHECK(f.residual < 1e-12);
  CHECK(std::abs(fit_order(eps, lin).order - 1.0) < 1e-10);

  std::vector<double> noisy{1e-2, 2.4e-3, 6.9e-4};
  OrderFit g = fit_order(eps, noisy);
  CHECK(g.order > 1.8);
  CHECK(g.residual > 0.0);

  CHECK_THROWS_AS(fit_order({0.1, 0.05}, {1.0, 0.5}), FitError);
  CHECK_THROWS_AS(fit_order(eps, {1e-3, 0.0, 1e-4}), FitError);
  CHECK_THROWS_AS(fit_order(eps, {1e-3, -1e-4, 1e-4}), FitError);
  CHECK_THROWS_AS(fit_order({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}), FitError);
  CHECK_THROWS_AS(fit_order(eps, {1.0, 2.0}), FitError);
}

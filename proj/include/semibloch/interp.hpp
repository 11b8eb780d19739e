#pragma once

#include "semibloch/lattice.hpp"
#include "semibloch/types.hpp"

#include <vector>

namespace semibloch {

// Trigonometric interpolation of a real Gamma*-periodic field sampled on a KGrid.
// Negligible coefficients are dropped. An even-size Nyquist mode is carried by a cosine so the interpolant stays real.
class FourierInterpolant {
 public:
  FourierInterpolant() = default;
  FourierInterpolant(const KGrid& grid, const std::vector<double>& values);

  double value(const Vec& k) const;
  // order 0: value, 1: + gradient, 2: + Hessian (Cartesian)
  double evaluate(const Vec& k, int order, Vec* grad, Mat* hess) const;
  const KGrid& grid() const { return grid_; }

 private:
  KGrid grid_;
  struct Term {
    std::vector<int> index;  // raw per-axis index, m = index - N/2
    cplx coeff;
  };
  std::vector<Term> terms_;   // coefficients above 1e-17 of the largest
  Mat inv_dual_t_;            // B^{-T}
};

}  // namespace semibloch

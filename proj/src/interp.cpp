#include "semibloch/interp.hpp"

#include "semibloch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace semibloch {

FourierInterpolant::FourierInterpolant(const KGrid& grid, const std::vector<double>& values) : grid_(grid) {
  if (values.size() != grid.size()) throw GridShapeError("field size does not match its k-grid");
  const int d = grid.dim();
  const auto& n = grid.sizes();
  // separable DFT, axis by axis, on the centered index sets
  std::vector<cplx> data(values.begin(), values.end());
  std::size_t stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    const int na = n[a];
    std::vector<cplx> table(static_cast<std::size_t>(na) * na);
    for (int m = 0; m < na; ++m)
      for (int j = 0; j < na; ++j) {
        double s = (grid.centered(a, j) + grid.offset()[a]) / na;
        table[static_cast<std::size_t>(m) * na + j] = std::polar(1.0 / na, -kTwoPi * (m - na / 2) * s);
      }
    std::vector<cplx> in(na), out(na);
    for (std::size_t base = 0; base < grid.size(); ++base) {
      if ((base / stride) % na != 0) continue;
      for (int j = 0; j < na; ++j) in[j] = data[base + j * stride];
      for (int m = 0; m < na; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < na; ++j) acc += table[static_cast<std::size_t>(m) * na + j] * in[j];
        out[m] = acc;
      }
      for (int m = 0; m < na; ++m) data[base + m * stride] = out[m];
    }
    stride *= na;
  }
  double peak = 0.0;
  for (const auto& c : data) peak = std::max(peak, std::abs(c));
  std::vector<int> idx(d);
  for (std::size_t lin = 0; lin < data.size(); ++lin) {
    if (std::abs(data[lin]) <= 1e-17 * peak) continue;
    std::size_t r = lin;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(r % n[a]);
      r /= n[a];
    }
    terms_.push_back({idx, data[lin]});
  }
  inv_dual_t_ = grid.lattice().dual().inverse().transpose();
}

double FourierInterpolant::value(const Vec& k) const { return evaluate(k, 0, nullptr, nullptr); }

double FourierInterpolant::evaluate(const Vec& k, int order, Vec* grad, Mat* hess) const {
  const int d = grid_.dim();
  const auto& n = grid_.sizes();
  Vec s = grid_.lattice().to_fractional(k, Space::dual);
  double val = 0.0;
  Vec gs = Vec::Zero(d);
  Mat hs = Mat::Zero(d, d);
  cplx f0[3], f1[3], f2[3];
  for (const auto& t : terms_) {
    for (int a = 0; a < d; ++a) {
      const int na = n[a], i = t.index[a];
      if (na % 2 == 0 && i == 0) {
        // e^{-i pi o} cos(pi (N s - o)) agrees with e^{-i pi N s} on the grid
        const double o = grid_.offset()[a];
        const double w = kPi * na;
        const cplx ph = std::polar(1.0, -kPi * o);
        const double arg = w * s[a] - kPi * o;
        f0[a] = ph * std::cos(arg);
        f1[a] = -w * ph * std::sin(arg);
        f2[a] = -w * w * ph * std::cos(arg);
      } else {
        double w = kTwoPi * (i - na / 2);
        cplx e = std::polar(1.0, w * s[a]);
        f0[a] = e;
        f1[a] = kI * w * e;
        f2[a] = -w * w * e;
      }
    }
    cplx prod = t.coeff;
    for (int a = 0; a < d; ++a) prod *= f0[a];
    val += prod.real();
    if (order >= 1)
      for (int a = 0; a < d; ++a) {
        cplx g = t.coeff;
        for (int b = 0; b < d; ++b) g *= (a == b ? f1[b] : f0[b]);
        gs[a] += g.real();
      }
    if (order >= 2)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          cplx h = t.coeff;
          for (int e = 0; e < d; ++e) {
            if (a == b && e == a) h *= f2[e];
            else if (e == a || e == b) h *= f1[e];
            else h *= f0[e];
          }
          hs(a, b) += h.real();
          if (a != b) hs(b, a) += h.real();
        }
  }
  if (grad && order >= 1) *grad = inv_dual_t_ * gs;
  if (hess && order >= 2) *hess = inv_dual_t_ * hs * inv_dual_t_.transpose();
  return val;
}

}  // namespace semibloch

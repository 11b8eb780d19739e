#include "doctest.h"
#include "support.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/fields.hpp"

using namespace semibloch;
using namespace testsupport;

namespace {

ExternalFields mixed_3d() {
  PresetParams p;
  p.phi_terms = {{vec({0.3, -0.2, 0.1}), cplx(0.4, 0.1)}, {vec({0.0, 0.5, 0.0}), cplx(0.0, -0.3)}};
  p.A_terms = {{{vec({0.1, 0.2, -0.3}), cplx(0.2, 0.5)}},
               {{vec({-0.4, 0.0, 0.2}), cplx(0.3, 0.0)}},
               {{vec({0.2, 0.2, 0.2}), cplx(-0.1, 0.2)}, {vec({0.0, -0.3, 0.1}), cplx(0.25, 0.0)}}};
  ExternalFields f = preset("custom-fourier", 3, p);
  PresetParams w;
  w.E0 = 0.2;
  w.B0 = 0.3;
  w.length = 4.0;
  w.direction = vec({1.0, 2.0, -1.0});
  return combine(combine(f, preset("smooth-linear-phi", 3, w)), preset("smooth-uniform-B", 3, w));
}

}  // namespace

TEST_CASE("field presets") {
  for (int d = 1; d <= 3; ++d) {
    ExternalFields z = preset("zero", d, {});
    FieldPoint f = z.at(Vec::Constant(d, 0.7));
    CHECK(f.phi == 0.0);
    CHECK(f.A.norm() == 0.0);
    CHECK(f.B.norm() == 0.0);
    CHECK(!z.has_vector_potential());
  }
  PresetParams p;
  p.E0 = 0.5;
  p.length = 20.0;
  ExternalFields lin = preset("smooth-linear-phi", 1, p);
  CHECK(lin.at(vec({0.0})).grad_phi[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(lin.phi(vec({0.0})) == 0.0);
  CHECK(lin.phi(vec({1.0})) == doctest::Approx(-0.5 * 20.0 * std::tanh(1.0 / 20.0)));
  // direction is normalized
  p.direction = vec({3.0, 4.0});
  FieldPoint f2 = preset("smooth-linear-phi", 2, p).at(vec({0.0, 0.0}));
  CHECK((f2.grad_phi - vec({-0.3, -0.4})).norm() < 1e-15);

  PresetParams b;
  b.B0 = 0.3;
  b.length = 10.0;
  ExternalFields mag = preset("smooth-uniform-B", 2, b);
  FieldPoint m = mag.at(vec({0.0, 0.0}));
  CHECK(m.B(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(m.B(1, 0) == doctest::Approx(-0.3).epsilon(1e-15));
  Vec h = vec({1e-5, 0.0}), k = vec({0.0, 1e-5});
  double fd = (mag.A(h)[1] - mag.A(-h)[1]) / 2e-5 - (mag.A(k)[0] - mag.A(-k)[0]) / 2e-5;
  CHECK(std::abs(fd - 0.3) < 1e-6);
  CHECK(mag.has_vector_potential());
  CHECK(!mag.band_limited());
  // nearly uniform over a region small against the window
  CHECK(std::abs(mag.B(vec({0.5, -0.4}))(0, 1) - 0.3) < 1e-3);

  ExternalFields mag3 = preset("smooth-uniform-B", 3, b);
  CHECK(mag3.B(vec({0.0, 0.0, 5.0}))(0, 1) == doctest::Approx(0.3));
  CHECK(mag3.B(Vec::Zero(3))(0, 2) == 0.0);
}

TEST_CASE("field preset errors") {
  CHECK_THROWS_AS(preset("uniform-E", 2, {}), FieldPresetError);
  CHECK_THROWS_AS(preset("smooth-uniform-B", 1, {}), FieldPresetError);
  PresetParams p;
  p.length = 0.0;
  CHECK_THROWS_AS(preset("smooth-linear-phi", 1, p), FieldPresetError);
  PresetParams q;
  q.A_terms = {{{vec({1.0}), cplx(1.0, 0.0)}}};
  CHECK_THROWS_AS(preset("custom-fourier", 2, q), FieldPresetError);
  PresetParams r;
  r.phi_terms = {{vec({1.0, 0.0}), cplx(1.0, 0.0)}};
  CHECK_THROWS_AS(preset("custom-fourier", 1, r), FieldPresetError);
  CHECK_THROWS_AS(combine(ExternalFields::zero(1), ExternalFields::zero(2)), FieldPresetError);
}

TEST_CASE("analytic field derivatives against finite differences") {
  ExternalFields f = mixed_3d();
  CHECK(!f.band_limited());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  const double h = 1e-5;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (int t = 0; t < 25; ++t) {
    Vec r = vec({u(rng), u(rng), u(rng)});
    FieldPoint p = f.at(r);
    for (int k = 0; k < 3; ++k) {
      Vec rp = r, rm = r;
      rp[k] += h;
      rm[k] -= h;
      FieldPoint pp = f.at(rp), pm = f.at(rm);
      CHECK(rel(p.grad_phi[k], (pp.phi - pm.phi) / (2 * h)) < 1e-6);
      for (int i = 0; i < 3; ++i) {
        CHECK(rel(p.hess_phi(k, i), (pp.grad_phi[i] - pm.grad_phi[i]) / (2 * h)) < 1e-6);
        CHECK(rel(p.jac_A(k, i), (pp.A[i] - pm.A[i]) / (2 * h)) < 1e-6);
        for (int j = 0; j < 3; ++j) {
          CHECK(rel(p.hess_A[j](k, i), (pp.jac_A(i, j) - pm.jac_A(i, j)) / (2 * h)) < 1e-6);
          CHECK(rel(p.grad_B[k](i, j), (pp.B(i, j) - pm.B(i, j)) / (2 * h)) < 1e-6);
        }
      }
    }
    CHECK((p.B + p.B.transpose()).norm() == 0.0);
    CHECK(closedness_residual(f, r) < 1e-6);
    // closedness also holds exactly for the analytic gradient
    double cyc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          cyc = std::max(cyc, std::abs(p.grad_B[k](i, j) + p.grad_B[i](j, k) + p.grad_B[j](k, i)));
    CHECK(cyc < 1e-14);
  }
}

TEST_CASE("Lorentz force") {
  PresetParams b;
  b.B0 = 0.7;
  ExternalFields mag = preset("smooth-uniform-B", 2, b);
  Vec F = lorentz_force(mag, vec({0.0, 0.0}), vec({1.0, 0.0}));
  // F_j = sum_i B_ji v_i, so v = e_1 gives (0, B_21) = (0, -B_12)
  CHECK(std::abs(F[0]) < 1e-15);
  CHECK(F[1] == doctest::Approx(-0.7));
  // perpendicular to v for a pure magnetic field
  Vec v = vec({0.3, -1.1});
  CHECK(std::abs(lorentz_force(mag, vec({0.4, 0.2}), v).dot(v)) < 1e-15);

  PresetParams e;
  e.E0 = 0.25;
  ExternalFields lin = preset("smooth-linear-phi", 2, e);
  Vec r = vec({1.5, -2.0});
  Vec Fe = lorentz_force(lin, r, vec({5.0, 3.0}));
  CHECK((Fe + lin.at(r).grad_phi).norm() < 1e-15);
  CHECK(lorentz_force(ExternalFields::zero(2), r, v).norm() == 0.0);
  // 1D: -phi'
  PresetParams e1;
  e1.E0 = 0.5;
  e1.length = 3.0;
  ExternalFields l1 = preset("smooth-linear-phi", 1, e1);
  CHECK(lorentz_force(l1, vec({0.8}), vec({2.0}))[0] == doctest::Approx(0.5 / std::pow(std::cosh(0.8 / 3.0), 2)));
  // linear in v
  ExternalFields both = combine(mag, lin);
  Vec v1 = vec({0.2, 0.9}), v2 = vec({-1.3, 0.4});
  FieldPoint fp = both.at(r);
  Vec lhs = lorentz_force(fp, 2.0 * v1 + v2) + lorentz_force(fp, Vec::Zero(2)) * 2.0;
  Vec rhs = 2.0 * lorentz_force(fp, v1) + lorentz_force(fp, v2);
  CHECK((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("sampled field bounds") {
  ExternalFields f = mixed_3d();
  FieldBounds b = sample_bounds(f, Vec::Constant(3, -20.0), Vec::Constant(3, 20.0), 2000);
  CHECK(b.samples == 2000);
  CHECK(std::isfinite(b.grad_B));
  CHECK(b.phi < std::abs(cplx(0.4, 0.1)) + 0.3 + 0.2 * 4.0 + 1e-12);
  CHECK(b.B > 0.0);
  FieldBounds z = sample_bounds(ExternalFields::zero(2), Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 10);
  CHECK(z.phi == 0.0);
  CHECK(z.B == 0.0);
}

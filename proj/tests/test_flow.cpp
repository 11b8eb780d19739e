#include "doctest.h"
#include "support.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/flow.hpp"

using namespace semibloch;
using namespace testsupport;

namespace {

ExternalFields window_2d(double E0 = 0.2, double B0 = 0.3, double L = 4.0) {
  PresetParams p;
  p.E0 = E0;
  p.B0 = B0;
  p.length = L;
  p.direction = vec({0.6, 0.8});
  return combine(preset("smooth-linear-phi", 2, p), preset("smooth-uniform-B", 2, p));
}

double dist(const FlowState& a, const FlowState& b) {
  return std::sqrt((a.r - b.r).squaredNorm() + (a.p - b.p).squaredNorm());
}

}  // namespace

TEST_CASE("vector field special cases") {
  auto b = symbol_band_2d();
  FlowState z{vec({0.3, -0.2}), vec({1.1, 0.4})};
  for (double e : {0.0, 0.2})
    for (FlowVariant v : {FlowVariant::leading, FlowVariant::corrected, FlowVariant::canonical}) {
      EffectiveModel m(b, ExternalFields::zero(2), e);
      FlowDerivative f = vector_field(m, v, z);
      CHECK(f.dp.norm() < 1e-15);
      CHECK((f.dr - b->at(z.p).grad_E).norm() < 1e-15);
    }
  // constant field at the window center: kappa' = E, r' = grad E + eps E_perp Omega
  PresetParams p;
  p.E0 = 0.15;
  p.direction = vec({0.6, -0.8});
  p.length = 50.0;
  EffectiveModel m(b, preset("smooth-linear-phi", 2, p), 0.1);
  FlowState c{Vec::Zero(2), vec({0.5, -0.7})};
  FlowDerivative f = vector_field(m, FlowVariant::corrected, c);
  Vec field = 0.15 * vec({0.6, -0.8});
  Vec perp = vec({-field[1], field[0]});
  BandPoint bp = b->at(c.p);
  CHECK((f.dp - field).norm() < 1e-15);
  CHECK((f.dr - (bp.grad_E + 0.1 * perp * bp.omega(0, 1))).norm() < 1e-14);
  CHECK(f.residual < 1e-14);
  // eps = 0 with B: corrected = leading
  EffectiveModel m0(b, window_2d(), 0.0);
  FlowState q{vec({0.7, 1.2}), vec({-0.3, 2.0})};
  FlowDerivative lead = vector_field(m0, FlowVariant::leading, q), corr = vector_field(m0, FlowVariant::corrected, q);
  CHECK((lead.dr - corr.dr).norm() < 1e-14);
  CHECK((lead.dp - corr.dp).norm() < 1e-14);
  // the canonical variant at eps = 0 is the leading one in the other chart
  FlowDerivative can = vector_field(m0, FlowVariant::canonical, {q.r, q.p + m0.fields().A(q.r)});
  CHECK((can.dr - lead.dr).norm() < 1e-14);
}

TEST_CASE("symplectic form") {
  auto b = symbol_band_2d();
  ExternalFields w = window_2d();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    Vec r = vec({u(rng), u(rng)}), k = vec({u(rng), u(rng)});
    EffectiveModel m(b, w, 0.2);
    PMat T = symplectic_form(m, r, k);
    CHECK((T + T.transpose()).norm() == 0.0);
    CHECK((T.topLeftCorner(2, 2) - w.B(r)).norm() == 0.0);
    CHECK((T.bottomRightCorner(2, 2) - 0.2 * b->at(k).omega).norm() == 0.0);
    CHECK(std::abs(symplectic_form(m.with_eps(0.0), r, k).determinant() - 1.0) < 1e-14);
    double bw = w.B(r)(0, 1) * b->at(k).omega(0, 1);
    CHECK(std::abs(T.determinant() - std::pow(1.0 - 0.2 * bw, 2)) < 1e-13);
    FlowDerivative f = vector_field(m, FlowVariant::corrected, {r, k});
    CHECK(f.residual < 1e-10);
    CHECK(std::abs(f.det_theta - T.determinant()) < 1e-13);
    // both lines of the corrected equations
    SymbolGrad g = m.H_sc_grad(r, k);
    CHECK((f.dp - (w.B(r) * f.dr - g.grad_r)).norm() < 1e-12);
    CHECK((f.dr - (g.grad_k - 0.2 * b->at(k).omega * f.dp)).norm() < 1e-12);
  }
  // exactly degenerate: 1 - eps B Omega = 0
  Lattice sq = square_lattice();
  TrigPolynomial E(sq, {{iv({1, 0}), -1.0, 0.0}});
  TrigPolynomial a2(sq, {{iv({1, 0}), 0.0, 0.5}});
  auto sing = std::make_shared<SymbolBand>(sq, E, std::vector<TrigPolynomial>{TrigPolynomial(sq, {}), a2});
  PresetParams p;
  p.B0 = 0.5;
  EffectiveModel bad(sing, preset("smooth-uniform-B", 2, p), 4.0);
  CHECK_THROWS_AS(vector_field(bad, FlowVariant::corrected, {Vec::Zero(2), Vec::Zero(2)}), NondegeneracyError);
}

TEST_CASE("free streaming and Bloch oscillation") {
  auto b1 = symbol_band_1d();
  EffectiveModel free(b1, ExternalFields::zero(1), 0.1);
  Trajectory tr = integrate(free, FlowVariant::corrected, {vec({0.5}), vec({kPi / 2})}, 3.0, 0.01);
  for (std::size_t i = 0; i < tr.t.size(); ++i) CHECK(std::abs(tr.z[i].r[0] - (0.5 + tr.t[i])) < 1e-12);
  CHECK(tr.t.back() == doctest::Approx(3.0));

  PresetParams p;
  p.E0 = 0.5;
  p.length = 1e5;
  EffectiveModel bo(b1, preset("smooth-linear-phi", 1, p), 0.1);
  const double F = 0.5, k0 = 0.3, period = kTwoPi / F;
  for (FlowVariant v : {FlowVariant::leading, FlowVariant::corrected}) {
    Trajectory t = integrate(bo, v, {vec({0.0}), vec({k0})}, period, period / 4000);
    for (std::size_t i = 0; i < t.t.size(); i += 250) {
      CHECK(std::abs(t.z[i].p[0] - (k0 + F * t.t[i])) < 1e-8);
      double r = (std::cos(k0) - std::cos(k0 + F * t.t[i])) / F;
      CHECK(std::abs(t.z[i].r[0] - r) < 1e-8);
    }
    CHECK(std::abs(t.back().r[0]) < 1e-8);
  }
}

TEST_CASE("integrator order and energy conservation") {
  auto b = symbol_band_2d();
  EffectiveModel m(b, window_2d(), 0.1);
  FlowState z{vec({0.2, -0.4}), vec({0.9, 0.3})};
  for (FlowVariant v : {FlowVariant::leading, FlowVariant::corrected, FlowVariant::canonical}) {
    SelfConvergence s = self_convergence(m, v, z, 5.0, 0.1);
    CHECK(s.order > 3.8);
    CHECK(s.order < 4.3);
  }
  Trajectory tr = integrate(m, FlowVariant::corrected, z, 10.0, 1e-3);
  CHECK(tr.energy_drift() < 1e-8);
  CHECK(tr.max_residual < 1e-10);
  CHECK(tr.t.size() == 10001);
  Trajectory coarse = integrate(m, FlowVariant::corrected, z, 10.0, 0.04);
  Trajectory fine = integrate(m, FlowVariant::corrected, z, 10.0, 0.02);
  CHECK(coarse.energy_drift() / fine.energy_drift() > 10.0);
  CHECK(integrate(m, FlowVariant::canonical, {z.r, z.p + m.fields().A(z.r)}, 10.0, 1e-2).energy_drift() < 1e-7);
  CHECK(integrate(m, FlowVariant::leading, z, 10.0, 1e-2).energy_drift() < 1e-7);
  // det Theta logged and away from zero
  for (double d : tr.det_theta) CHECK(d > 0.5);
  // leading and corrected agree at eps = 0
  FlowState a = flow_endpoint(m.with_eps(0.0), FlowVariant::leading, z, 3.0, 1e-2);
  FlowState c = flow_endpoint(m.with_eps(0.0), FlowVariant::corrected, z, 3.0, 1e-2);
  CHECK(dist(a, c) < 1e-12);
  // record_every thins the output but keeps the endpoint
  IntegrateOptions o;
  o.record_every = 100;
  Trajectory thin = integrate(m, FlowVariant::corrected, z, 10.0, 1e-3, o);
  CHECK(thin.t.size() == 101);
  CHECK(dist(thin.back(), tr.back()) == 0.0);
  CHECK_THROWS_AS(integrate(m, FlowVariant::corrected, z, 1.0, 0.0), Error);
  Trajectory zero = integrate(m, FlowVariant::corrected, z, 0.0, 0.1);
  CHECK(zero.t.size() == 1);
}

TEST_CASE("Liouville density is transported") {
  auto b = symbol_band_2d();
  EffectiveModel m(b, window_2d(0.3, 0.6, 2.0), 0.2);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 10; ++t) {
    FlowState z{vec({u(rng), u(rng)}), vec({u(rng), u(rng)})};
    CHECK(std::abs(liouville_divergence(m, z)) < 1e-6);
  }
  // without the density the flow is compressible
  FlowState z{vec({0.3, 0.2}), vec({0.4, -0.8})};
  const int d = 2;
  double div = 0.0;
  for (int c = 0; c < 2 * d; ++c) {
    FlowState p = z, q = z;
    (c < d ? p.r[c] : p.p[c - d]) += 1e-4;
    (c < d ? q.r[c] : q.p[c - d]) -= 1e-4;
    FlowDerivative fp = vector_field(m, FlowVariant::corrected, p), fq = vector_field(m, FlowVariant::corrected, q);
    div += ((c < d ? fp.dr[c] : fp.dp[c - d]) - (c < d ? fq.dr[c] : fq.dp[c - d])) / 2e-4;
  }
  CHECK(std::abs(div) > 1e-4);
}

TEST_CASE("canonical and kinetic charts agree to second order") {
  auto b1 = symbol_band_1d(0.2);
  PresetParams p;
  p.E0 = 0.3;
  p.length = 3.0;
  ExternalFields f1 = preset("smooth-linear-phi", 1, p);
  // A = 0, eps = 0: identical
  EffectiveModel m0(b1, f1, 0.0);
  FlowState z{vec({0.4}), vec({0.8})};
  Trajectory can = integrate(m0, FlowVariant::canonical, z, 2.0, 1e-2);
  Trajectory kin = kinetic_from_canonical_flow(m0, can);
  FlowState direct = flow_endpoint(m0, FlowVariant::corrected, z, 2.0, 1e-2);
  CHECK(dist(kin.back(), direct) < 1e-12);
  CHECK_THROWS_AS(kinetic_from_canonical_flow(m0, integrate(m0, FlowVariant::corrected, z, 1.0, 0.1)), Error);

  auto gap_of = [](const EffectiveModel& m, const FlowState& z0, double T) {
    CanonicalPoint c = m.corrected_to_canonical(z0.r, z0.p);
    Trajectory ct = integrate(m, FlowVariant::canonical, {c.r, c.k}, T, 2e-3, {0});
    FlowState mapped = kinetic_from_canonical_flow(m, ct).back();
    return dist(mapped, flow_endpoint(m, FlowVariant::corrected, z0, T, 2e-3));
  };
  std::vector<double> g1, g2, g2plain;
  PresetParams w;
  w.A_terms = {{{vec({0.4, 0.3}), cplx(0.3, 0.1)}}, {{vec({-0.2, 0.5}), cplx(0.2, 0.0)}}};
  ExternalFields f2 = combine(window_2d(0.2, 0.4, 3.0), preset("custom-fourier", 2, w));
  FlowState z2{vec({0.3, -0.2}), vec({0.7, 1.4})};
  for (double e : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    g1.push_back(gap_of(EffectiveModel(b1, f1, e), z, 2.0));
    EffectiveModel m2(symbol_band_2d(), f2, e);
    g2.push_back(gap_of(m2, z2, 2.0));
    // without the eps-dependent substitution, only first order
    CanonicalPoint c = m2.to_canonical(z2.r, z2.p);
    Trajectory ct = integrate(m2, FlowVariant::canonical, {c.r, c.k}, 2.0, 2e-3, {0});
    g2plain.push_back(dist(kinetic_from_canonical_flow(m2, ct, ChartMap::plain).back(),
                           flow_endpoint(m2, FlowVariant::corrected, z2, 2.0, 2e-3)));
  }
  for (std::size_t i = 0; i + 1 < g1.size(); ++i) {
    CHECK(std::log2(g1[i] / g1[i + 1]) > 1.7);
    CHECK(std::log2(g2[i] / g2[i + 1]) > 1.7);
    CHECK(std::log2(g2plain[i] / g2plain[i + 1]) < 1.3);
  }
}

TEST_CASE("momentum periodicity and observable transport") {
  auto b = symbol_band_2d();
  EffectiveModel m(b, window_2d(), 0.1);
  FlowState z{vec({0.2, 0.1}), vec({0.4, -0.6})};
  FlowState zs{z.r, z.p + square_lattice().dual().col(1)};
  FlowState a = flow_endpoint(m, FlowVariant::corrected, z, 2.0, 1e-2);
  FlowState c = flow_endpoint(m, FlowVariant::corrected, zs, 2.0, 1e-2);
  CHECK((a.r - c.r).norm() < 1e-12);
  CHECK((c.p - a.p - square_lattice().dual().col(1)).norm() < 1e-12);

  PhaseFunction obs = [](const Vec& r, const Vec& p) { return std::sin(r[0]) * std::cos(p[1]) + r[1]; };
  CHECK(transport_observable(m, FlowVariant::corrected, obs, z, 0.0, 0.1) == obs(z.r, z.p));
  PhaseFunction one = [](const Vec&, const Vec&) { return 1.0; };
  CHECK(transport_observable(m, FlowVariant::corrected, one, z, 3.0, 0.1) == 1.0);
  EffectiveModel free(b, ExternalFields::zero(2), 0.1);
  PhaseFunction fr = [](const Vec& r, const Vec&) { return std::cos(r[0]) + r[1] * r[1]; };
  double streamed = fr(z.r + 1.5 * b->at(z.p).grad_E, z.p);
  CHECK(std::abs(transport_observable(free, FlowVariant::corrected, fr, z, 1.5, 0.1) - streamed) < 1e-12);
}

TEST_CASE("ensembles are deterministic across thread counts") {
  auto b = symbol_band_2d();
  EffectiveModel m(b, window_2d(), 0.1);
  std::vector<FlowState> starts;
  for (int i = 0; i < 7; ++i) starts.push_back({vec({0.1 * i, -0.2}), vec({0.3, 0.2 * i})});
  auto one = flow_ensemble(m, FlowVariant::corrected, starts, 1.0, 1e-2, 1);
  auto three = flow_ensemble(m, FlowVariant::corrected, starts, 1.0, 1e-2, 3);
  for (std::size_t i = 0; i < starts.size(); ++i) CHECK(dist(one[i], three[i]) == 0.0);
}

TEST_CASE("Hall current of a filled band") {
  Lattice sq = square_lattice();
  auto model = std::make_shared<TwoLevelChernModel>(sq, -1.0);
  BandGeometry g = compute_geometry(solve_bands(model, KGrid(sq, {48, 48})), 0);
  HallCurrent h = hall_current(g, vec({0.1, 0.0}));
  CHECK(std::abs(h.current[0]) < 1e-12);
  CHECK(std::abs(h.current[1] + 0.1) < 1e-3);
  CHECK(std::abs(h.chern_plaquette - 1.0) < 1e-6);
  BandGeometry g2 = compute_geometry(solve_bands(model, KGrid(sq, {96, 96})), 0);
  HallCurrent h2 = hall_current(g2, vec({0.1, 0.0}));
  CHECK(std::abs(h2.current[1] - h.current[1]) < 1e-3 * std::abs(h.current[1]));
  HallCurrent hy = hall_current(g, vec({0.0, 0.2}));
  CHECK(hy.current[0] == doctest::Approx(0.2 * h.chern_quadrature));

  BlochSpectrum s = solve_bands(asymmetric_2d(hex_lattice(), false), PlaneWaveBasis(hex_lattice(), 14.0),
                                KGrid(hex_lattice(), {16, 16}, vec({0.5, 0.5})));
  HallCurrent z = hall_current(compute_geometry(s, 0), vec({0.1, 0.05}));
  CHECK(z.current.norm() < 1e-12);  // k-symmetric grid: exact pairwise cancellation
  CHECK_THROWS_AS(hall_current(compute_geometry(solve_bands(PeriodicPotential::cosine_series(line_lattice(), {1.0}),
                                                            PlaneWaveBasis(line_lattice(), 20.0), KGrid(line_lattice(), {8})),
                                               0),
                               vec({0.1})),
                  Error);
}

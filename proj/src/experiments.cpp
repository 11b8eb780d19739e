#include "semibloch/experiments.hpp"

#include "semibloch/bloch.hpp"
#include "semibloch/effective.hpp"
#include "semibloch/errors.hpp"
#include "semibloch/fields.hpp"
#include "semibloch/fit.hpp"
#include "semibloch/flow.hpp"
#include "semibloch/geometry.hpp"
#include "semibloch/quantum.hpp"
#include "semibloch/weyl_torus.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace semibloch {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Check below(std::string name, double v, double bound) { return {std::move(name), v, "<", bound, 0.0, v < bound}; }
Check at_least(std::string name, double v, double bound) { return {std::move(name), v, ">=", bound, 0.0, v >= bound}; }
Check within(std::string name, double v, double lo, double hi) {
  return {std::move(name), v, "in", lo, hi, v >= lo && v <= hi};
}

// ---------------------------------------------------------- reference models

Lattice line(double a = 1.0) {
  Mat m(1, 1);
  m << a;
  return Lattice(m);
}
Lattice square() { return Lattice(Mat(Mat::Identity(2, 2))); }
Lattice hexagonal() {
  Mat rows(2, 2);
  rows << 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
  return Lattice::from_rows(rows);
}
IVec ivec(std::initializer_list<int> v) {
  IVec g(static_cast<int>(v.size()));
  int i = 0;
  for (int x : v) g[i++] = x;
  return g;
}
Vec rvec(std::initializer_list<double> v) {
  Vec g(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) g[i++] = x;
  return g;
}

// real V with complex Fourier coefficients: no inversion symmetry
PeriodicPotential asymmetric_hex(const Lattice& lat) {
  std::vector<std::pair<IVec, cplx>> c;
  auto add = [&](IVec g, cplx v) {
    c.push_back({g, v});
    c.push_back({IVec(-g), std::conj(v)});
  };
  cplx ph = std::polar(1.0, 0.7);
  add(ivec({1, 0}), 1.2 * ph);
  add(ivec({0, 1}), cplx(0.8, 0.0));
  add(ivec({1, 1}), 0.6 * std::conj(ph));
  add(ivec({1, -1}), cplx(0.4, 0.0));
  add(ivec({2, 0}), 0.3 * ph);
  return PeriodicPotential(lat, c);
}

BlochSpectrum hex_spectrum(int n, double cutoff = 22.0, Vec offset = Vec()) {
  Lattice hex = hexagonal();
  SolveOptions o;
  o.check_convergence = false;
  return solve_bands(asymmetric_hex(hex), PlaneWaveBasis(hex, cutoff), KGrid(hex, {n, n}, offset), o);
}

std::shared_ptr<SymbolBand> cosine_band_1d() {
  Lattice l = line();
  TrigPolynomial E(l, {{ivec({1}), -1.0, 0.0}});
  TrigPolynomial a(l, {{ivec({0}), 0.3, 0.0}, {ivec({1}), 0.2, 0.0}});
  return std::make_shared<SymbolBand>(l, E, std::vector<TrigPolynomial>{a});
}

std::shared_ptr<SymbolBand> band_2d() {
  Lattice sq = square();
  TrigPolynomial E(sq, {{ivec({1, 0}), -1.0, 0.0}, {ivec({0, 1}), -0.5, 0.0}, {ivec({1, 1}), 0.2, 0.1}});
  TrigPolynomial a1(sq, {{ivec({0, 0}), 0.3, 0.0}, {ivec({0, 1}), 0.2, 0.0}});
  TrigPolynomial a2(sq, {{ivec({1, 0}), 0.0, 0.1}, {ivec({1, -1}), 0.05, 0.0}});
  TrigPolynomial m(sq, {{ivec({1, 0}), 0.15, 0.0}, {ivec({0, 1}), 0.0, 0.05}});
  return std::make_shared<SymbolBand>(sq, E, std::vector<TrigPolynomial>{a1, a2}, std::vector<TrigPolynomial>{m});
}

ExternalFields window_2d(double E0, double B0, double L) {
  PresetParams p;
  p.E0 = E0;
  p.B0 = B0;
  p.length = L;
  p.direction = rvec({0.6, 0.8});
  return combine(preset("smooth-linear-phi", 2, p), preset("smooth-uniform-B", 2, p));
}

double dist(const FlowState& a, const FlowState& b) {
  return std::sqrt((a.r - b.r).squaredNorm() + (a.p - b.p).squaredNorm());
}

// ---------------------------------------------------------------- criteria

void free_particle(CriterionResult& out) {
  double worst = 0.0;
  // 2D hexagonal and 1D, every grid point
  {
    Lattice hex = hexagonal();
    PlaneWaveBasis b(hex, 25.0);
    KGrid g(hex, {6, 6});
    SolveOptions o;
    o.check_convergence = false;
    BlochSpectrum s = solve_bands(PeriodicPotential::zero(hex), b, g, o);
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<double> ref;
      for (int i = 0; i < b.size(); ++i) ref.push_back(0.5 * (g.point(k) + b.vector(i)).squaredNorm());
      std::sort(ref.begin(), ref.end());
      for (int n = 0; n < b.size(); ++n) worst = std::max(worst, std::abs(s.energy(k, n) - ref[static_cast<std::size_t>(n)]));
    }
  }
  Lattice l = line();
  PlaneWaveBasis b1(l, 40.0);
  {
    KGrid g(l, {16});
    SolveOptions o;
    o.check_convergence = false;
    BlochSpectrum s = solve_bands(PeriodicPotential::zero(l), b1, g, o);
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<double> ref;
      for (int i = 0; i < b1.size(); ++i) ref.push_back(0.5 * (g.point(k) + b1.vector(i)).squaredNorm());
      std::sort(ref.begin(), ref.end());
      for (int n = 0; n < b1.size(); ++n) worst = std::max(worst, std::abs(s.energy(k, n) - ref[static_cast<std::size_t>(n)]));
    }
  }
  out.checks.push_back(below("max |E - sorted |k+G|^2/2| over grids", worst, 1e-12));
  SolveOptions o;
  o.check_convergence = false;
  BlochSpectrum at0 = solve_bands(PeriodicPotential::zero(l), b1, KGrid(l, {1}), o);
  out.checks.push_back(below("|E_0(0)|", std::abs(at0.energy(0, 0)), 1e-12));
  out.checks.push_back(below("|E_1(0) - 2 pi^2|", std::abs(at0.energy(0, 1) - 2.0 * kPi * kPi), 1e-12));
  out.info.push_back("E_1(0) = " + num(at0.energy(0, 1)));
}

void zak(CriterionResult& out) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  double norm_err = 0.0, inv_err = 0.0, phase_err = 0.0;
  for (const Lattice& l : {line(1.4), hexagonal()}) {
    const int nc = l.dim() == 1 ? 12 : 6;
    GridFunction psi(l, nc, 4);
    for (auto& v : psi.values) v = cplx(gauss(rng), gauss(rng));
    ZakGrid z = zak_forward(psi);
    norm_err = std::max(norm_err, std::abs(z.norm() - psi.norm()) / psi.norm());
    GridFunction back = zak_inverse(z);
    for (std::size_t q = 0; q < psi.size(); ++q) inv_err = std::max(inv_err, std::abs(back.values[q] - psi.values[q]));
    for (std::size_t k = 0; k < z.kgrid.size(); ++k) {
      Vec s = z.kgrid.fractional(k);
      auto at = zak_fiber_at(psi, s);
      for (std::size_t p = 0; p < z.fiber_size(); ++p) phase_err = std::max(phase_err, std::abs(at[p] - z.fiber(k)[p]));
      for (int a = 0; a < l.dim(); ++a) {
        Vec sh = s;
        sh[a] += 1.0;
        auto shifted = zak_fiber_at(psi, sh);
        for (std::size_t p = 0; p < z.fiber_size(); ++p) {
          double u = z.cell_fraction(p)[a];
          phase_err = std::max(phase_err, std::abs(shifted[p] - std::polar(1.0, -kTwoPi * u) * at[p]));
        }
      }
    }
  }
  out.checks.push_back(below("relative | |U psi| - |psi| |", norm_err, 1e-10));
  out.checks.push_back(below("max |U^-1 U psi - psi|", inv_err, 1e-10));
  out.checks.push_back(below("boundary phase residual", phase_err, 1e-10));
}

void geometry(CriterionResult& out) {
  std::vector<double> h, errs;
  for (int n : {16, 32, 64}) {
    BlochSpectrum s = hex_spectrum(n);
    PlaquetteField p = berry_curvature_plaquette(s, 0);
    SolveOptions o;
    o.check_convergence = false;
    BlochSpectrum c = solve_bands(s.model, p.centers, o);
    std::vector<Mat> om = berry_curvature(c, 0);
    double num2 = 0.0, den = 0.0;
    for (std::size_t k = 0; k < s.n_k(); ++k) {
      num2 += std::pow(p.curvature[k](0, 1) - om[k](0, 1), 2);
      den += om[k](0, 1) * om[k](0, 1);
    }
    h.push_back(1.0 / n);
    errs.push_back(std::sqrt(num2 / den));
  }
  OrderFit f = fit_order(h, errs);
  out.checks.push_back(within("plaquette vs sum-over-states curvature order (n = 16, 32, 64)", f.order, 1.7, 2.5));
  out.info.push_back("relative curvature errors " + num(errs[0]) + ", " + num(errs[1]) + ", " + num(errs[2]));

  double tr = berry_curvature_plaquette(hex_spectrum(16), 0).chern[0].chern;
  out.checks.push_back(below("|Chern| of a time-reversal-symmetric band", std::abs(tr), 1e-6));
  Lattice sq = square();
  auto model = std::make_shared<TwoLevelChernModel>(sq, -1.0);
  double c0 = berry_curvature_plaquette(solve_bands(model, KGrid(sq, {24, 24})), 0).chern[0].chern;
  out.checks.push_back(below("|Chern - 1| of the two-level model", std::abs(c0 - 1.0), 1e-6));
}

VecXc eigvec(const FiberHamiltonian& h, const Vec& k, int band, double* e = nullptr) {
  Eigen::SelfAdjointEigenSolver<MatXc> es(h.matrix(k));
  if (e) *e = es.eigenvalues()[band];
  return es.eigenvectors().col(band);
}

void moment(CriterionResult& out) {
  BlochSpectrum s = hex_spectrum(4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst = 0.0;
  const double step = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    Vec frac = rvec({u(rng), u(rng)});
    Vec k0 = s.grid.lattice().to_cartesian(frac, Space::dual);
    SolveOptions o;
    o.check_convergence = false;
    BlochSpectrum at = solve_bands(s.model, KGrid(s.grid.lattice(), {1, 1}, frac), o);
    double e0;
    VecXc c0 = eigvec(*s.model, k0, 0, &e0);
    std::vector<VecXc> d;
    for (int i = 0; i < 2; ++i) {
      Vec kp = k0, km = k0;
      kp[i] += step;
      km[i] -= step;
      VecXc cp = eigvec(*s.model, kp, 0), cm = eigvec(*s.model, km, 0);
      cp *= std::polar(1.0, -std::arg(c0.dot(cp)));
      cm *= std::polar(1.0, -std::arg(c0.dot(cm)));
      d.push_back((cp - cm) / (2 * step));
    }
    MatXc shifted = s.model->matrix(k0) - e0 * MatXc::Identity(s.n_states(), s.n_states());
    double m_fd = -(d[0].adjoint() * shifted * d[1])(0, 0).imag();
    double m_sos = rammal_wilkinson_at(at, 0, 0)(0, 1);
    worst = std::max(worst, std::abs(m_fd - m_sos) / std::abs(m_sos));
  }
  out.checks.push_back(below("max relative |M_sos - M_fd| at 10 random k", worst, 1e-3));
}

void flow_integrity(CriterionResult& out) {
  EffectiveModel m(band_2d(), window_2d(0.2, 0.3, 4.0), 0.1);
  FlowState z{rvec({0.2, -0.4}), rvec({0.9, 0.3})};
  double worst_order = 1e9;
  for (FlowVariant v : {FlowVariant::leading, FlowVariant::corrected, FlowVariant::canonical}) {
    SelfConvergence s = self_convergence(m, v, z, 5.0, 0.1);
    worst_order = std::min(worst_order, s.order);
    out.info.push_back(to_string(v) + " self-convergence order " + num(s.order));
  }
  out.checks.push_back(at_least("min RK4 self-convergence order", worst_order, 3.8));
  IntegrateOptions io;
  io.record_every = 1;
  Trajectory tr = integrate(m, FlowVariant::corrected, z, 10.0, 1e-3, io);
  out.checks.push_back(below("H_sc drift over T = 10 at h = 1e-3", tr.energy_drift(), 1e-8));
  out.checks.push_back(below("linear-solve residual", tr.max_residual, 1e-10));
  EffectiveModel ml(band_2d(), window_2d(0.3, 0.6, 2.0), 0.2);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double div = 0.0;
  for (int t = 0; t < 10; ++t) {
    FlowState q{rvec({u(rng), u(rng)}), rvec({u(rng), u(rng)})};
    div = std::max(div, std::abs(liouville_divergence(ml, q)));
  }
  out.checks.push_back(below("max |div(sqrt(det Theta) z')| at 10 random points", div, 1e-6));
}

void charts(CriterionResult& out) {
  auto gap_of = [](const EffectiveModel& m, const FlowState& z0, double T) {
    CanonicalPoint c = m.corrected_to_canonical(z0.r, z0.p);
    Trajectory ct = integrate(m, FlowVariant::canonical, {c.r, c.k}, T, 2e-3, {0});
    FlowState mapped = kinetic_from_canonical_flow(m, ct).back();
    return dist(mapped, flow_endpoint(m, FlowVariant::corrected, z0, T, 2e-3));
  };
  Lattice l = line();
  TrigPolynomial E(l, {{ivec({1}), -1.0, 0.0}, {ivec({2}), 0.2, 0.0}});
  TrigPolynomial a(l, {{ivec({0}), 0.3, 0.0}, {ivec({1}), 0.2, 0.0}});
  auto b1 = std::make_shared<SymbolBand>(l, E, std::vector<TrigPolynomial>{a});
  PresetParams p;
  p.E0 = 0.3;
  p.length = 3.0;
  p.A_terms = {{{rvec({0.7}), cplx(0.0, -0.2)}, {rvec({-0.7}), cplx(0.0, 0.2)}}};
  ExternalFields f1 = combine(preset("smooth-linear-phi", 1, p), preset("custom-fourier", 1, p));
  PresetParams w;
  w.A_terms = {{{rvec({0.4, 0.3}), cplx(0.3, 0.1)}}, {{rvec({-0.2, 0.5}), cplx(0.2, 0.0)}}};
  ExternalFields f2 = combine(window_2d(0.2, 0.4, 3.0), preset("custom-fourier", 2, w));
  FlowState z1{rvec({0.4}), rvec({0.8})}, z2{rvec({0.3, -0.2}), rvec({0.7, 1.4})};
  std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32}, g1, g2;
  for (double e : eps) {
    g1.push_back(gap_of(EffectiveModel(b1, f1, e), z1, 2.0));
    g2.push_back(gap_of(EffectiveModel(band_2d(), f2, e), z2, 2.0));
  }
  out.checks.push_back(at_least("1D endpoint-gap order", fit_order(eps, g1).order, 1.7));
  out.checks.push_back(at_least("2D endpoint-gap order", fit_order(eps, g2).order, 1.7));
  out.info.push_back("1D gaps " + num(g1[0]) + ", " + num(g1[1]) + ", " + num(g1[2]));
  out.info.push_back("2D gaps " + num(g2[0]) + ", " + num(g2[1]) + ", " + num(g2[2]));
}

void operator_egorov(CriterionResult& out, int threads) {
  const double w = 0.75, alpha = 0.5, lambda = 0.5;
  Lattice l = line();
  auto v1 = [](double x) { return rvec({x}); };
  PresetParams pp;
  pp.phi_terms = {FourierTerm{v1(w), cplx(lambda / 2, 0.0)}, FourierTerm{v1(-w), cplx(lambda / 2, 0.0)}};
  pp.A_terms = {{FourierTerm{v1(w), cplx(0.0, -alpha / 2)}, FourierTerm{v1(-w), cplx(0.0, alpha / 2)}}};
  ExternalFields fields = preset("custom-fourier", 1, pp);
  SymbolSeries a(l);
  a.add(ivec({0}), v1(w), 0.5);
  a.add(ivec({0}), v1(-w), 0.5);
  a.add(ivec({1}), v1(0.0), 0.25);
  a.add(ivec({-1}), v1(0.0), 0.25);
  a.add(ivec({1}), v1(w), 0.1);
  a.add(ivec({-1}), v1(-w), 0.1);
  std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32};
  for (int order : {1, 0}) {
    std::vector<double> gaps;
    for (double e : eps) {
      HeisenbergOptions o;
      o.flow_order = order;
      o.threads = threads;
      HeisenbergRun r = heisenberg_gap(EffectiveModel(cosine_band_1d(), fields, e), kTwoPi / w, a, o);
      gaps.push_back(r.max_gap());
    }
    double ord = fit_order(eps, gaps).order;
    if (order == 1)
      out.checks.push_back(at_least("interior gap order, flow of h0 + eps h1", ord, 1.7));
    else
      out.checks.push_back(within("interior gap order, flow of h0", ord, 0.8, 1.3));
    out.info.push_back(std::string(order ? "h0 + eps h1" : "h0") + " gaps " + num(gaps[0]) + ", " + num(gaps[1]) +
                       ", " + num(gaps[2]));
  }
}

void schrodinger_egorov(CriterionResult& out, int threads) {
  Lattice l = line();
  PeriodicPotential V = PeriodicPotential::cosine_series(l, {6.0, 1.8}, {0.0, 2.4});
  auto H = std::make_shared<SampledCellHamiltonian>(V, 8);
  SolveOptions so;
  so.threads = threads;
  auto band = std::make_shared<GridBand>(compute_geometry(solve_bands(H, KGrid(l, {64}), so), 0));
  const double box = 8.0;
  std::vector<double> eps{1.0 / 16, 1.0 / 32, 1.0 / 64}, corr, lead, canon;
  double boundary = 0.0, dtau_change = 0.0, tail = 0.0;
  for (double e : eps) {
    const int cells = static_cast<int>(std::lround(box / e));
    BlochSpectrum s = solve_bands(H, KGrid(l, {cells}), so);
    WavePacket psi0 = prepare_band_packet(s, PacketSpec{0.2, 0.5, 0.3, 0}, cells, 8, e);
    const double om = psi0.slow_frequency();
    PresetParams pp;
    pp.phi_terms = {FourierTerm{rvec({om}), cplx(-0.25, 0.0)}, FourierTerm{rvec({-om}), cplx(-0.25, 0.0)}};
    EffectiveModel model(band, preset("custom-fourier", 1, pp), e);
    Observable a(l, om);
    a.add(1, 0, cplx(0.0, -0.5));
    a.add(-1, 0, cplx(0.0, 0.5));
    a.add(2, 1, 0.1);
    a.add(-2, -1, 0.1);
    EgorovOptions o;
    o.times = {0.25, 0.5, 0.75, 1.0};
    o.boundary_tol = 1.0;
    o.dtau_tol = 1e-5;
    o.refit = RefitOptions{64, 80, 1e-6, threads};
    QuantumSeries q = heisenberg_series(psi0, V, model.fields(), a, o);
    auto sc = transported_series(psi0, a, model, FlowVariant::corrected, o);
    auto sl = transported_series(psi0, a, model, FlowVariant::leading, o);
    auto sk = transported_series(psi0, a, model, FlowVariant::canonical, o);
    for (const auto& x : sc) tail = std::max(tail, x.refit_tail);
    corr.push_back(combine_series(q, sc).max_gap());
    lead.push_back(combine_series(q, sl).max_gap());
    canon.push_back(combine_series(q, sk).max_gap());
    boundary = std::max(boundary, q.boundary);
    dtau_change = std::max(dtau_change, q.dtau_change);
  }
  out.checks.push_back(at_least("corrected-flow expectation gap order", fit_order(eps, corr).order, 1.5));
  std::vector<double> ratio;
  for (std::size_t i = 0; i < eps.size(); ++i) ratio.push_back(corr[i] / lead[i]);
  double worst = *std::max_element(ratio.begin(), ratio.end());
  out.checks.push_back(below("max corrected/leading gap ratio", worst, 1.0));
  bool decreasing = true;
  double worst_step = -1e300;
  for (std::size_t i = 0; i + 1 < ratio.size(); ++i) {
    decreasing = decreasing && ratio[i + 1] < ratio[i];
    worst_step = std::max(worst_step, ratio[i + 1] - ratio[i]);
  }
  out.checks.push_back({"largest ratio change as eps halves", worst_step, "decreasing", 0.0, 0.0, decreasing});
  out.checks.push_back(below("boundary density", boundary, 1e-8));
  out.checks.push_back(below("state change under dtau halving", dtau_change, 1e-5));
  out.checks.push_back(below("refit coefficient tail", tail, 1e-6));
  out.info.push_back("corrected gaps " + num(corr[0]) + ", " + num(corr[1]) + ", " + num(corr[2]));
  out.info.push_back("leading gaps " + num(lead[0]) + ", " + num(lead[1]) + ", " + num(lead[2]));
  out.info.push_back("canonical h0 + eps h1 gaps " + num(canon[0]) + ", " + num(canon[1]) + ", " + num(canon[2]));
  out.info.push_back("in 1D with A = 0 the corrected and leading kinetic flows coincide, so the ratio is 1");
}

void hall(CriterionResult& out) {
  Lattice sq = square();
  auto model = std::make_shared<TwoLevelChernModel>(sq, -1.0);
  BandGeometry g = compute_geometry(solve_bands(model, KGrid(sq, {48, 48})), 0);
  const Vec field = rvec({0.1, 0.0});
  HallCurrent h = hall_current(g, field);
  Vec expected = -rvec({-field[1], field[0]});
  out.checks.push_back(below("|j + E_perp| / |E_perp|, Chern-1 model", (h.current - expected).norm() / expected.norm(), 0.01));
  BlochSpectrum s = solve_bands(asymmetric_hex(hexagonal()), PlaneWaveBasis(hexagonal(), 14.0),
                                KGrid(hexagonal(), {16, 16}, rvec({0.5, 0.5})));
  HallCurrent z = hall_current(compute_geometry(s, 0), rvec({0.1, 0.05}));
  out.checks.push_back(below("|j|, time-reversal-symmetric band", z.current.norm(), 1e-6));
  out.info.push_back("two-level j = (" + num(h.current[0]) + ", " + num(h.current[1]) + ")");
}

void cross_quantization(CriterionResult& out) {
  Lattice l = line(1.2);
  WavePacket shape(l, 32, 8, 0.1);
  const double w = shape.slow_frequency();
  int tested = 0;
  Observable mixed(l, w);
  mixed.add(3, 1, cplx(0.3, 0.1));
  mixed.add(-1, 2, 0.4);
  mixed.add(1, -2, cplx(0.0, 0.2));
  double r = zak_consistency_residual(mixed, shape, &tested);
  out.checks.push_back(below("mixed symbol residual", r, 1e-8));
  out.checks.push_back({"test-space dimension", static_cast<double>(tested), "==", 128.0, 0.0, tested == 128});
  Observable mom(l, w), pos(l, w);
  mom.add(0, 1, cplx(0.3, 0.1));
  mom.add(0, -3, 0.5);
  pos.add(2, 0, cplx(0.3, 0.1));
  pos.add(-5, 0, 0.5);
  out.checks.push_back(below("momentum-only residual", zak_consistency_residual(mom, shape), 1e-10));
  out.checks.push_back(below("position-only residual", zak_consistency_residual(pos, shape), 1e-10));
}

}  // namespace

std::string Check::describe() const {
  std::ostringstream os;
  os << name << " = " << num(value);
  if (relation == "in")
    os << " in [" << num(lo) << ", " << num(hi) << "]";
  else if (relation == "decreasing")
    os << " (must be < 0)";
  else
    os << " " << relation << " " << num(lo);
  return os.str();
}

bool CriterionResult::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string CriterionResult::line() const {
  std::ostringstream os;
  os << (pass() ? "PASS" : "FAIL") << "  c" << id << " " << title << ":";
  bool first = true;
  for (const auto& c : checks) {
    os << (first ? " " : "; ") << (c.pass ? "" : "[fail] ") << c.describe();
    first = false;
  }
  return os.str();
}

const std::vector<int>& criterion_ids() {
  static const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return ids;
}

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "free-particle exactness";
    case 2: return "Zak unitarity and equivariance";
    case 3: return "geometry oracle equivalence";
    case 4: return "Rammal-Wilkinson cross-check";
    case 5: return "flow integrity";
    case 6: return "chart consistency";
    case 7: return "operator-level Egorov";
    case 8: return "full-Schroedinger Egorov";
    case 9: return "Hall current";
    case 10: return "cross-representation quantization";
    default: throw Error("unknown criterion " + std::to_string(id));
  }
}

double criterion_budget(int id) {
  switch (id) {
    case 1:
    case 2: return 1.0;
    case 7: return 600.0;
    case 8: return 1200.0;
    default: criterion_title(id); return 60.0;
  }
}

CriterionResult run_criterion(int id, int threads) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  r.budget = criterion_budget(id);
  auto t0 = std::chrono::steady_clock::now();
  switch (id) {
    case 1: free_particle(r); break;
    case 2: zak(r); break;
    case 3: geometry(r); break;
    case 4: moment(r); break;
    case 5: flow_integrity(r); break;
    case 6: charts(r); break;
    case 7: operator_egorov(r, threads); break;
    case 8: schrodinger_egorov(r, threads); break;
    case 9: hall(r); break;
    case 10: cross_quantization(r); break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.checks.push_back(below("runtime s", r.seconds, r.budget));
  return r;
}

}  // namespace semibloch

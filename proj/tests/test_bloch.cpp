#include "doctest.h"
#include "support.hpp"

#include "semibloch/errors.hpp"

#include <algorithm>

using namespace semibloch;
using namespace testsupport;

namespace {

PeriodicPotential cos_potential(double v) {
  // V(x) = 2 v cos(2 pi x)
  return PeriodicPotential::cosine_series(line_lattice(), {2.0 * v});
}

// dense reference Hamiltonian built directly from its matrix elements
double tridiagonal_ground(double v, double k, int m) {
  MatX h = MatX::Zero(2 * m + 1, 2 * m + 1);
  for (int i = 0; i <= 2 * m; ++i) {
    double g = kTwoPi * (i - m);
    h(i, i) = 0.5 * (k + g) * (k + g);
    if (i > 0) h(i, i - 1) = h(i - 1, i) = v;
  }
  return Eigen::SelfAdjointEigenSolver<MatX>(h).eigenvalues()[0];
}

}  // namespace

TEST_CASE("potential realness and evaluation") {
  Lattice l = line_lattice();
  CHECK_THROWS_AS(PeriodicPotential(l, {{iv({1}), cplx(1.0, 0.0)}}), Error);
  PeriodicPotential v = PeriodicPotential::cosine_series(l, {0.4}, {0.3});
  CHECK(v.value(vec({0.1})) == doctest::Approx(0.4 * std::cos(kTwoPi * 0.1) + 0.3 * std::sin(kTwoPi * 0.1)));
  CHECK(v.cutoff() == doctest::Approx(kTwoPi));
  CHECK(!v.inversion_symmetric());
  CHECK(cos_potential(0.2).inversion_symmetric());
  CHECK(v.coefficient(iv({5})) == cplx(0.0));
}

TEST_CASE("plane-wave basis ordering and symmetry") {
  PlaneWaveBasis b(hex_lattice(), 20.0);
  CHECK(b.find(iv({0, 0})) >= 0);
  for (int i = 0; i < b.size(); ++i) {
    CHECK(b.find(IVec(-b.coords(i))) >= 0);
    CHECK(b.vector(i).norm() <= 20.0 + 1e-9);
    if (i > 0) {
      const IVec& p = b.coords(i - 1);
      const IVec& q = b.coords(i);
      CHECK(std::lexicographical_compare(p.data(), p.data() + 2, q.data(), q.data() + 2));
    }
  }
  PlaneWaveBasis one(line_lattice(), kTwoPi);
  CHECK(one.size() == 3);
}

TEST_CASE("free particle spectra") {
  Lattice l = line_lattice();
  PlaneWaveBasis b(l, kTwoPi);
  PeriodicPotential zero = PeriodicPotential::zero(l);
  Eigen::SelfAdjointEigenSolver<MatXc> es(assemble_hper(vec({0.0}), zero, b));
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-14);
  CHECK(es.eigenvalues()[1] == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
  CHECK(es.eigenvalues()[2] == doctest::Approx(19.7392088).epsilon(1e-8));
  Eigen::SelfAdjointEigenSolver<MatXc> ep(assemble_hper(vec({kPi}), zero, b));
  CHECK(ep.eigenvalues()[0] == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-14));
  CHECK(ep.eigenvalues()[1] == doctest::Approx(4.9348022).epsilon(1e-8));

  // 2D: every grid point reproduces sorted |k+G|^2/2
  Lattice hex = hex_lattice();
  PlaneWaveBasis b2(hex, 25.0);
  KGrid g(hex, {6, 6});
  SolveOptions opts;
  opts.check_convergence = false;
  BlochSpectrum s = solve_bands(PeriodicPotential::zero(hex), b2, g, opts);
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::vector<double> ref;
    for (int i = 0; i < b2.size(); ++i) ref.push_back(0.5 * (g.point(k) + b2.vector(i)).squaredNorm());
    std::sort(ref.begin(), ref.end());
    for (int n = 0; n < b2.size(); ++n) REQUIRE(std::abs(s.energy(k, n) - ref[n]) < 1e-12);
  }
}

TEST_CASE("assembled matrix is Hermitian with exact kinetic diagonal") {
  Lattice hex = hex_lattice();
  PeriodicPotential v = asymmetric_2d(hex, false);
  PlaneWaveBasis b(hex, 30.0);
  Vec k = vec({0.3, -1.1});
  MatXc h = assemble_hper(k, v, b);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  for (int i = 0; i < b.size(); ++i)
    CHECK(h(i, i).real() == 0.5 * (k + b.vector(i)).squaredNorm() + v.coefficient(iv({0, 0})).real());
  CHECK_THROWS_AS(assemble_hper(k, v, PlaneWaveBasis(square_lattice(), 10.0)), LatticeMismatchError);
}

TEST_CASE("weak cosine potential opens a gap 2v at the zone edge") {
  const double v = 0.1;
  PeriodicPotential pot = cos_potential(v);
  double prev = 0.0;
  for (double cut : {4 * kTwoPi, 8 * kTwoPi, 16 * kTwoPi}) {
    PlaneWaveBasis b(line_lattice(), cut);
    Eigen::SelfAdjointEigenSolver<MatXc> es(assemble_hper(vec({kPi}), pot, b));
    double gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    CHECK(std::abs(gap - 2 * v) < v * v);
    if (prev != 0.0) CHECK(std::abs(gap - prev) < 1e-12);
    prev = gap;
  }
  CHECK(prev == doctest::Approx(0.1999987167622823).epsilon(1e-10));
}

TEST_CASE("strong cosine potential ground energy against brute force") {
  PeriodicPotential pot = cos_potential(1.0);
  PlaneWaveBasis b(line_lattice(), 10 * kTwoPi);
  KGrid g(line_lattice(), {16});
  BlochSpectrum s = solve_bands(pot, b, g);
  double e0 = s.energy(8, 0);  // k = 0
  CHECK(std::abs(e0 - tridiagonal_ground(1.0, 0.0, 40)) < 1e-12);
  CHECK(std::abs(e0 + 0.100870363579525) < 1e-11);
  CHECK(s.convergence.checked);
  CHECK(s.convergence.converged);
}

TEST_CASE("spectrum invariants") {
  Lattice hex = hex_lattice();
  PeriodicPotential v = asymmetric_2d(hex, true);
  PlaneWaveBasis b(hex, 22.0);
  KGrid g(hex, {8, 8});
  SolveOptions opts;
  opts.threads = 3;
  BlochSpectrum s = solve_bands(v, b, g, opts);
  SolveOptions serial;
  BlochSpectrum s1 = solve_bands(v, b, g, serial);
  CHECK((s.energies - s1.energies).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int n = 1; n < s.n_states(); ++n) REQUIRE(s.energy(k, n) >= s.energy(k, n - 1));
    MatXc c = s.vectors[k];
    REQUIRE((c.adjoint() * c - MatXc::Identity(c.cols(), c.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
  // equivariance: E(k + G*) assembled directly equals E(k) once converged
  auto model = PlaneWaveHamiltonian(v, PlaneWaveBasis(hex, 60.0));
  for (std::size_t k : {std::size_t(3), std::size_t(17), std::size_t(40)}) {
    Vec kk = g.point(k);
    VecX e0 = Eigen::SelfAdjointEigenSolver<MatXc>(model.matrix(kk), Eigen::EigenvaluesOnly).eigenvalues();
    VecX e1 = Eigen::SelfAdjointEigenSolver<MatXc>(model.matrix(Vec(kk + hex.dual().col(0) - hex.dual().col(1))),
                                                     Eigen::EigenvaluesOnly).eigenvalues();
    for (int n = 0; n < 4; ++n) CHECK(std::abs(e0[n] - e1[n]) < 1e-9);
  }
  // real potential: E(k) = E(-k)
  PeriodicPotential c1 = cos_potential(0.7);
  KGrid g1(line_lattice(), {16});
  BlochSpectrum s2 = solve_bands(c1, PlaneWaveBasis(line_lattice(), 12 * kTwoPi), g1);
  for (int j = 1; j < 8; ++j)
    for (int n = 0; n < 4; ++n) CHECK(std::abs(s2.energy(8 + j, n) - s2.energy(8 - j, n)) < 1e-10);
}

TEST_CASE("gap condition") {
  Lattice l = line_lattice();
  KGrid g(l, {16});
  PlaneWaveBasis b(l, 10 * kTwoPi);
  BlochSpectrum free = solve_bands(PeriodicPotential::zero(l), b, g);
  GapReport r = gap_check(free, 0);
  CHECK(!r.isolated);
  CHECK(r.gap < 1e-10);
  CHECK(r.argmin == 0);  // k = -pi
  BlochSpectrum s = solve_bands(PeriodicPotential::cosine_series(l, {2.0}), b, g);
  GapReport r2 = gap_check(s, 0);
  CHECK(r2.isolated);
  double direct = 1e300;
  for (std::size_t k = 0; k < g.size(); ++k) direct = std::min(direct, s.energy(k, 1) - s.energy(k, 0));
  CHECK(r2.gap == direct);
  CHECK(r2.gap > 1.0);
}

TEST_CASE("convergence reporting and strict mode") {
  Lattice l = line_lattice();
  KGrid g(l, {8});
  PeriodicPotential pot = PeriodicPotential::cosine_series(l, {6.0, 3.0});
  PlaneWaveBasis small(l, 2 * kTwoPi);
  SolveOptions opts;
  opts.n_bands = 2;
  BlochSpectrum s = solve_bands(pot, small, g, opts);
  CHECK(s.convergence.checked);
  CHECK(!s.convergence.converged);
  CHECK(!s.convergence.warnings.empty());
  opts.strict = true;
  CHECK_THROWS_AS(solve_bands(pot, small, g, opts), ConvergenceError);
  opts.n_bands = 4;
  opts.check_convergence = false;
  CHECK_THROWS_AS(solve_bands(pot, small, g, opts), ConvergenceError);
}

TEST_CASE("Zak transform of a plane wave on the grid") {
  Lattice l = line_lattice();
  const int nc = 8, nx = 6;
  for (int jj : {-4, -1, 0, 3, 11}) {
    double k0 = kTwoPi * jj / nc;
    GridFunction psi(l, nc, nx);
    for (std::size_t q = 0; q < psi.size(); ++q) psi.values[q] = std::exp(kI * k0 * psi.position(q)[0]);
    ZakGrid z = zak_forward(psi);
    Vec red = l.reduce(vec({k0}), Space::dual).reduced;
    for (std::size_t k = 0; k < z.kgrid.size(); ++k) {
      double w = 0.0;
      for (std::size_t p = 0; p < z.fiber_size(); ++p) w += std::norm(z.fiber(k)[p]);
      bool here = std::abs(z.kgrid.point(k)[0] - red[0]) < 1e-12;
      if (here) CHECK(w == doctest::Approx(psi.norm() * psi.norm()).epsilon(1e-12));
      else CHECK(w < 1e-20);
    }
  }
}

TEST_CASE("Zak unitarity, inverse and boundary phase") {
  std::mt19937_64 rng(11);
  for (const Lattice& l : {line_lattice(1.4), hex_lattice()}) {
    const int nc = l.dim() == 1 ? 12 : 6, nx = 4;
    GridFunction psi(l, nc, nx);
    psi.values = random_state(psi.size(), rng);
    ZakGrid z = zak_forward(psi);
    CHECK(std::abs(z.norm() - psi.norm()) < 1e-10 * psi.norm());
    GridFunction back = zak_inverse(z);
    double err = 0.0;
    for (std::size_t q = 0; q < psi.size(); ++q) err = std::max(err, std::abs(back.values[q] - psi.values[q]));
    CHECK(err < 1e-10);
    // the defining sum at grid points matches, and shifting k by a dual vector multiplies by e^{-i y.G}
    for (std::size_t k : {std::size_t(0), std::size_t(5)}) {
      Vec s = z.kgrid.fractional(k);
      auto at = zak_fiber_at(psi, s);
      for (std::size_t p = 0; p < z.fiber_size(); ++p) CHECK(std::abs(at[p] - z.fiber(k)[p]) < 1e-10);
      for (int a = 0; a < l.dim(); ++a) {
        Vec sh = s;
        sh[a] += 1.0;
        auto shifted = zak_fiber_at(psi, sh);
        for (std::size_t p = 0; p < z.fiber_size(); ++p) {
          double u = z.cell_fraction(p)[a];
          CHECK(std::abs(shifted[p] - std::polar(1.0, -kTwoPi * u) * at[p]) < 1e-10);
        }
      }
    }
  }
  GridFunction bad(line_lattice(), 4, 4);
  bad.values.pop_back();
  CHECK_THROWS_AS(zak_forward(bad), GridShapeError);
}

TEST_CASE("momentum operator transforms to -i d/dy + k on fibers") {
  Lattice l = line_lattice();
  const int nc = 32, nx = 16;
  const int M = nc * nx;
  GridFunction psi(l, nc, nx);
  const double sig = 1.2, k0 = 0.9;
  for (std::size_t q = 0; q < psi.size(); ++q) {
    double x = psi.position(q)[0] + 0.5;
    psi.values[q] = std::exp(-x * x / (4 * sig * sig) + kI * k0 * x);
  }
  // spectral -i d/dx by a direct DFT on the full periodic box
  GridFunction dpsi = psi;
  std::vector<cplx> hat(M, 0.0);
  for (int m = 0; m < M; ++m) {
    int mm = m < M / 2 ? m : m - M;
    for (int q = 0; q < M; ++q) hat[m] += std::polar(1.0, -kTwoPi * mm * q / double(M)) * psi.values[q];
  }
  for (int q = 0; q < M; ++q) {
    cplx acc = 0.0;
    for (int m = 0; m < M; ++m) {
      int mm = m < M / 2 ? m : m - M;
      acc += (kTwoPi * mm / nc) * hat[m] * std::polar(1.0, kTwoPi * mm * q / double(M));
    }
    dpsi.values[q] = acc / double(M);
  }
  ZakGrid lhs = zak_forward(dpsi);
  ZakGrid rhs = zak_forward(psi);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < rhs.kgrid.size(); ++k) {
    double kk = rhs.kgrid.point(k)[0];
    std::vector<cplx> f(rhs.fiber(k), rhs.fiber(k) + nx), c(nx, 0.0);
    for (int g = 0; g < nx; ++g) {
      int gg = g < nx / 2 ? g : g - nx;
      for (int p = 0; p < nx; ++p) c[g] += std::polar(1.0, -kTwoPi * gg * (p / double(nx) - 0.5)) * f[p];
    }
    for (int p = 0; p < nx; ++p) {
      cplx acc = 0.0;
      for (int g = 0; g < nx; ++g) {
        int gg = g < nx / 2 ? g : g - nx;
        acc += (kTwoPi * gg + kk) * c[g] * std::polar(1.0, kTwoPi * gg * (p / double(nx) - 0.5));
      }
      err = std::max(err, std::abs(acc / double(nx) - lhs.fiber(k)[p]));
      scale = std::max(scale, std::abs(lhs.fiber(k)[p]));
    }
  }
  CHECK(err < 1e-10 * scale);
}

TEST_CASE("band projection") {
  Lattice l = line_lattice();
  const int nc = 16, nx = 8;
  KGrid g(l, {nc});
  PeriodicPotential pot = PeriodicPotential::cosine_series(l, {1.5}, {0.8});
  PlaneWaveBasis b(l, 3 * kTwoPi);
  BlochSpectrum s = solve_bands(pot, b, g);
  // Bloch states are fixed points of their own band and annihilated by the others
  for (std::size_t k : {std::size_t(2), std::size_t(9)}) {
    GridFunction st = bloch_state(s, 0, k, nx);
    CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-12));
    GridFunction p0 = band_project(st, s, 0);
    GridFunction p1 = band_project(st, s, 1);
    double d0 = 0.0;
    for (std::size_t q = 0; q < st.size(); ++q) d0 = std::max(d0, std::abs(p0.values[q] - st.values[q]));
    CHECK(d0 < 1e-8);
    CHECK(p1.norm() < 1e-8);
  }
  GridFunction psi(l, nc, nx);
  for (std::size_t q = 0; q < psi.size(); ++q) {
    double x = psi.position(q)[0];
    psi.values[q] = std::exp(-x * x / 8.0 + kI * 0.4 * x) * (1.0 + 0.3 * std::cos(kTwoPi * 3 * x));
  }
  GridFunction p = band_project(psi, s, 0);
  CHECK(p.norm() <= psi.norm());
  GridFunction pp = band_project(p, s, 0);
  double idem = 0.0;
  for (std::size_t q = 0; q < p.size(); ++q) idem = std::max(idem, std::abs(pp.values[q] - p.values[q]));
  CHECK(idem < 1e-8);
  std::vector<double> w = band_weights(psi, s);
  double sum = 0.0;
  for (double x : w) sum += x;
  CHECK(sum == doctest::Approx(psi.norm() * psi.norm()).epsilon(1e-12));
  CHECK(w[0] == doctest::Approx(p.norm() * p.norm()).epsilon(1e-10));
  CHECK(w.back() > 0.0);  // N_x = 8 points per cell, 7 plane waves

  BlochSpectrum free = solve_bands(PeriodicPotential::zero(l), b, g);
  CHECK_THROWS_AS(band_project(psi, free, 0), DegenerateBandError);
  GridFunction coarse(l, nc, 6);
  CHECK_THROWS_AS(band_project(coarse, s, 0), GridShapeError);
  GridFunction wrong(l, 8, nx);
  CHECK_THROWS_AS(band_project(wrong, s, 0), GridShapeError);
}

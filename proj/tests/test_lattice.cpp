#include "doctest.h"
#include "support.hpp"

#include "semibloch/errors.hpp"

using namespace semibloch;
using namespace testsupport;

TEST_CASE("dual basis biorthogonality") {
  Lattice l1 = line_lattice();
  CHECK(l1.dual()(0, 0) == doctest::Approx(kTwoPi).epsilon(1e-15));

  Lattice sq = square_lattice();
  CHECK((sq.dual() - kTwoPi * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  Lattice hex = hex_lattice();
  Mat b = hex.dual();
  // explicit reciprocal vectors of the triangular lattice
  CHECK(std::abs(b(0, 0) - kTwoPi) < 1e-12);
  CHECK(std::abs(b(1, 0) + kTwoPi / std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(b(0, 1)) < 1e-12);
  CHECK(std::abs(b(1, 1) - 2.0 * kTwoPi / std::sqrt(3.0)) < 1e-12);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(hex.direct().col(i).dot(b.col(j)) - (i == j ? kTwoPi : 0.0)) < 1e-12);
}

TEST_CASE("cell volumes multiply to (2 pi)^d") {
  Mat a(3, 3);
  a << 1.0, 0.2, 0.1, 0.0, 1.3, -0.4, 0.3, 0.0, 0.9;
  Lattice l(a);
  CHECK(l.cell_volume() * l.dual_cell_volume() == doctest::Approx(std::pow(kTwoPi, 3)).epsilon(1e-12));
  // the dual of the dual, rescaled by (2 pi)^2, is the direct basis again
  Mat back = dual_basis(l.dual());
  CHECK((back - a).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(l.dual().col(i).dot(back.col(j)) - (i == j ? kTwoPi : 0.0)) < 1e-12);
}

TEST_CASE("singular basis is rejected") {
  Mat a(2, 2);
  a << 1.0, 2.0, 0.5, 1.0;
  CHECK_THROWS_AS(Lattice{a}, DegenerateLatticeError);
  Mat z = Mat::Zero(1, 1);
  CHECK_THROWS_AS(dual_basis(z), DegenerateLatticeError);
}

TEST_CASE("reduce on the integer line") {
  Lattice l = line_lattice();
  CellPoint p = l.reduce(vec({1.7}), Space::direct);
  CHECK(p.reduced[0] == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(p.offset[0] == 2);
  p = l.reduce(vec({0.25}), Space::direct);
  CHECK(p.reduced[0] == 0.25);
  CHECK(p.offset[0] == 0);
  p = l.reduce(vec({0.5}), Space::direct);
  CHECK(p.reduced[0] == -0.5);
  CHECK(p.offset[0] == 1);
  p = l.reduce(vec({-0.5}), Space::direct);
  CHECK(p.reduced[0] == -0.5);
  CHECK(p.offset[0] == 0);
  // dual space: zone [-pi, pi)
  p = l.reduce(vec({kPi}), Space::dual);
  CHECK(p.reduced[0] == doctest::Approx(-kPi));
  CHECK(p.offset[0] == 1);
}

TEST_CASE("reduce decomposition on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (const Lattice& l : {line_lattice(1.3), hex_lattice()}) {
    for (Space s : {Space::direct, Space::dual}) {
      for (int t = 0; t < 10000; ++t) {
        Vec x(l.dim());
        for (int i = 0; i < l.dim(); ++i) x[i] = u(rng);
        CellPoint p = l.reduce(x, s);
        Vec back = p.reduced + l.lattice_vector(p.offset, s);
        REQUIRE((back - x).cwiseAbs().maxCoeff() < 1e-10);
        Vec f = l.to_fractional(p.reduced, s);
        REQUIRE(f.minCoeff() >= -0.5);
        REQUIRE(f.maxCoeff() < 0.5);
        CellPoint again = l.reduce(p.reduced, s);
        REQUIRE(again.offset.cwiseAbs().maxCoeff() == 0);
        REQUIRE((again.reduced - p.reduced).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("k-grid is centered, half-open and wraps") {
  Lattice l = line_lattice();
  KGrid g(l, {8});
  CHECK(g.size() == 8);
  CHECK(g.point(0)[0] == doctest::Approx(-kPi));
  CHECK(g.point(4)[0] == doctest::Approx(0.0));
  CHECK(g.point(7)[0] == doctest::Approx(kPi * 0.75));
  int w = 0;
  CHECK(g.neighbour(7, 0, 1, &w) == 0);
  CHECK(w == 1);
  CHECK(g.neighbour(0, 0, -1, &w) == 7);
  CHECK(w == -1);
  KGrid g2(square_lattice(), {4, 6});
  for (std::size_t i = 0; i < g2.size(); ++i) CHECK(g2.linear(g2.index(i)) == i);
  CHECK(g2.cell_measure() == doctest::Approx(kTwoPi * kTwoPi / 24.0));
  CHECK_THROWS_AS(KGrid(square_lattice(), {4}), GridShapeError);
}

#pragma once

#include "semibloch/bloch.hpp"
#include "semibloch/effective.hpp"
#include "semibloch/lattice.hpp"

#include <random>

namespace testsupport {

using namespace semibloch;

inline Lattice line_lattice(double a = 1.0) {
  Mat m(1, 1);
  m << a;
  return Lattice(m);
}

inline Lattice square_lattice() {
  Mat m = Mat::Identity(2, 2);
  return Lattice(m);
}

inline Lattice hex_lattice() {
  Mat rows(2, 2);
  rows << 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0;
  return Lattice::from_rows(rows);
}

inline IVec iv(std::initializer_list<int> v) {
  IVec g(static_cast<int>(v.size()));
  int i = 0;
  for (int x : v) g[i++] = x;
  return g;
}

inline Vec vec(std::initializer_list<double> v) {
  Vec g(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) g[i++] = x;
  return g;
}

// 2D potential; complex coefficients break inversion symmetry
inline PeriodicPotential asymmetric_2d(const Lattice& lat, bool inversion, double scale = 1.0) {
  std::vector<std::pair<IVec, cplx>> c;
  auto add = [&](IVec g, cplx v) {
    c.push_back({g, scale * v});
    c.push_back({IVec(-g), scale * std::conj(v)});
  };
  cplx ph = inversion ? cplx(1.0, 0.0) : std::polar(1.0, 0.7);
  add(iv({1, 0}), 1.2 * ph);
  add(iv({0, 1}), cplx(0.8, 0.0));
  add(iv({1, 1}), 0.6 * std::conj(ph));
  add(iv({1, -1}), cplx(0.4, 0.0));
  add(iv({2, 0}), 0.3 * ph);
  return PeriodicPotential(lat, c);
}

inline std::vector<cplx> random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

// E = -cos k, connection 0.3 + 0.2 cos k
inline std::shared_ptr<SymbolBand> symbol_band_1d(double second = 0.0) {
  Lattice l = line_lattice();
  TrigPolynomial E(l, {{iv({1}), -1.0, 0.0}, {iv({2}), second, 0.0}});
  TrigPolynomial a(l, {{iv({0}), 0.3, 0.0}, {iv({1}), 0.2, 0.0}});
  return std::make_shared<SymbolBand>(l, E, std::vector<TrigPolynomial>{a});
}

inline std::shared_ptr<SymbolBand> symbol_band_2d() {
  Lattice sq = square_lattice();
  TrigPolynomial E(sq, {{iv({1, 0}), -1.0, 0.0}, {iv({0, 1}), -0.5, 0.0}, {iv({1, 1}), 0.2, 0.1}});
  TrigPolynomial a1(sq, {{iv({0, 0}), 0.3, 0.0}, {iv({0, 1}), 0.2, 0.0}});
  TrigPolynomial a2(sq, {{iv({1, 0}), 0.0, 0.1}, {iv({1, -1}), 0.05, 0.0}});
  TrigPolynomial m(sq, {{iv({1, 0}), 0.15, 0.0}, {iv({0, 1}), 0.0, 0.05}});
  return std::make_shared<SymbolBand>(sq, E, std::vector<TrigPolynomial>{a1, a2}, std::vector<TrigPolynomial>{m});
}

}  // namespace testsupport

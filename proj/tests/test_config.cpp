#include "doctest.h"
#include "semibloch/config.hpp"
#include "support.hpp"

#include <string>

using namespace semibloch;
using testsupport::iv;
using testsupport::vec;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    std::string w = e.what();
    CHECK(w.rfind("cfg.yaml:", 0) == 0);
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: minimal 1D file takes defaults") {
  RunConfig c = parse_config("lattice: [[1.0]]\n");
  CHECK(c.lattice_rows.rows() == 1);
  CHECK(c.potential.solver == "plane-wave");
  CHECK(c.grid == std::vector<int>{64});
  CHECK(c.fields.preset == "zero");
  CHECK(c.eps.size() == 3);
  CHECK(c.flow.starts.size() == 1);
  CHECK(c.selftest.size() == 9);
}

TEST_CASE("config: full hex file") {
  const char* text = R"(seed: 11
threads: 1
lattice:
  - [1.0, 0.0]
  - [0.5, 0.8660254037844386]
potential:
  solver: plane-wave
  cutoff: 25
  coefficients:
    - [[1, 0], 0.3, 0.1]
    - [[-1, 0], 0.3, -0.1]
    - [[0, 1], 0.3, 0.0]
    - [[0, -1], 0.3, 0.0]
band: 0
grid: [12, 12]
fields:
  preset: smooth-uniform-B
  B0: 0.2
  length: 6
eps: [0.1, 0.05, 0.025]
flow:
  variant: leading
  t_final: 1
  step: 0.01
  starts:
    - {r: [0, 0], p: [0.1, 0.2]}
hall:
  field: [0.0, 0.1]
)";
  RunConfig c = parse_config(text);
  CHECK(c.seed == 11);
  CHECK(c.potential.coefficients.size() == 4);
  CHECK(c.potential.cutoff == doctest::Approx(25));
  CHECK(c.fields.params.B0 == doctest::Approx(0.2));
  CHECK(c.flow.variant == FlowVariant::leading);
  CHECK(c.flow.starts[0].p[1] == doctest::Approx(0.2));
  CHECK(c.hall.field[1] == doctest::Approx(0.1));
  ExternalFields f = make_fields(c);
  CHECK(make_lattice(c).dim() == 2);
  CHECK(make_potential(c).coefficient(iv({1, 0})).imag() == doctest::Approx(0.1));
  (void)f;
}

TEST_CASE("config: errors carry the line") {
  CHECK(error_line("lattice: [[1.0]]\nbogus: 3\n") == 2);
  CHECK(error_line("lattice: [[1.0]]\npotential:\n  solver: magic\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\neps: [0.1, 0.9]\n") == 2);
  CHECK(error_line("lattice: [[1.0]]\nflow:\n  step: -1\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\nflow:\n  variant: sideways\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\ngrid: [8, 8]\n") == 2);
  CHECK(error_line("lattice: [[1.0]]\nthreads: many\n") == 2);
  CHECK(error_line("lattice: [[1.0]\n") >= 1);  // malformed YAML
  CHECK(error_line("seed: 1\n") == 1);          // lattice missing
  CHECK(error_line("lattice:\n  - [1, 0]\n  - [2, 0]\n") == 2);  // degenerate
  CHECK(error_line("lattice: [[1.0]]\npotential:\n  coefficients:\n    - [[1], 0.5, 0.1]\n") == 4);
  CHECK(error_line("lattice: [[1.0]]\nfields:\n  preset: vortex\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\nselftest:\n  criteria: [11]\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\negorov_quantum:\n  points: 7\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\negorov_operator:\n  flow_orders: [2]\n") == 3);
  CHECK(error_line("lattice: [[1.0]]\negorov_operator:\n  times: [1, 0.5]\n") == 3);
}

TEST_CASE("config: messages name the problem") {
  CHECK(error_text("lattice: [[1.0]]\nbogus: 3\n").find("unknown key 'bogus'") != std::string::npos);
  std::string cut = error_text("lattice: [[1.0]]\npotential:\n  cutoff: 3\n  coefficients:\n    - [[2], 1, 0]\n    - [[-2], 1, 0]\n");
  CHECK(cut.find("floor") != std::string::npos);
  CHECK(cut.rfind("cfg.yaml:3:", 0) == 0);
  CHECK(error_text("lattice: [[1.0]]\npotential:\n  solver: two-level\n").find("2D") != std::string::npos);
}

TEST_CASE("config: hash is of the bytes") {
  RunConfig a = parse_config("lattice: [[1.0]]\n");
  RunConfig b = parse_config("lattice: [[1.0]]\n");
  RunConfig c = parse_config("lattice: [[1.0]]  \n");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("config: builders") {
  const char* text = R"(lattice: [[1.0]]
potential:
  solver: sampled-cell
  points: 8
  coefficients:
    - [[1], 0.5, 0]
    - [[-1], 0.5, 0]
grid: [16]
fields:
  preset: custom-fourier
  phi:
    - {freq: [0.5], re: 0.25}
    - {freq: [-0.5], re: 0.25}
symbol_band:
  energy:
    - [[1], -1.0, 0.0]
  connection:
    - [[[0], 0.3, 0.0], [[1], 0.2, 0.0]]
egorov_quantum:
  observable:
    - {mode: 1, shift: 0, im: -0.5}
    - {mode: -1, shift: 0, im: 0.5}
egorov_operator:
  period: 12.566370614359172
  observable:
    - {shift: [1], freq: [0.5], re: 0.1}
)";
  RunConfig c = parse_config(text);
  auto H = make_hamiltonian(c);
  CHECK(H->describe() == "sampled-cell");
  CHECK(H->sampled_points() == 8);
  auto band = make_band(c);
  CHECK(band->describe() == "symbol band");
  Vec k = vec({0.7});
  CHECK(band->at(k).E == doctest::Approx(-std::cos(0.7)));
  CHECK(band->at(k).conn[0] == doctest::Approx(0.3 + 0.2 * std::cos(0.7)));
  ExternalFields f = make_fields(c);
  (void)f;
  Observable a = make_box_observable(c, make_lattice(c), 0.25);
  CHECK(a.hermitian());
  CHECK(a.value(1.0, 0.0).real() == doctest::Approx(std::sin(0.25)));
  SymbolSeries s = make_symbol_observable(c, make_lattice(c));
  CHECK(s.size() == 1);

  // no symbol band: solver-backed band
  RunConfig g = parse_config("lattice: [[1.0]]\npotential:\n  coefficients:\n    - [[1], 0.5, 0]\n    - [[-1], 0.5, 0]\ngrid: [16]\n");
  auto gb = make_band(g);
  CHECK(gb->describe() != "symbol band");
  CHECK(make_hamiltonian(g)->describe() == "plane-wave");
}

#pragma once

#include "semibloch/bloch.hpp"
#include "semibloch/effective.hpp"
#include "semibloch/errors.hpp"
#include "semibloch/fields.hpp"
#include "semibloch/flow.hpp"
#include "semibloch/lattice.hpp"
#include "semibloch/quantum.hpp"
#include "semibloch/weyl_torus.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace semibloch {

// "file:line:column: message"
class ConfigError : public Error {
 public:
  ConfigError(const std::string& file, int line, int column, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct PotentialConfig {
  std::string solver = "plane-wave";  // plane-wave | sampled-cell | two-level
  double cutoff = 0.0;                // |G| bound of the basis; 0: automatic
  int points = 8;                     // sampled-cell points per cell
  double mass = -1.0;                 // two-level
  std::vector<std::pair<IVec, cplx>> coefficients;
};

struct FieldConfig {
  std::string preset = "zero";
  PresetParams params;
};

struct SymbolBandConfig {
  std::vector<TrigPolynomial::Term> energy;
  std::vector<std::vector<TrigPolynomial::Term>> connection, moment;
};

struct FlowStartConfig {
  Vec r, p;
};

struct FlowConfig {
  FlowVariant variant = FlowVariant::corrected;
  double t_final = 2.0;
  double step = 1e-3;
  int record_every = 10;
  std::vector<FlowStartConfig> starts;
};

struct HallConfig {
  Vec field;
};

struct ObservableTerm {
  IVec shift;  // k-harmonic, lattice coefficients
  Vec freq;    // egorov-operator: r frequency
  int mode = 0;  // egorov-quantum: multiple of the box frequency
  cplx coeff;
};

struct EgorovQuantumConfig {
  double box_length = 8.0;  // slow box length (eps * cells * |a|)
  int points = 8;
  double r0 = 0.2, k0 = 0.5, sigma = 0.3;
  std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  double dtau = 0.0;
  double flow_step = 0.01;
  int band_grid = 64;
  int r_modes = 64, k_modes = 80;
  double refit_tol = 1e-6;
  double dtau_tol = 1e-5;
  double boundary_tol = 1e-8;
  std::vector<FlowVariant> variants{FlowVariant::corrected, FlowVariant::leading};
  std::vector<ObservableTerm> observable;  // mode, shift[0]
  std::vector<double> eps;                 // empty: the top-level list
  std::optional<FieldConfig> fields;       // unset: the top-level fields
};

struct EgorovOperatorConfig {
  double period = 0.0;
  double interior = 2.0;
  std::vector<double> times{0.5, 1.0, 1.5, 2.0};
  double flow_step = 0.01;
  int k_modes = 64, r_modes = 64;
  double refit_tol = 1e-8;
  std::vector<int> flow_orders{1, 0};
  std::vector<ObservableTerm> observable;  // shift, freq
  std::vector<double> eps;
  std::optional<FieldConfig> fields;
};

struct RunConfig {
  std::string source;  // file name or "<string>"
  std::uint64_t hash = 0;
  unsigned seed = 7;
  std::string output;
  bool strict = false;
  int threads = 1;

  Mat lattice_rows;
  PotentialConfig potential;
  int band = 0;
  std::vector<int> grid;
  int bands = 4;
  FieldConfig fields;
  std::optional<SymbolBandConfig> symbol_band;
  std::vector<double> eps{0.125, 0.0625, 0.03125};
  FlowConfig flow;
  HallConfig hall;
  EgorovQuantumConfig egorov_quantum;
  EgorovOperatorConfig egorov_operator;
  std::vector<int> selftest{1, 2, 3, 4, 5, 6, 7, 9, 10};
};

RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

// FNV-1a of the bytes
std::uint64_t fnv1a(const std::string& bytes);

Lattice make_lattice(const RunConfig& c);
PeriodicPotential make_potential(const RunConfig& c);
std::shared_ptr<const FiberHamiltonian> make_hamiltonian(const RunConfig& c);
// configured cutoff, or max(4 max|G_V|, 6 max|b_i|)
double plane_wave_cutoff(const RunConfig& c);
ExternalFields make_fields(const RunConfig& c);
ExternalFields make_fields(const FieldConfig& f, int dim);
// symbol band if configured, else a band interpolated from the solver on `grid`
std::shared_ptr<const BandModel> make_band(const RunConfig& c);
Observable make_box_observable(const RunConfig& c, const Lattice& lat, double omega);
SymbolSeries make_symbol_observable(const RunConfig& c, const Lattice& lat);

}  // namespace semibloch

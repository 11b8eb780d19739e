#pragma once

#include "semibloch/lattice.hpp"
#include "semibloch/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace semibloch {

class PeriodicPotential {
 public:
  PeriodicPotential() = default;
  // coefficients keyed by integer dual coordinates; realness is enforced
  PeriodicPotential(const Lattice& lat, const std::vector<std::pair<IVec, cplx>>& coeffs);

  static PeriodicPotential zero(const Lattice& lat) { return PeriodicPotential(lat, {}); }
  // 1D convenience: V(x) = sum_m c_m cos(2 pi m x) + s_m sin(2 pi m x)
  static PeriodicPotential cosine_series(const Lattice& lat, const std::vector<double>& cos_coeffs,
                                         const std::vector<double>& sin_coeffs = {});

  const Lattice& lattice() const { return lat_; }
  cplx coefficient(const IVec& g) const;
  double cutoff() const { return cutoff_; }
  double value(const Vec& x) const;
  const std::map<std::vector<int>, cplx>& coefficients() const { return coeffs_; }
  bool inversion_symmetric(double tol = 1e-14) const;  // all coefficients real

 private:
  Lattice lat_;
  std::map<std::vector<int>, cplx> coeffs_;
  double cutoff_ = 0.0;
};

class PlaneWaveBasis {
 public:
  PlaneWaveBasis() = default;
  PlaneWaveBasis(const Lattice& lat, double cutoff);
  // coordinates -n/2 .. n/2 - 1 per axis: the modes of an n-point cell sampling
  static PlaneWaveBasis cell_grid(const Lattice& lat, int n);

  const Lattice& lattice() const { return lat_; }
  double cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(coords_.size()); }
  const IVec& coords(int i) const { return coords_[i]; }
  const Vec& vector(int i) const { return vectors_[i]; }
  int find(const IVec& g) const;  // -1 if absent
  int max_abs_coord() const;

 private:
  Lattice lat_;
  double cutoff_ = 0.0;
  std::vector<IVec> coords_;
  std::vector<Vec> vectors_;
  std::map<std::vector<int>, int> lookup_;
};

// Hermitian family H(k) on a finite basis with Gamma*-equivariance.
class FiberHamiltonian {
 public:
  virtual ~FiberHamiltonian() = default;
  virtual const Lattice& lattice() const = 0;
  virtual int size() const = 0;
  virtual MatXc matrix(const Vec& k) const = 0;
  virtual MatXc derivative(const Vec& k, int axis) const = 0;
  // coefficients of the eigenvector at k + sum_i shift_i b_i, given those at k
  virtual VecXc continue_vector(const VecXc& c, const IVec& shift) const = 0;
  // band-basis velocity matrix C^dag dH C
  virtual MatXc velocity(const Vec& k, const MatXc& vectors, int axis) const;
  // row `band` of the velocity matrix
  virtual VecXc velocity_row(const Vec& k, const MatXc& vectors, int band, int axis) const;
  virtual const PlaneWaveBasis* plane_waves() const { return nullptr; }
  // intra-cell points per axis when the model is the sampled grid operator itself
  virtual int sampled_points() const { return 0; }
  virtual std::string describe() const = 0;
};

MatXc assemble_hper(const Vec& k, const PeriodicPotential& V, const PlaneWaveBasis& basis);

class PlaneWaveHamiltonian : public FiberHamiltonian {
 public:
  PlaneWaveHamiltonian(PeriodicPotential V, PlaneWaveBasis basis);
  const Lattice& lattice() const override { return basis_.lattice(); }
  int size() const override { return basis_.size(); }
  MatXc matrix(const Vec& k) const override;
  MatXc derivative(const Vec& k, int axis) const override;
  VecXc continue_vector(const VecXc& c, const IVec& shift) const override;
  MatXc velocity(const Vec& k, const MatXc& vectors, int axis) const override;
  VecXc velocity_row(const Vec& k, const MatXc& vectors, int band, int axis) const override;
  const PlaneWaveBasis* plane_waves() const override { return &basis_; }
  std::string describe() const override { return "plane-wave"; }
  const PeriodicPotential& potential() const { return V_; }

 private:
  PeriodicPotential V_;
  PlaneWaveBasis basis_;
  MatXc potential_block_;
};

// Fiber of -1/2 d^2 + V sampled on n points per cell (what a split-step FFT
// propagator evolves): folded kinetic energy 1/2 xi^2 with xi in the grid's
// Nyquist band and the potential convolved modulo n. d = 1.
class SampledCellHamiltonian : public FiberHamiltonian {
 public:
  SampledCellHamiltonian(PeriodicPotential V, int points);
  const Lattice& lattice() const override { return basis_.lattice(); }
  int size() const override { return basis_.size(); }
  MatXc matrix(const Vec& k) const override;
  MatXc derivative(const Vec& k, int axis) const override;
  VecXc continue_vector(const VecXc& c, const IVec& shift) const override;
  const PlaneWaveBasis* plane_waves() const override { return &basis_; }
  int sampled_points() const override { return points_; }
  std::string describe() const override { return "sampled-cell"; }
  // folded momentum of basis state i at k
  double momentum(const Vec& k, int i) const;

 private:
  PeriodicPotential V_;
  PlaneWaveBasis basis_;
  int points_;
  MatXc potential_block_;
};

// Two-level d(k).sigma model with d = (sin s1, sin s2, m + cos s1 + cos s2),
// s_i = k . a_i. The lower band carries Chern number +1 for -2 < m < 0.
class TwoLevelChernModel : public FiberHamiltonian {
 public:
  TwoLevelChernModel(const Lattice& lat, double mass);
  const Lattice& lattice() const override { return lat_; }
  int size() const override { return 2; }
  MatXc matrix(const Vec& k) const override;
  MatXc derivative(const Vec& k, int axis) const override;
  VecXc continue_vector(const VecXc& c, const IVec&) const override { return c; }
  std::string describe() const override { return "two-level"; }
  Vec dvector(const Vec& k) const;

 private:
  Lattice lat_;
  double mass_;
};

struct SolveOptions {
  int n_bands = 4;            // bands whose convergence is checked
  double convergence_tol = 1e-8;
  bool check_convergence = true;
  int convergence_samples = 8;
  bool strict = false;
  int threads = 0;            // 0: library default
};

struct ConvergenceReport {
  bool checked = false;
  double max_change = 0.0;
  double tolerance = 0.0;
  bool converged = true;
  std::vector<std::string> warnings;
};

struct BlochSpectrum {
  std::shared_ptr<const FiberHamiltonian> model;
  KGrid grid;
  MatX energies;              // (k, state), ascending per row
  std::vector<MatXc> vectors; // per k, eigenvectors as columns
  ConvergenceReport convergence;

  int n_states() const { return static_cast<int>(energies.cols()); }
  std::size_t n_k() const { return grid.size(); }
  double energy(std::size_t k, int n) const { return energies(static_cast<Eigen::Index>(k), n); }
};

BlochSpectrum solve_bands(std::shared_ptr<const FiberHamiltonian> model, const KGrid& grid,
                          const SolveOptions& opts = {});
BlochSpectrum solve_bands(const PeriodicPotential& V, const PlaneWaveBasis& basis,
                          const KGrid& grid, const SolveOptions& opts = {});

struct GapReport {
  int band = 0;
  double gap = 0.0;          // C_g
  bool isolated = false;
  std::size_t argmin = 0;    // grid index of the closest approach
  double threshold = 0.0;
};

GapReport gap_check(const BlochSpectrum& s, int band, double threshold = 1e-6);

// Wavefunction on N_cells^d copies of the cell with N_x^d points per cell.
// Axis index q = (n + N_cells/2) N_x + p, fractional position n + p/N_x - 1/2.
struct GridFunction {
  Lattice lattice;
  int n_cells = 0;
  int n_x = 0;
  std::vector<cplx> values;

  GridFunction() = default;
  GridFunction(const Lattice& lat, int cells, int points);
  int dim() const { return lattice.dim(); }
  int axis_points() const { return n_cells * n_x; }
  std::size_t size() const { return values.size(); }
  Vec fractional(std::size_t q) const;
  Vec position(std::size_t q) const;
  double norm() const;
  // plain l2 inner product <this, other>
  cplx dot(const GridFunction& other) const;
  void normalize();
};

struct ZakGrid {
  Lattice lattice;
  int n_cells = 0;
  int n_x = 0;
  KGrid kgrid;
  std::vector<cplx> values;  // [k linear][intra-cell point linear]

  std::size_t fiber_size() const;
  cplx* fiber(std::size_t k) { return values.data() + k * fiber_size(); }
  const cplx* fiber(std::size_t k) const { return values.data() + k * fiber_size(); }
  double norm() const;
  // fractional intra-cell coordinate of fiber point p
  Vec cell_fraction(std::size_t p) const;
};

ZakGrid zak_forward(const GridFunction& psi);
GridFunction zak_inverse(const ZakGrid& phi);
// defining sum evaluated at an arbitrary fractional dual point (not reduced)
std::vector<cplx> zak_fiber_at(const GridFunction& psi, const Vec& k_fractional);

GridFunction band_project(const GridFunction& psi, const BlochSpectrum& s, int band);
// ||P_m psi||^2 per computed band, followed by the weight outside their span
std::vector<double> band_weights(const GridFunction& psi, const BlochSpectrum& s);
// Bloch state of band n at grid index k, on the grid of psi's shape
GridFunction bloch_state(const BlochSpectrum& s, int band, std::size_t k, int n_x);

}  // namespace semibloch

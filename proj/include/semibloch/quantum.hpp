#pragma once

#include "semibloch/bloch.hpp"
#include "semibloch/effective.hpp"
#include "semibloch/fields.hpp"
#include "semibloch/flow.hpp"
#include "semibloch/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace semibloch {

// Wavefunction psi(x) on a periodic box of N_cells cells, slow variable r = eps x.
// Only d = 1 is supported.
struct WavePacket {
  GridFunction psi;
  double eps = 1.0;

  WavePacket() = default;
  WavePacket(const Lattice& lat, int cells, int points, double eps);
  double spacing() const;          // a / N_x
  double box_length() const;       // N_cells a (microscopic)
  double slow_length() const { return eps * box_length(); }
  double slow_frequency() const;   // 2 pi / slow_length
  double norm() const { return psi.norm(); }
  double x(std::size_t q) const;
  std::size_t size() const { return psi.size(); }
};

// a(r, k) = sum_m e^{i m omega r} g_m(k), g_m(k) = sum_j c_{m j} e^{i j a k}.
class Observable {
 public:
  Observable() = default;
  Observable(const Lattice& lat, double omega) : lat_(lat), omega_(omega) {}

  void add(int m, int j, cplx c);
  const std::map<std::pair<int, int>, cplx>& coefficients() const { return coeffs_; }
  double omega() const { return omega_; }
  const Lattice& lattice() const { return lat_; }
  double period() const;  // |a|
  int max_mode() const;
  int max_harmonic() const;
  cplx value(double r, double k) const;
  // c_{-m,-j} = conj(c_{m j})
  bool hermitian(double tol = 1e-12) const;
  Observable& operator+=(const Observable& o);
  Observable scaled(cplx s) const;

 private:
  Lattice lat_;
  double omega_ = 0.0;
  std::map<std::pair<int, int>, cplx> coeffs_;
};

// Weyl quantization a(eps x, -i d/dx) applied to psi.
GridFunction apply_observable(const WavePacket& w, const Observable& a);
// <psi, a psi>; throws NonHermitianError for non-Hermitian symbols unless allowed.
double expectation(const WavePacket& w, const Observable& a, bool allow_non_hermitian = false);
cplx expectation_complex(const WavePacket& w, const Observable& a);

// Split-step propagator of i eps d_t psi = (-1/2 d_x^2 + V(x) + phi(eps x)) psi.
class Propagator {
 public:
  Propagator(const WavePacket& shape, const PeriodicPotential& V, const ExternalFields& fields, double dtau);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  double dtau() const { return dtau_; }
  // largest kinetic energy on the grid
  double nyquist_energy() const { return nyquist_; }
  void step(WavePacket& w, long long n) const;
  // macroscopic time t (microscopic t/eps) in uniform steps no larger than dtau
  void advance(WavePacket& w, double t) const;

 private:
  struct Plan;
  std::unique_ptr<Plan> plan_;
  double eps_ = 1.0, dtau_ = 0.0, nyquist_ = 0.0;
  std::vector<double> potential_, xi2_;
  void run(WavePacket& w, double dt, long long n) const;
};

// default step: 1 / (10 E_nyquist)
double default_dtau(const WavePacket& shape);
void propagate(WavePacket& w, const PeriodicPotential& V, const ExternalFields& fields, double t, double dtau);

struct PacketSpec {
  double r0 = 0.0;
  double k0 = 0.0;
  double sigma = 1.0;  // envelope width in r
  int band = 0;
};

// P_n applied to exp(-(eps x - r0)^2 / (2 sigma^2)) e^{i k0 x}, normalized
WavePacket prepare_band_packet(const BlochSpectrum& s, const PacketSpec& spec, int cells, int points, double eps);
// probability in the outer `fraction` of the box on each side
double boundary_density(const WavePacket& w, double fraction = 1.0 / 16.0);
// mean and spread of k in the Zak representation
struct ZakMoments {
  double mean = 0.0, spread = 0.0;
};
ZakMoments zak_moments(const WavePacket& w);

// Fourier refit of a sampled Gamma*-periodic, box-periodic symbol.
struct RefitOptions {
  int r_modes = 64;   // samples along r (even)
  int k_modes = 32;   // samples along k (even)
  double tol = 1e-8;  // coefficient tail allowed outside the inner 3/4 of the budget
  int threads = 0;
};
struct Refit {
  Observable observable;
  double tail = 0.0;
};
Refit refit_observable(const Lattice& lat, double slow_length, const std::function<double(double, double)>& f,
                       const RefitOptions& opts);

struct EgorovSample {
  double t = 0.0;
  double quantum = 0.0;
  double classical = 0.0;
  double gap = 0.0;
  double refit_tail = 0.0;
};

struct EgorovOptions {
  std::vector<double> times{0.5, 1.0};  // increasing, macroscopic
  double dtau = 0.0;                    // 0: default_dtau
  double flow_step = 0.01;
  RefitOptions refit;
  double boundary_tol = 1e-10;
  bool check_dtau = true;               // dtau-halving check before the run
  double dtau_tol = 1e-6;
};

struct QuantumSeries {
  std::vector<double> t, value;
  double boundary = 0.0;             // max boundary density seen
  double dtau_change = 0.0;          // state change (modulo phase) under dtau halving over a short window
};

// <psi(t), a psi(t)> with psi(t) = e^{-iHt/eps} psi0
QuantumSeries heisenberg_series(const WavePacket& psi0, const PeriodicPotential& V, const ExternalFields& fields,
                                const Observable& a, const EgorovOptions& opts);

// <psi0, (a o Phibar^t)^ psi0> through a Fourier refit of the transported symbol
std::vector<EgorovSample> transported_series(const WavePacket& psi0, const Observable& a, const EffectiveModel& model,
                                             FlowVariant variant, const EgorovOptions& opts);

struct EgorovRun {
  std::vector<EgorovSample> samples;
  double boundary = 0.0;
  double dtau_change = 0.0;
  double max_gap() const;
};

EgorovRun combine_series(const QuantumSeries& q, std::vector<EgorovSample> classical);
// |<psi0, e^{iHt/eps} a e^{-iHt/eps} psi0> - <psi0, (a o Phibar^t)^ psi0>|, A = 0 only.
// `model` provides the band used classically and the fields for both sides.
EgorovRun egorov_gap(const WavePacket& psi0, const PeriodicPotential& V, const Observable& a,
                     const EffectiveModel& model, FlowVariant variant, const EgorovOptions& opts);

}  // namespace semibloch

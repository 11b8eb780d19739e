#pragma once

#include "semibloch/effective.hpp"
#include "semibloch/geometry.hpp"
#include "semibloch/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace semibloch {

// leading: plain Lorentz dynamics of E(kappa) + phi(r)
// corrected: Theta_{B,eps} z' = dH_sc in (r, kappa)
// canonical: Hamilton's equations of h_cl in (r, k)
enum class FlowVariant { leading, corrected, canonical };
std::string to_string(FlowVariant v);
FlowVariant flow_variant_from(const std::string& s);

// (r, p) with p = kappa for leading/corrected and p = k for canonical
struct FlowState {
  Vec r, p;
};

// [[B, -I], [I, eps Omega]] at (r, kappa)
PMat symplectic_form(const EffectiveModel& m, const Vec& r, const Vec& kappa);

struct FlowDerivative {
  Vec dr, dp;
  double residual = 0.0;    // |Theta z' - dH| for the corrected variant
  double det_theta = 1.0;
  double condition = 1.0;
};

FlowDerivative vector_field(const EffectiveModel& m, FlowVariant v, const FlowState& z);
double flow_energy(const EffectiveModel& m, FlowVariant v, const FlowState& z);

struct Trajectory {
  FlowVariant variant = FlowVariant::corrected;
  std::vector<double> t;
  std::vector<FlowState> z;
  std::vector<double> energy;
  std::vector<double> det_theta;
  double max_residual = 0.0;

  const FlowState& back() const { return z.back(); }
  double energy_drift() const;  // max |H(t) - H(0)|
};

struct IntegrateOptions {
  int record_every = 1;  // 0: endpoints only
};

// classical RK4 with fixed step h; the last step is shortened to land on t_final
Trajectory integrate(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final, double h,
                     const IntegrateOptions& opts = {});
FlowState flow_endpoint(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final, double h);
std::vector<FlowState> flow_ensemble(const EffectiveModel& m, FlowVariant v, const std::vector<FlowState>& starts,
                                     double t_final, double h, int threads = 0);

// endpoint differences at h, h/2, h/4 -> log2 ratio
struct SelfConvergence {
  double order = 0.0;
  double diff_coarse = 0.0, diff_fine = 0.0;
};
SelfConvergence self_convergence(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final,
                                 double h);

// div(sqrt(det Theta) z') by centered differences; corrected variant
double liouville_divergence(const EffectiveModel& m, const FlowState& z, double h = 1e-4);

// canonical trajectory (r, k) -> kinetic (r, kappa): plain chart (eps-free) or full substitution chain
enum class ChartMap { plain, substitution };
Trajectory kinetic_from_canonical_flow(const EffectiveModel& m, const Trajectory& canonical,
                                       ChartMap map = ChartMap::substitution);

// a o Phi^t at z
using PhaseFunction = std::function<double(const Vec& r, const Vec& p)>;
double transport_observable(const EffectiveModel& m, FlowVariant v, const PhaseFunction& a, const FlowState& z,
                            double t, double h);

struct HallCurrent {
  Vec current;
  double chern_quadrature = 0.0;  // (1/2 pi) sum Omega dk over the grid
  double chern_plaquette = 0.0;
};
// j = -E_perp * chern_quadrature, E_perp = (-E_2, E_1)
HallCurrent hall_current(const BandGeometry& g, const Vec& field);

}  // namespace semibloch

#include "semibloch/flow.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/parallel.hpp"

#include <cmath>
#include <sstream>

namespace semibloch {

std::string to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::leading: return "leading";
    case FlowVariant::corrected: return "corrected";
    case FlowVariant::canonical: return "canonical";
  }
  return "?";
}

FlowVariant flow_variant_from(const std::string& s) {
  if (s == "leading") return FlowVariant::leading;
  if (s == "corrected") return FlowVariant::corrected;
  if (s == "canonical") return FlowVariant::canonical;
  throw Error("unknown flow variant '" + s + "' (leading, corrected, canonical)");
}

PMat symplectic_form(const EffectiveModel& m, const Vec& r, const Vec& kappa) {
  const int d = m.dim();
  PMat T = PMat::Zero(2 * d, 2 * d);
  T.topLeftCorner(d, d) = m.fields().B(r);
  T.topRightCorner(d, d) = -Mat::Identity(d, d);
  T.bottomLeftCorner(d, d) = Mat::Identity(d, d);
  T.bottomRightCorner(d, d) = m.eps() * m.band().at(kappa).omega;
  return T;
}

FlowDerivative vector_field(const EffectiveModel& m, FlowVariant v, const FlowState& z) {
  const int d = m.dim();
  FlowDerivative out;
  switch (v) {
    case FlowVariant::leading: {
      FieldPoint f = m.fields().at(z.r);
      out.dr = m.band().at(z.p).grad_E;
      out.dp = lorentz_force(f, out.dr);
      return out;
    }
    case FlowVariant::canonical: {
      SymbolGrad g = m.h_cl_grad(z.p, z.r);
      out.dr = g.grad_k;
      out.dp = -g.grad_r;
      return out;
    }
    case FlowVariant::corrected: break;
  }
  PMat T = symplectic_form(m, z.r, z.p);
  SymbolGrad g = m.H_sc_grad(z.r, z.p);
  PVec dH(2 * d);
  dH << g.grad_r, g.grad_k;
  Eigen::FullPivLU<PMat> lu(T);
  out.det_theta = lu.determinant();
  Eigen::JacobiSVD<PMat> svd(T);
  const auto& sv = svd.singularValues();
  out.condition = sv[0] / sv[2 * d - 1];
  if (!(std::abs(out.det_theta) > 1e-12) || !(out.condition < 1e12)) {
    std::ostringstream os;
    os << "symplectic form degenerate at r = " << z.r.transpose() << " (det = " << out.det_theta
       << "); eps * sup(|B Omega| + |Omega|) must stay below 1";
    throw NondegeneracyError(os.str());
  }
  PVec zdot = lu.solve(dH);
  out.residual = (T * zdot - dH).norm();
  out.dr = zdot.head(d);
  out.dp = zdot.tail(d);
  return out;
}

double flow_energy(const EffectiveModel& m, FlowVariant v, const FlowState& z) {
  switch (v) {
    case FlowVariant::leading: return m.H_leading(z.r, z.p);
    case FlowVariant::corrected: return m.H_sc(z.r, z.p);
    case FlowVariant::canonical: return m.h_cl(z.p, z.r);
  }
  return 0.0;
}

double Trajectory::energy_drift() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
  return worst;
}

namespace {

FlowState axpy(const FlowState& z, double a, const FlowDerivative& k) { return {z.r + a * k.dr, z.p + a * k.dp}; }

FlowState rk4_step(const EffectiveModel& m, FlowVariant v, const FlowState& z, double h, double* residual,
                   double* det) {
  FlowDerivative k1 = vector_field(m, v, z);
  FlowDerivative k2 = vector_field(m, v, axpy(z, 0.5 * h, k1));
  FlowDerivative k3 = vector_field(m, v, axpy(z, 0.5 * h, k2));
  FlowDerivative k4 = vector_field(m, v, axpy(z, h, k3));
  if (residual) *residual = std::max({k1.residual, k2.residual, k3.residual, k4.residual});
  if (det) *det = k1.det_theta;
  return {z.r + (h / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
          z.p + (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp)};
}

}  // namespace

Trajectory integrate(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final, double h,
                     const IntegrateOptions& opts) {
  if (!(h > 0.0)) throw Error("integration step must be positive");
  if (!(t_final >= 0.0)) throw Error("final time must be non-negative");
  if (start.r.size() != m.dim() || start.p.size() != m.dim()) throw Error("start point has wrong dimension");
  Trajectory tr;
  tr.variant = v;
  FlowState z = start;
  double t = 0.0;
  auto record = [&](double det) {
    tr.t.push_back(t);
    tr.z.push_back(z);
    tr.energy.push_back(flow_energy(m, v, z));
    tr.det_theta.push_back(det);
  };
  double det0 = v == FlowVariant::corrected ? vector_field(m, v, z).det_theta : 1.0;
  record(det0);
  long n = std::max(1L, std::lround(t_final / h));
  if (t_final == 0.0) n = 0;
  const double step = n > 0 ? t_final / static_cast<double>(n) : 0.0;
  for (long i = 1; i <= n; ++i) {
    double res = 0.0, det = 1.0;
    z = rk4_step(m, v, z, step, &res, &det);
    t = step * static_cast<double>(i);
    tr.max_residual = std::max(tr.max_residual, res);
    bool keep = (opts.record_every > 0 && i % opts.record_every == 0) || i == n;
    if (keep) {
      if (v == FlowVariant::corrected) det = vector_field(m, v, z).det_theta;
      record(det);
    }
  }
  return tr;
}

FlowState flow_endpoint(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final, double h) {
  IntegrateOptions o;
  o.record_every = 0;
  return integrate(m, v, start, t_final, h, o).back();
}

std::vector<FlowState> flow_ensemble(const EffectiveModel& m, FlowVariant v, const std::vector<FlowState>& starts,
                                     double t_final, double h, int threads) {
  std::vector<FlowState> out(starts.size());
  parallel_for(starts.size(), threads > 0 ? threads : default_threads(),
               [&](std::size_t i) { out[i] = flow_endpoint(m, v, starts[i], t_final, h); });
  return out;
}

SelfConvergence self_convergence(const EffectiveModel& m, FlowVariant v, const FlowState& start, double t_final,
                                 double h) {
  FlowState a = flow_endpoint(m, v, start, t_final, h);
  FlowState b = flow_endpoint(m, v, start, t_final, h / 2);
  FlowState c = flow_endpoint(m, v, start, t_final, h / 4);
  auto dist = [](const FlowState& x, const FlowState& y) {
    return std::sqrt((x.r - y.r).squaredNorm() + (x.p - y.p).squaredNorm());
  };
  SelfConvergence s;
  s.diff_coarse = dist(a, b);
  s.diff_fine = dist(b, c);
  s.order = std::log2(s.diff_coarse / s.diff_fine);
  return s;
}

double liouville_divergence(const EffectiveModel& m, const FlowState& z, double h) {
  const int d = m.dim();
  auto flux = [&](const FlowState& x, int comp) {
    FlowDerivative f = vector_field(m, FlowVariant::corrected, x);
    double rho = std::sqrt(std::abs(f.det_theta));
    return rho * (comp < d ? f.dr[comp] : f.dp[comp - d]);
  };
  double div = 0.0;
  for (int c = 0; c < 2 * d; ++c) {
    FlowState p = z, q = z;
    if (c < d) {
      p.r[c] += h;
      q.r[c] -= h;
    } else {
      p.p[c - d] += h;
      q.p[c - d] -= h;
    }
    div += (flux(p, c) - flux(q, c)) / (2 * h);
  }
  return div;
}

Trajectory kinetic_from_canonical_flow(const EffectiveModel& m, const Trajectory& canonical, ChartMap map) {
  if (canonical.variant != FlowVariant::canonical) throw Error("kinetic_from_canonical_flow needs a canonical trajectory");
  Trajectory out;
  out.variant = FlowVariant::corrected;
  out.t = canonical.t;
  for (const auto& z : canonical.z) {
    PhaseSample s = map == ChartMap::plain ? m.to_kinetic(z.p, z.r) : m.canonical_to_corrected(z.p, z.r);
    FlowState k{s.r, s.p};
    out.z.push_back(k);
    out.energy.push_back(flow_energy(m, FlowVariant::corrected, k));
    out.det_theta.push_back(symplectic_form(m, k.r, k.p).determinant());
  }
  return out;
}

double transport_observable(const EffectiveModel& m, FlowVariant v, const PhaseFunction& a, const FlowState& z,
                            double t, double h) {
  if (t == 0.0) return a(z.r, z.p);
  FlowState e = flow_endpoint(m, v, z, t, h);
  return a(e.r, e.p);
}

HallCurrent hall_current(const BandGeometry& g, const Vec& field) {
  if (g.grid.dim() != 2) throw Error("Hall current needs a 2D band");
  if (field.size() != 2) throw Error("Hall current needs a 2D field vector");
  HallCurrent h;
  double sum = 0.0;
  for (const auto& w : g.curvature) sum += w(0, 1);
  h.chern_quadrature = sum * g.grid.cell_measure() / kTwoPi;
  h.chern_plaquette = g.chern.empty() ? h.chern_quadrature : g.chern[0].chern;
  Vec perp(2);
  perp << -field[1], field[0];
  h.current = -perp * h.chern_quadrature;
  return h;
}

}  // namespace semibloch

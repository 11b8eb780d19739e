#include "semibloch/commands.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/experiments.hpp"
#include "semibloch/fit.hpp"
#include "semibloch/geometry.hpp"
#include "semibloch/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

#ifndef SEMIBLOCH_VERSION
#define SEMIBLOCH_VERSION "0.0.0"
#endif

namespace semibloch {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// a request the configuration cannot satisfy (exit 1)
class UsageError : public Error {
  using Error::Error;
};

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// upper-triangle entries (i < j)
json pairs_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

json grid_json(const KGrid& g) {
  json j;
  j["sizes"] = g.sizes();
  j["offset"] = to_json(g.offset());
  j["points"] = g.size();
  j["layout"] = "fractional (j + offset)/N, j in [-N/2, N/2), last axis fastest";
  return j;
}

// "# key: value" header lines, then the column row
class Csv {
 public:
  Csv(const std::string& what, std::vector<std::string> columns) : cols_(std::move(columns)) {
    os_ << "# semibloch " << version() << " " << what << "\n";
  }
  void meta(const std::string& key, const std::string& value) { os_ << "# " << key << ": " << value << "\n"; }
  void row(const std::vector<double>& v) {
    if (!header_done_) {
      header();
    }
    for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << g17(v[i]);
    os_ << "\n";
  }
  std::string str() {
    if (!header_done_) header();
    return os_.str();
  }

 private:
  void header() {
    for (std::size_t i = 0; i < cols_.size(); ++i) os_ << (i ? "," : "") << cols_[i];
    os_ << "\n";
    header_done_ = true;
  }
  std::vector<std::string> cols_;
  std::ostringstream os_;
  bool header_done_ = false;
};

const char* kUnits = "hbar = m = 1; lengths in the lattice basis units; energies hbar^2/(m length^2); k in 1/length";
const char* kSlowUnits = "slow variables r = eps x and macroscopic time t = eps tau; hbar = m = 1";

struct Context {
  const RunConfig& cfg;
  ArtifactWriter& out;
  CommandResult& result;
  int threads;
  bool strict;
  json summary;

  void check(const std::string& name, double value, const std::string& bound, bool pass) {
    result.checks.push_back({name, value, bound, pass});
  }
  void say(const std::string& s) { result.lines.push_back(s); }
  Lattice lattice() const { return make_lattice(cfg); }
  int dim() const { return static_cast<int>(cfg.lattice_rows.rows()); }
};

SolveOptions solve_options(const Context& c, int bands) {
  SolveOptions o;
  o.n_bands = bands;
  o.strict = c.strict;
  o.threads = c.threads;
  return o;
}

json convergence_json(const ConvergenceReport& r) {
  json j;
  j["checked"] = r.checked;
  j["max_change"] = r.max_change;
  j["tolerance"] = r.tolerance;
  j["converged"] = r.converged;
  j["warnings"] = r.warnings;
  return j;
}

void record_convergence(Context& c, const BlochSpectrum& s) {
  for (const auto& w : s.convergence.warnings) c.say("warning: " + w);
  if (s.convergence.checked)
    c.result.checks.push_back({"basis convergence of the low bands", s.convergence.max_change,
                               "< " + g6(s.convergence.tolerance), s.convergence.converged, !c.strict});
}

BlochSpectrum solve(Context& c, int bands) {
  KGrid grid(c.lattice(), c.cfg.grid);
  // plane waves get the cutoff-doubling check
  BlochSpectrum s = c.cfg.potential.solver == "plane-wave"
                        ? solve_bands(make_potential(c.cfg), PlaneWaveBasis(c.lattice(), plane_wave_cutoff(c.cfg)), grid,
                                      solve_options(c, bands))
                        : solve_bands(make_hamiltonian(c.cfg), grid, solve_options(c, bands));
  record_convergence(c, s);
  return s;
}

// ------------------------------------------------------------------- bands

void cmd_bands(Context& c) {
  BlochSpectrum s = solve(c, c.cfg.bands);
  const int d = c.dim();
  const int nb = std::min(c.cfg.bands, s.n_states());
  std::vector<std::string> cols{"k_index"};
  for (int i = 0; i < d; ++i) cols.push_back("s_" + std::to_string(i + 1));
  for (int i = 0; i < d; ++i) cols.push_back("k_" + std::to_string(i + 1));
  for (int n = 0; n < nb; ++n) cols.push_back("E_" + std::to_string(n));
  Csv csv("bands", cols);
  csv.meta("units", kUnits);
  csv.meta("grid", "sizes " + json(c.cfg.grid).dump() + ", s = fractional dual coordinates, k Cartesian");
  csv.meta("solver", s.model->describe() + ", " + std::to_string(s.n_states()) + " basis states");
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    Vec f = s.grid.fractional(k), p = s.grid.point(k);
    for (int i = 0; i < d; ++i) row.push_back(f[i]);
    for (int i = 0; i < d; ++i) row.push_back(p[i]);
    for (int n = 0; n < nb; ++n) row.push_back(s.energy(k, n));
    csv.row(row);
  }
  c.out.write("bands.csv", csv.str());

  json j;
  j["units"] = kUnits;
  j["solver"] = s.model->describe();
  j["basis_size"] = s.n_states();
  j["grid"] = grid_json(s.grid);
  j["convergence"] = convergence_json(s.convergence);
  json gaps = json::array();
  for (int n = 0; n < nb; ++n) {
    GapReport g = gap_check(s, n);
    gaps.push_back({{"band", n}, {"gap", g.gap}, {"isolated", g.isolated}});
  }
  j["gaps"] = gaps;
  c.summary = j;
  c.out.write("bands.json", j.dump(2) + "\n");
  c.say("bands: " + std::to_string(s.n_k()) + " k-points, " + std::to_string(nb) + " bands");
}

// ---------------------------------------------------------------- geometry

void cmd_geometry(Context& c) {
  BlochSpectrum s = solve(c, std::max(c.cfg.bands, c.cfg.band + 2));
  BandGeometry g = compute_geometry(s, c.cfg.band);
  json j;
  j["units"] = std::string(kUnits) + "; connection in length, curvature length^2, moment energy length^2";
  j["band"] = g.band;
  j["grid"] = grid_json(g.grid);
  j["gap"] = g.gap;
  j["curvature_tail"] = g.curvature_tail;
  j["moment_tail"] = g.moment_tail;
  j["zak_phases"] = g.zak_phases;
  json planes = json::array();
  for (const auto& p : g.chern) planes.push_back({{"axes", {p.axis_a, p.axis_b}}, {"chern", p.chern}, {"slices", p.slices}});
  j["chern"] = planes;
  j["pair_order"] = "(i, j) with i < j, lexicographic";
  json pts = json::array();
  for (std::size_t k = 0; k < g.grid.size(); ++k) {
    pts.push_back({{"s", to_json(g.grid.fractional(k))},
                   {"energy", g.energy[k]},
                   {"connection", to_json(g.connection[k])},
                   {"curvature", pairs_json(g.curvature[k])},
                   {"moment", pairs_json(g.moment[k])}});
  }
  j["points"] = pts;
  c.out.write("geometry.json", j.dump(2) + "\n");
  c.summary = {{"band", g.band}, {"gap", g.gap}, {"zak_phases", g.zak_phases}};
  c.say("geometry: band " + std::to_string(g.band) + ", gap " + g6(g.gap));
}

// ------------------------------------------------------------------- chern

void cmd_chern(Context& c) {
  if (c.dim() < 2) throw UsageError("chern needs a lattice of dimension 2 or 3");
  BlochSpectrum s = solve(c, c.cfg.bands);
  const int nb = std::min(c.cfg.bands, s.n_states());
  json bands = json::array();
  for (int n = 0; n < nb; ++n) {
    json b;
    b["band"] = n;
    GapReport gr = gap_check(s, n);
    b["gap"] = gr.gap;
    if (!gr.isolated) {
      b["skipped"] = "band touches a neighbour on the grid";
      bands.push_back(b);
      continue;
    }
    PlaquetteField p = berry_curvature_plaquette(s, n);
    json planes = json::array();
    for (const auto& pl : p.chern) {
      planes.push_back({{"axes", {pl.axis_a, pl.axis_b}}, {"chern", pl.chern}, {"slices", pl.slices}});
      c.check("band " + std::to_string(n) + " plaquette Chern integrality", std::abs(pl.chern - std::round(pl.chern)),
              "< 1e-6", std::abs(pl.chern - std::round(pl.chern)) < 1e-6);
    }
    b["plaquette"] = planes;
    b["min_link"] = p.min_link;
    if (c.dim() == 2) {
      std::vector<Mat> om = berry_curvature(s, n);
      double sum = 0.0;
      for (const auto& m : om) sum += m(0, 1);
      b["quadrature"] = sum * c.lattice().dual_cell_volume() / static_cast<double>(om.size()) / kTwoPi;
    }
    bands.push_back(b);
  }
  json j;
  j["grid"] = grid_json(s.grid);
  j["bands"] = bands;
  c.out.write("chern.json", j.dump(2) + "\n");
  c.summary = j["bands"];
  c.say("chern: " + std::to_string(nb) + " bands");
}

// -------------------------------------------------------------------- hall

void cmd_hall(Context& c) {
  if (c.dim() != 2) throw UsageError("hall needs a 2D lattice");
  BlochSpectrum s = solve(c, std::max(c.cfg.bands, c.cfg.band + 2));
  BandGeometry g = compute_geometry(s, c.cfg.band);
  HallCurrent h = hall_current(g, c.cfg.hall.field);
  const Vec& E = c.cfg.hall.field;
  Vec perp(2);
  perp << -E[1], E[0];
  json j;
  j["units"] = "current per unit area of the filled band, e = hbar = 1; field in energy/length";
  j["grid"] = grid_json(g.grid);
  j["band"] = g.band;
  j["field"] = to_json(E);
  j["current"] = to_json(h.current);
  j["chern_quadrature"] = h.chern_quadrature;
  j["chern_plaquette"] = h.chern_plaquette;
  j["expected_current"] = to_json(Vec(-std::round(h.chern_plaquette) * perp));
  c.out.write("hall.json", j.dump(2) + "\n");
  double dev = std::abs(h.chern_plaquette - std::round(h.chern_plaquette));
  c.check("plaquette Chern integrality", dev, "< 1e-6", dev < 1e-6);
  c.summary = j;
  c.say("hall: j = (" + g6(h.current[0] + 0.0) + ", " + g6(h.current[1] + 0.0) + "), Chern " + g6(h.chern_plaquette));
}

// -------------------------------------------------------------------- flow

std::vector<PhaseSample> samples_around(const RunConfig& cfg, const Lattice& lat) {
  const int d = lat.dim();
  Vec lo = Vec::Constant(d, 1e300), hi = Vec::Constant(d, -1e300);
  for (const auto& s : cfg.flow.starts) {
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], s.r[i] - 1.0);
      hi[i] = std::max(hi[i], s.r[i] + 1.0);
    }
  }
  return phase_samples(lat, lo, hi, 256, cfg.seed);
}

void cmd_flow(Context& c) {
  auto band = make_band(c.cfg);
  ExternalFields fields = make_fields(c.cfg);
  const Lattice lat = c.lattice();
  const int d = c.dim();
  const FlowVariant v = c.cfg.flow.variant;
  json runs = json::array();
  IntegrateOptions io;
  io.record_every = c.cfg.flow.record_every;
  for (std::size_t e = 0; e < c.cfg.eps.size(); ++e) {
    EffectiveModel model(band, fields, c.cfg.eps[e]);
    model.require_nondegenerate(samples_around(c.cfg, lat));
    for (std::size_t s = 0; s < c.cfg.flow.starts.size(); ++s) {
      const auto& st = c.cfg.flow.starts[s];
      Trajectory tr = integrate(model, v, FlowState{st.r, st.p}, c.cfg.flow.t_final, c.cfg.flow.step, io);
      std::vector<PhaseSample> along;
      for (const auto& z : tr.z) {
        Vec kappa = v == FlowVariant::canonical ? Vec(z.p - fields.A(z.r)) : z.p;
        along.push_back({z.r, kappa});
      }
      model.require_nondegenerate(along);
      std::vector<std::string> cols{"t"};
      for (int i = 0; i < d; ++i) cols.push_back("r_" + std::to_string(i + 1));
      for (int i = 0; i < d; ++i) cols.push_back((v == FlowVariant::canonical ? "k_" : "kappa_") + std::to_string(i + 1));
      cols.push_back("energy");
      cols.push_back("det_theta");
      Csv csv("flow", cols);
      csv.meta("units", kSlowUnits);
      csv.meta("variant", to_string(v));
      csv.meta("eps", g17(c.cfg.eps[e]));
      csv.meta("grid", "RK4 step " + g17(c.cfg.flow.step) + ", every " + std::to_string(c.cfg.flow.record_every) +
                           " steps, t_final " + g17(c.cfg.flow.t_final));
      for (std::size_t i = 0; i < tr.t.size(); ++i) {
        std::vector<double> row{tr.t[i]};
        for (int a = 0; a < d; ++a) row.push_back(tr.z[i].r[a]);
        for (int a = 0; a < d; ++a) row.push_back(tr.z[i].p[a]);
        row.push_back(tr.energy[i]);
        row.push_back(tr.det_theta[i]);
        csv.row(row);
      }
      std::string name = "flow_e" + std::to_string(e) + "_s" + std::to_string(s) + ".csv";
      c.out.write(name, csv.str());
      double min_det = 1e300;
      for (double x : tr.det_theta) min_det = std::min(min_det, x);
      runs.push_back({{"file", name},
                      {"eps", c.cfg.eps[e]},
                      {"start", {{"r", to_json(st.r)}, {"p", to_json(st.p)}}},
                      {"end", {{"r", to_json(tr.back().r)}, {"p", to_json(tr.back().p)}}},
                      {"energy_drift", tr.energy_drift()},
                      {"max_residual", tr.max_residual},
                      {"min_det_theta", min_det}});
    }
  }
  json j;
  j["units"] = kSlowUnits;
  j["variant"] = to_string(v);
  j["band"] = band->describe();
  j["runs"] = runs;
  c.out.write("flow.json", j.dump(2) + "\n");
  c.summary = j["runs"];
  c.say("flow: " + std::to_string(runs.size()) + " trajectories, variant " + to_string(v));
}

// ------------------------------------------------------------ egorov runs

void require_periodic(const FieldConfig& f, int dim, double period, const std::string& what) {
  if (f.preset == "zero") return;
  if (f.preset != "custom-fourier")
    throw UsageError(what + " needs zero or custom-fourier fields periodic with period " + g6(period));
  auto test = [&](const FourierTerm& t) {
    for (int i = 0; i < dim; ++i) {
      double x = t.freq[i] * period / kTwoPi;
      if (std::abs(x - std::round(x)) > 1e-9)
        throw UsageError(what + ": field frequency " + g17(t.freq[i]) + " is not a multiple of 2 pi / " + g17(period));
    }
  };
  for (const auto& t : f.params.phi_terms) test(t);
  for (const auto& comp : f.params.A_terms)
    for (const auto& t : comp) test(t);
}

std::optional<double> order_of(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() < 3) return std::nullopt;
  for (double e : err)
    if (!(e > 0.0)) return std::nullopt;
  return fit_order(eps, err).order;
}

void cmd_egorov_quantum(Context& c) {
  const auto& q = c.cfg.egorov_quantum;
  if (c.dim() != 1) throw UsageError("egorov-quantum supports d = 1 only");
  if (q.observable.empty()) throw UsageError("egorov_quantum.observable is empty");
  const FieldConfig& fc = q.fields ? *q.fields : c.cfg.fields;
  if (!fc.params.A_terms.empty()) throw UsageError("egorov-quantum needs A = 0");
  require_periodic(fc, 1, q.box_length, "egorov-quantum");
  const std::vector<double>& eps = q.eps.empty() ? c.cfg.eps : q.eps;
  const Lattice lat = c.lattice();
  PeriodicPotential V = make_potential(c.cfg);
  auto H = std::make_shared<SampledCellHamiltonian>(V, q.points);
  SolveOptions so = solve_options(c, std::max(c.cfg.bands, c.cfg.band + 2));
  BlochSpectrum coarse = solve_bands(H, KGrid(lat, {q.band_grid}), so);
  auto band = std::make_shared<GridBand>(compute_geometry(coarse, c.cfg.band));
  ExternalFields fields = make_fields(fc, 1);

  std::map<FlowVariant, std::vector<double>> gaps;
  json per = json::array();
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double cells_f = q.box_length / (eps[e] * lat.direct()(0, 0));
    const int cells = static_cast<int>(std::lround(cells_f));
    if (std::abs(cells - cells_f) > 1e-9 || cells % 2)
      throw UsageError("egorov-quantum: box_length / (eps a) = " + g6(cells_f) + " is not an even integer");
    EffectiveModel model(band, fields, eps[e]);
    model.require_nondegenerate(phase_samples(lat, Vec::Zero(1), Vec::Constant(1, q.box_length), 256, c.cfg.seed));
    BlochSpectrum s = solve_bands(H, KGrid(lat, {cells}), so);
    WavePacket psi0 = prepare_band_packet(s, PacketSpec{q.r0, q.k0, q.sigma, c.cfg.band}, cells, q.points, eps[e]);
    Observable a = make_box_observable(c.cfg, lat, psi0.slow_frequency());
    EgorovOptions o;
    o.times = q.times;
    o.dtau = q.dtau;
    o.flow_step = q.flow_step;
    o.refit = RefitOptions{q.r_modes, q.k_modes, q.refit_tol, c.threads};
    o.boundary_tol = q.boundary_tol;
    o.dtau_tol = q.dtau_tol;
    QuantumSeries qs = heisenberg_series(psi0, V, fields, a, o);
    std::vector<std::string> cols{"t", "quantum"};
    std::vector<std::vector<EgorovSample>> cl;
    json row;
    row["eps"] = eps[e];
    row["cells"] = cells;
    row["boundary_density"] = qs.boundary;
    row["dtau_change"] = qs.dtau_change;
    for (FlowVariant v : q.variants) {
      cl.push_back(combine_series(qs, transported_series(psi0, a, model, v, o)).samples);
      for (const char* p : {"classical_", "gap_", "refit_tail_"}) cols.push_back(p + to_string(v));
      double mg = 0.0;
      for (const auto& x : cl.back()) mg = std::max(mg, x.gap);
      gaps[v].push_back(mg);
      row["max_gap"][to_string(v)] = mg;
    }
    Csv csv("egorov-quantum", cols);
    csv.meta("units", kSlowUnits);
    csv.meta("eps", g17(eps[e]));
    csv.meta("grid", std::to_string(cells) + " cells x " + std::to_string(q.points) + " points, slow box " +
                         g17(q.box_length) + ", refit " + std::to_string(q.r_modes) + " r x " +
                         std::to_string(q.k_modes) + " k modes");
    for (std::size_t i = 0; i < qs.t.size(); ++i) {
      std::vector<double> r{qs.t[i], qs.value[i]};
      for (const auto& series : cl) {
        r.push_back(series[i].classical);
        r.push_back(series[i].gap);
        r.push_back(series[i].refit_tail);
      }
      csv.row(r);
    }
    std::string name = "egorov_quantum_e" + std::to_string(e) + ".csv";
    c.out.write(name, csv.str());
    row["file"] = name;
    per.push_back(row);
    c.check("boundary density, eps " + g6(eps[e]), qs.boundary, "<= " + g6(q.boundary_tol), qs.boundary <= q.boundary_tol);
    c.say("egorov-quantum: eps " + g6(eps[e]) + " done");
  }
  json j;
  j["units"] = kSlowUnits;
  j["runs"] = per;
  for (const auto& [v, g] : gaps) {
    auto ord = order_of(eps, g);
    j["fitted_order"][to_string(v)] = ord ? json(*ord) : json(nullptr);
  }
  c.out.write("egorov_quantum.json", j.dump(2) + "\n");
  c.summary = j;
}

void cmd_egorov_operator(Context& c) {
  const auto& q = c.cfg.egorov_operator;
  const int d = c.dim();
  if (!(q.period > 0.0)) throw UsageError("egorov_operator.period must be set to the field period");
  if (q.observable.empty()) throw UsageError("egorov_operator.observable is empty");
  const FieldConfig& fc = q.fields ? *q.fields : c.cfg.fields;
  require_periodic(fc, d, q.period, "egorov-operator");
  const std::vector<double>& eps = q.eps.empty() ? c.cfg.eps : q.eps;
  const Lattice lat = c.lattice();
  auto band = make_band(c.cfg);
  ExternalFields fields = make_fields(fc, d);
  SymbolSeries a = make_symbol_observable(c.cfg, lat);
  // every eps is checked before any run starts
  for (double e : eps)
    EffectiveModel(band, fields, e)
        .require_nondegenerate(phase_samples(lat, Vec::Zero(d), Vec::Constant(d, q.period), 256, c.cfg.seed));

  std::map<int, std::vector<double>> gaps;
  json per = json::array();
  for (std::size_t e = 0; e < eps.size(); ++e) {
    EffectiveModel model(band, fields, eps[e]);
    std::vector<HeisenbergRun> runs;
    std::vector<std::string> cols{"t"};
    json row;
    row["eps"] = eps[e];
    for (int order : q.flow_orders) {
      HeisenbergOptions o;
      o.times = q.times;
      o.flow_step = q.flow_step;
      o.flow_order = order;
      o.fit = SymbolFitOptions{q.k_modes, q.r_modes, q.refit_tol, true};
      o.interior = q.interior;
      o.threads = c.threads;
      runs.push_back(heisenberg_gap(model, q.period, a, o));
      cols.push_back("gap_order" + std::to_string(order));
      cols.push_back("refit_order" + std::to_string(order));
      gaps[order].push_back(runs.back().max_gap());
      std::string key = "order" + std::to_string(order);
      row[key] = {{"max_gap", runs.back().max_gap()},
                  {"truncation", runs.back().truncation},
                  {"shell", runs.back().shell},
                  {"hamiltonian_refit", runs.back().hamiltonian_refit}};
    }
    Csv csv("egorov-operator", cols);
    csv.meta("units", "interior spectral-norm gap; " + std::string(kSlowUnits));
    csv.meta("eps", g17(eps[e]));
    csv.meta("grid", "torus truncation " + std::to_string(runs.front().truncation) + ", masked shell " +
                         std::to_string(runs.front().shell) + ", fit " + std::to_string(q.k_modes) + " k x " +
                         std::to_string(q.r_modes) + " r modes, period " + g17(q.period));
    for (std::size_t i = 0; i < q.times.size(); ++i) {
      std::vector<double> r{q.times[i]};
      for (const auto& run : runs) {
        r.push_back(run.samples[i].gap);
        r.push_back(run.samples[i].refit);
      }
      csv.row(r);
    }
    std::string name = "egorov_operator_e" + std::to_string(e) + ".csv";
    c.out.write(name, csv.str());
    row["file"] = name;
    per.push_back(row);
    c.say("egorov-operator: eps " + g6(eps[e]) + " done");
  }
  json j;
  j["runs"] = per;
  for (const auto& [order, g] : gaps) {
    auto ord = order_of(eps, g);
    j["fitted_order"]["order" + std::to_string(order)] = ord ? json(*ord) : json(nullptr);
  }
  c.out.write("egorov_operator.json", j.dump(2) + "\n");
  c.summary = j;
}

// ----------------------------------------------------------------- selftest

void cmd_selftest(Context& c) {
  json all = json::array();
  std::string text;
  for (int id : c.cfg.selftest) {
    CriterionResult r = run_criterion(id, c.threads);
    json checks = json::array();
    for (const auto& ch : r.checks) {
      checks.push_back({{"name", ch.name}, {"value", ch.value}, {"pass", ch.pass}, {"rule", ch.describe()}});
      c.check("c" + std::to_string(id) + ": " + ch.name, ch.value, ch.describe(), ch.pass);
    }
    all.push_back({{"criterion", id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}, {"notes", r.info}});
    c.say(r.line());
    text += r.line() + "\n";
  }
  c.out.write("selftest.json", json{{"criteria", all}}.dump(2) + "\n");
  c.out.write("selftest.txt", text);
}

}  // namespace

const char* version() { return SEMIBLOCH_VERSION; }

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n{"bands", "geometry", "chern", "flow", "hall", "egorov-quantum",
                                          "egorov-operator", "selftest"};
  return n;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ArtifactWriter::ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  write_atomic(dir_ / name, content);
  records_.push_back({name, content.size(), hex64(fnv1a(content))});
}

fs::path output_root(const RunConfig& c, const CommandOptions& o) {
  if (!o.out.empty()) return o.out;
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv("SEMIBLOCH_OUT"); env && *env) return env;
  return "semibloch-out";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e) ||
      dynamic_cast<const NondegeneracyError*>(&e) || dynamic_cast<const UnsupportedGaugeError*>(&e) ||
      dynamic_cast<const GridShapeError*>(&e) || dynamic_cast<const FieldPresetError*>(&e) ||
      dynamic_cast<const LatticeMismatchError*>(&e) || dynamic_cast<const DegenerateLatticeError*>(&e) ||
      dynamic_cast<const BasisTruncationError*>(&e) || dynamic_cast<const NonHermitianError*>(&e))
    return exit_config;
  return exit_check;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& o) {
  CommandResult result;
  bool known = false;
  for (const auto& n : command_names()) known = known || n == name;
  if (!known) {
    result.exit_code = exit_config;
    result.error = "unknown subcommand '" + name + "'";
    return result;
  }
  const int threads = o.threads > 0 ? o.threads : cfg.threads;
  set_default_threads(threads);
  result.dir = output_root(cfg, o) / name;
  ArtifactWriter out(result.dir);
  Context ctx{cfg, out, result, threads, o.strict || cfg.strict, json()};

  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (name == "bands") cmd_bands(ctx);
    else if (name == "geometry") cmd_geometry(ctx);
    else if (name == "chern") cmd_chern(ctx);
    else if (name == "flow") cmd_flow(ctx);
    else if (name == "hall") cmd_hall(ctx);
    else if (name == "egorov-quantum") cmd_egorov_quantum(ctx);
    else if (name == "egorov-operator") cmd_egorov_operator(ctx);
    else cmd_selftest(ctx);
    for (const auto& ch : result.checks)
      if (!ch.pass && !ch.advisory) result.exit_code = exit_check;
  } catch (const std::exception& e) {
    result.exit_code = exit_code_for(e);
    result.error = e.what();
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json m;
  m["command"] = name;
  m["version"] = version();
  m["config"] = {{"source", cfg.source}, {"fnv1a", hex64(cfg.hash)}};
  m["seed"] = cfg.seed;
  m["threads"] = threads;
  m["strict"] = ctx.strict;
  m["started_utc"] = stamp;
  m["wall_seconds"] = wall;
  json arts = json::array();
  for (const auto& a : out.records()) arts.push_back({{"name", a.name}, {"bytes", a.bytes}, {"fnv1a", a.fnv1a}});
  m["artifacts"] = arts;
  json checks = json::array();
  for (const auto& ch : result.checks)
    checks.push_back({{"name", ch.name},
                      {"value", ch.value},
                      {"bound", ch.bound},
                      {"verdict", ch.pass ? "pass" : (ch.advisory ? "warn" : "fail")}});
  m["checks"] = checks;
  if (!ctx.summary.is_null()) m["summary"] = ctx.summary;
  m["exit_code"] = result.exit_code;
  if (!result.error.empty()) m["error"] = result.error;
  write_atomic(result.dir / "manifest.json", m.dump(2) + "\n");
  return result;
}

}  // namespace semibloch

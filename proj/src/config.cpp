#include "semibloch/config.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/geometry.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace semibloch {

ConfigError::ConfigError(const std::string& file, int line, int column, const std::string& msg)
    : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line) {}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    YAML::Mark m = n.Mark();
    if (m.is_null()) throw ConfigError(file_, 1, 1, msg);
    throw ConfigError(file_, m.line + 1, m.column + 1, msg);
  }

  template <class T>
  T scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, what + " has the wrong type (got '" + n.Scalar() + "')");
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    double v = scalar<double>(n, what);
    if (!std::isfinite(v)) fail(n, what + " must be finite");
    return v;
  }

  int integer(const YAML::Node& n, const std::string& what) const { return scalar<int>(n, what); }

  std::vector<double> numbers(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list of numbers");
    std::vector<double> v;
    for (const auto& x : n) v.push_back(number(x, what + " entry"));
    return v;
  }

  std::vector<int> integers(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(n, what + " must be a list of integers");
    std::vector<int> v;
    for (const auto& x : n) v.push_back(integer(x, what + " entry"));
    return v;
  }

  Vec vector(const YAML::Node& n, const std::string& what, int dim) const {
    std::vector<double> v = numbers(n, what);
    if (dim > 0 && static_cast<int>(v.size()) != dim)
      fail(n, what + " must have " + std::to_string(dim) + " components");
    if (v.size() > 3) fail(n, what + " has more than 3 components");
    Vec out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
  }

  IVec ivector(const YAML::Node& n, const std::string& what, int dim) const {
    std::vector<int> v = integers(n, what);
    if (static_cast<int>(v.size()) != dim) fail(n, what + " must have " + std::to_string(dim) + " components");
    IVec out(dim);
    for (int i = 0; i < dim; ++i) out[i] = v[static_cast<std::size_t>(i)];
    return out;
  }

  // mapping with a fixed key set
  void keys(const YAML::Node& n, const std::string& section, const std::set<std::string>& allowed) const {
    if (!n.IsMap()) fail(n, section + " must be a mapping");
    for (const auto& kv : n) {
      std::string k = kv.first.as<std::string>();
      if (!allowed.count(k)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, "unknown key '" + k + "' in " + section + " (allowed: " + list + ")");
      }
    }
  }

 private:
  std::string file_;
};

FlowVariant variant_of(const Reader& R, const YAML::Node& n) {
  std::string s = R.scalar<std::string>(n, "flow variant");
  try {
    return flow_variant_from(s);
  } catch (const Error& e) {
    R.fail(n, e.what());
  }
}

std::vector<FourierTerm> fourier_terms(const Reader& R, const YAML::Node& n, const std::string& what, int dim) {
  if (!n.IsSequence()) R.fail(n, what + " must be a list of {freq, re, im} terms");
  std::vector<FourierTerm> out;
  for (const auto& t : n) {
    R.keys(t, what + " term", {"freq", "re", "im"});
    if (!t["freq"]) R.fail(t, what + " term needs 'freq'");
    FourierTerm f;
    f.freq = R.vector(t["freq"], what + " freq", dim);
    f.coeff = cplx(t["re"] ? R.number(t["re"], "re") : 0.0, t["im"] ? R.number(t["im"], "im") : 0.0);
    out.push_back(f);
  }
  return out;
}

FieldConfig field_config(const Reader& R, const YAML::Node& n, int dim) {
  R.keys(n, "fields", {"preset", "E0", "B0", "length", "direction", "phi", "A"});
  FieldConfig f;
  if (n["preset"]) f.preset = R.scalar<std::string>(n["preset"], "fields.preset");
  bool known = false;
  for (const auto& p : preset_names()) known = known || p == f.preset;
  if (!known) R.fail(n["preset"], "unknown field preset '" + f.preset + "'");
  if (n["E0"]) f.params.E0 = R.number(n["E0"], "fields.E0");
  if (n["B0"]) f.params.B0 = R.number(n["B0"], "fields.B0");
  if (n["length"]) {
    f.params.length = R.number(n["length"], "fields.length");
    if (!(f.params.length > 0.0)) R.fail(n["length"], "fields.length must be positive");
  }
  if (n["direction"]) f.params.direction = R.vector(n["direction"], "fields.direction", dim);
  if (n["phi"]) f.params.phi_terms = fourier_terms(R, n["phi"], "fields.phi", dim);
  if (n["A"]) {
    if (!n["A"].IsSequence() || static_cast<int>(n["A"].size()) != dim)
      R.fail(n["A"], "fields.A must list one term list per component (" + std::to_string(dim) + ")");
    for (const auto& comp : n["A"]) f.params.A_terms.push_back(fourier_terms(R, comp, "fields.A", dim));
  }
  if (f.preset != "custom-fourier" && (n["phi"] || n["A"]))
    R.fail(n, "phi/A term lists are only read by the custom-fourier preset");
  try {
    preset(f.preset, dim, f.params);
  } catch (const Error& e) {
    R.fail(n, e.what());
  }
  return f;
}

std::vector<TrigPolynomial::Term> trig_terms(const Reader& R, const YAML::Node& n, const std::string& what, int dim) {
  if (!n.IsSequence()) R.fail(n, what + " must be a list of [n, cos, sin] triples");
  std::vector<TrigPolynomial::Term> out;
  for (const auto& t : n) {
    if (!t.IsSequence() || t.size() != 3) R.fail(t, what + " terms are [n, cos, sin]");
    TrigPolynomial::Term term;
    term.n = R.ivector(t[0], what + " harmonic", dim);
    term.c = R.number(t[1], what + " cos coefficient");
    term.s = R.number(t[2], what + " sin coefficient");
    out.push_back(term);
  }
  return out;
}

std::vector<ObservableTerm> observable_terms(const Reader& R, const YAML::Node& n, const std::string& what, int dim,
                                             bool box_modes) {
  if (!n.IsSequence()) R.fail(n, what + " must be a list of terms");
  std::vector<ObservableTerm> out;
  for (const auto& t : n) {
    ObservableTerm o;
    if (box_modes) {
      R.keys(t, what + " term", {"mode", "shift", "re", "im"});
      o.mode = t["mode"] ? R.integer(t["mode"], "mode") : 0;
      o.shift = IVec::Constant(1, t["shift"] ? R.integer(t["shift"], "shift") : 0);
      o.freq = Vec::Zero(1);
    } else {
      R.keys(t, what + " term", {"shift", "freq", "re", "im"});
      o.shift = t["shift"] ? R.ivector(t["shift"], "shift", dim) : IVec::Zero(dim);
      o.freq = t["freq"] ? R.vector(t["freq"], "freq", dim) : Vec::Zero(dim);
    }
    o.coeff = cplx(t["re"] ? R.number(t["re"], "re") : 0.0, t["im"] ? R.number(t["im"], "im") : 0.0);
    out.push_back(o);
  }
  return out;
}

std::vector<double> eps_list(const Reader& R, const YAML::Node& n) {
  std::vector<double> e = R.numbers(n, "eps");
  if (e.empty()) R.fail(n, "eps list must not be empty");
  for (double v : e)
    if (!(v > 0.0) || v > 0.5) R.fail(n, "eps values must lie in (0, 0.5]");
  return e;
}

void positive(const Reader& R, const YAML::Node& n, double v, const std::string& what) {
  if (!(v > 0.0)) R.fail(n, what + " must be positive");
}

void increasing_times(const Reader& R, const YAML::Node& n, const std::vector<double>& t) {
  if (t.empty()) R.fail(n, "times must not be empty");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] < 0.0 || (i > 0 && t[i] <= t[i - 1])) R.fail(n, "times must be non-negative and increasing");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  Reader R(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.mark.column + 1, "malformed YAML: " + e.msg);
  }
  RunConfig c;
  c.source = source;
  c.hash = fnv1a(text);
  if (root.IsNull()) throw ConfigError(source, 1, 1, "configuration is empty");
  R.keys(root, "configuration",
         {"seed", "output", "strict", "threads", "lattice", "potential", "band", "grid", "bands", "fields",
          "symbol_band", "eps", "flow", "hall", "egorov_quantum", "egorov_operator", "selftest"});

  if (!root["lattice"]) R.fail(root, "missing required key 'lattice'");
  {
    const YAML::Node& L = root["lattice"];
    if (!L.IsSequence() || L.size() < 1 || L.size() > 3) R.fail(L, "lattice must be a list of 1 to 3 basis rows");
    const int d = static_cast<int>(L.size());
    c.lattice_rows = Mat(d, d);
    for (int i = 0; i < d; ++i) {
      Vec row = R.vector(L[i], "lattice row", d);
      c.lattice_rows.row(i) = row.transpose();
    }
    try {
      Lattice::from_rows(c.lattice_rows);
    } catch (const Error& e) {
      R.fail(L, e.what());
    }
  }
  const int d = static_cast<int>(c.lattice_rows.rows());
  Lattice lat = Lattice::from_rows(c.lattice_rows);

  if (root["seed"]) c.seed = static_cast<unsigned>(R.integer(root["seed"], "seed"));
  if (root["output"]) c.output = R.scalar<std::string>(root["output"], "output");
  if (root["strict"]) c.strict = R.scalar<bool>(root["strict"], "strict");
  if (root["threads"]) {
    c.threads = R.integer(root["threads"], "threads");
    if (c.threads < 1) R.fail(root["threads"], "threads must be at least 1");
  }

  if (const YAML::Node& P = root["potential"]) {
    R.keys(P, "potential", {"solver", "cutoff", "points", "mass", "coefficients"});
    if (P["solver"]) c.potential.solver = R.scalar<std::string>(P["solver"], "potential.solver");
    if (c.potential.solver != "plane-wave" && c.potential.solver != "sampled-cell" && c.potential.solver != "two-level")
      R.fail(P["solver"], "potential.solver must be plane-wave, sampled-cell or two-level");
    if (P["points"]) {
      c.potential.points = R.integer(P["points"], "potential.points");
      if (c.potential.points < 2 || c.potential.points % 2) R.fail(P["points"], "potential.points must be even and >= 2");
    }
    if (P["mass"]) c.potential.mass = R.number(P["mass"], "potential.mass");
    if (P["coefficients"]) {
      const YAML::Node& C = P["coefficients"];
      if (!C.IsSequence()) R.fail(C, "potential.coefficients must be a list of [n, re, im]");
      for (const auto& t : C) {
        if (!t.IsSequence() || t.size() != 3) R.fail(t, "potential coefficients are [n, re, im]");
        c.potential.coefficients.push_back(
            {R.ivector(t[0], "potential harmonic", d), cplx(R.number(t[1], "re"), R.number(t[2], "im"))});
      }
    }
    try {
      PeriodicPotential(lat, c.potential.coefficients);
    } catch (const Error& e) {
      R.fail(P["coefficients"] ? P["coefficients"] : P, e.what());
    }
    double gmax = 0.0;
    for (const auto& [n, v] : c.potential.coefficients) gmax = std::max(gmax, lat.lattice_vector(n, Space::dual).norm());
    if (P["cutoff"]) {
      c.potential.cutoff = R.number(P["cutoff"], "potential.cutoff");
      // the basis must at least couple every potential harmonic to k = 0
      if (c.potential.solver == "plane-wave" && c.potential.cutoff < 2.0 * gmax)
        R.fail(P["cutoff"], "potential.cutoff " + short_num(c.potential.cutoff) + " is below the floor 2 max|G| = " +
                                short_num(2.0 * gmax));
    }
    if (c.potential.solver == "two-level" && d != 2) R.fail(P, "the two-level model needs a 2D lattice");
    if (c.potential.solver == "sampled-cell" && d != 1) R.fail(P, "the sampled-cell solver needs a 1D lattice");
  }
  if (root["band"]) {
    c.band = R.integer(root["band"], "band");
    if (c.band < 0) R.fail(root["band"], "band must be non-negative");
  }
  c.grid = std::vector<int>(static_cast<std::size_t>(d), d == 1 ? 64 : 32);
  if (root["grid"]) {
    c.grid = R.integers(root["grid"], "grid");
    if (static_cast<int>(c.grid.size()) != d) R.fail(root["grid"], "grid needs one size per axis");
    for (int n : c.grid)
      if (n < 2) R.fail(root["grid"], "grid sizes must be at least 2");
  }
  if (root["bands"]) {
    c.bands = R.integer(root["bands"], "bands");
    if (c.bands < 1) R.fail(root["bands"], "bands must be at least 1");
  }
  c.fields.preset = "zero";
  if (root["fields"]) c.fields = field_config(R, root["fields"], d);

  if (const YAML::Node& S = root["symbol_band"]) {
    R.keys(S, "symbol_band", {"energy", "connection", "moment"});
    SymbolBandConfig sb;
    if (!S["energy"]) R.fail(S, "symbol_band needs 'energy'");
    sb.energy = trig_terms(R, S["energy"], "symbol_band.energy", d);
    if (S["connection"]) {
      if (!S["connection"].IsSequence() || static_cast<int>(S["connection"].size()) != d)
        R.fail(S["connection"], "symbol_band.connection needs one polynomial per component");
      for (const auto& comp : S["connection"]) sb.connection.push_back(trig_terms(R, comp, "connection", d));
    }
    if (S["moment"]) {
      const int pairs = d * (d - 1) / 2;
      if (!S["moment"].IsSequence() || static_cast<int>(S["moment"].size()) != pairs)
        R.fail(S["moment"], "symbol_band.moment needs one polynomial per pair i < j (" + std::to_string(pairs) + ")");
      for (const auto& comp : S["moment"]) sb.moment.push_back(trig_terms(R, comp, "moment", d));
    }
    c.symbol_band = sb;
  }

  if (root["eps"]) c.eps = eps_list(R, root["eps"]);

  if (const YAML::Node& F = root["flow"]) {
    R.keys(F, "flow", {"variant", "t_final", "step", "record_every", "starts"});
    if (F["variant"]) c.flow.variant = variant_of(R, F["variant"]);
    if (F["t_final"]) {
      c.flow.t_final = R.number(F["t_final"], "flow.t_final");
      if (c.flow.t_final < 0.0) R.fail(F["t_final"], "flow.t_final must be non-negative");
    }
    if (F["step"]) {
      c.flow.step = R.number(F["step"], "flow.step");
      positive(R, F["step"], c.flow.step, "flow.step");
    }
    if (F["record_every"]) {
      c.flow.record_every = R.integer(F["record_every"], "flow.record_every");
      if (c.flow.record_every < 0) R.fail(F["record_every"], "flow.record_every must be >= 0");
    }
    if (F["starts"]) {
      if (!F["starts"].IsSequence()) R.fail(F["starts"], "flow.starts must be a list of {r, p}");
      for (const auto& s : F["starts"]) {
        R.keys(s, "flow start", {"r", "p"});
        if (!s["r"] || !s["p"]) R.fail(s, "flow start needs r and p");
        c.flow.starts.push_back({R.vector(s["r"], "r", d), R.vector(s["p"], "p", d)});
      }
    }
  }
  if (c.flow.starts.empty()) c.flow.starts.push_back({zero_vec(d), Vec::Constant(d, 0.5)});

  c.hall.field = Vec::Zero(d);
  if (d >= 1) c.hall.field[0] = 0.1;
  if (const YAML::Node& H = root["hall"]) {
    R.keys(H, "hall", {"field"});
    if (H["field"]) c.hall.field = R.vector(H["field"], "hall.field", d);
  }

  if (const YAML::Node& Q = root["egorov_quantum"]) {
    auto& q = c.egorov_quantum;
    R.keys(Q, "egorov_quantum",
           {"box_length", "points", "r0", "k0", "sigma", "times", "dtau", "flow_step", "band_grid", "r_modes", "k_modes",
            "refit_tol", "dtau_tol", "boundary_tol", "variants", "observable", "eps", "fields"});
    auto num = [&](const char* k, double& v, bool pos) {
      if (!Q[k]) return;
      v = R.number(Q[k], std::string("egorov_quantum.") + k);
      if (pos) positive(R, Q[k], v, std::string("egorov_quantum.") + k);
    };
    auto even = [&](const char* k, int& v) {
      if (!Q[k]) return;
      v = R.integer(Q[k], std::string("egorov_quantum.") + k);
      if (v < 4 || v % 2) R.fail(Q[k], std::string("egorov_quantum.") + k + " must be even and >= 4");
    };
    num("box_length", q.box_length, true);
    num("r0", q.r0, false);
    num("k0", q.k0, false);
    num("sigma", q.sigma, true);
    num("dtau", q.dtau, false);
    num("flow_step", q.flow_step, true);
    num("refit_tol", q.refit_tol, true);
    num("dtau_tol", q.dtau_tol, true);
    num("boundary_tol", q.boundary_tol, true);
    even("points", q.points);
    even("band_grid", q.band_grid);
    even("r_modes", q.r_modes);
    even("k_modes", q.k_modes);
    if (Q["times"]) {
      q.times = R.numbers(Q["times"], "egorov_quantum.times");
      increasing_times(R, Q["times"], q.times);
    }
    if (Q["variants"]) {
      q.variants.clear();
      if (!Q["variants"].IsSequence()) R.fail(Q["variants"], "egorov_quantum.variants must be a list");
      for (const auto& v : Q["variants"]) q.variants.push_back(variant_of(R, v));
      if (q.variants.empty()) R.fail(Q["variants"], "egorov_quantum.variants must not be empty");
    }
    if (Q["observable"]) q.observable = observable_terms(R, Q["observable"], "egorov_quantum.observable", d, true);
    if (Q["eps"]) q.eps = eps_list(R, Q["eps"]);
    if (Q["fields"]) q.fields = field_config(R, Q["fields"], d);
  }
  if (const YAML::Node& O = root["egorov_operator"]) {
    auto& o = c.egorov_operator;
    R.keys(O, "egorov_operator",
           {"period", "interior", "times", "flow_step", "k_modes", "r_modes", "refit_tol", "flow_orders", "observable", "eps", "fields"});
    if (O["period"]) {
      o.period = R.number(O["period"], "egorov_operator.period");
      positive(R, O["period"], o.period, "egorov_operator.period");
    }
    if (O["interior"]) {
      o.interior = R.number(O["interior"], "egorov_operator.interior");
      positive(R, O["interior"], o.interior, "egorov_operator.interior");
    }
    if (O["flow_step"]) {
      o.flow_step = R.number(O["flow_step"], "egorov_operator.flow_step");
      positive(R, O["flow_step"], o.flow_step, "egorov_operator.flow_step");
    }
    if (O["refit_tol"]) {
      o.refit_tol = R.number(O["refit_tol"], "egorov_operator.refit_tol");
      positive(R, O["refit_tol"], o.refit_tol, "egorov_operator.refit_tol");
    }
    for (const char* k : {"k_modes", "r_modes"}) {
      if (!O[k]) continue;
      int v = R.integer(O[k], std::string("egorov_operator.") + k);
      if (v < 4 || v % 2) R.fail(O[k], std::string("egorov_operator.") + k + " must be even and >= 4");
      (std::string(k) == "k_modes" ? o.k_modes : o.r_modes) = v;
    }
    if (O["times"]) {
      o.times = R.numbers(O["times"], "egorov_operator.times");
      increasing_times(R, O["times"], o.times);
    }
    if (O["flow_orders"]) {
      o.flow_orders = R.integers(O["flow_orders"], "egorov_operator.flow_orders");
      for (int v : o.flow_orders)
        if (v != 0 && v != 1) R.fail(O["flow_orders"], "flow orders are 0 (h0) or 1 (h0 + eps h1)");
    }
    if (O["observable"]) o.observable = observable_terms(R, O["observable"], "egorov_operator.observable", d, false);
    if (O["eps"]) o.eps = eps_list(R, O["eps"]);
    if (O["fields"]) o.fields = field_config(R, O["fields"], d);
  }
  if (root["selftest"]) {
    const YAML::Node& S = root["selftest"];
    R.keys(S, "selftest", {"criteria"});
    if (S["criteria"]) {
      c.selftest = R.integers(S["criteria"], "selftest.criteria");
      for (int v : c.selftest)
        if (v < 1 || v > 10) R.fail(S["criteria"], "selftest criteria are numbered 1 to 10");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 1, 1, "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------- builders

Lattice make_lattice(const RunConfig& c) { return Lattice::from_rows(c.lattice_rows); }

PeriodicPotential make_potential(const RunConfig& c) { return PeriodicPotential(make_lattice(c), c.potential.coefficients); }

std::shared_ptr<const FiberHamiltonian> make_hamiltonian(const RunConfig& c) {
  Lattice lat = make_lattice(c);
  if (c.potential.solver == "two-level") return std::make_shared<TwoLevelChernModel>(lat, c.potential.mass);
  PeriodicPotential V = make_potential(c);
  if (c.potential.solver == "sampled-cell") return std::make_shared<SampledCellHamiltonian>(V, c.potential.points);
  return std::make_shared<PlaneWaveHamiltonian>(V, PlaneWaveBasis(lat, plane_wave_cutoff(c)));
}

double plane_wave_cutoff(const RunConfig& c) {
  if (c.potential.cutoff > 0.0) return c.potential.cutoff;
  Lattice lat = make_lattice(c);
  double gmax = 0.0;
  for (const auto& [n, v] : c.potential.coefficients) gmax = std::max(gmax, lat.lattice_vector(n, Space::dual).norm());
  double b = lat.dual().colwise().norm().maxCoeff();
  return std::max(4.0 * gmax, 6.0 * b);
}

ExternalFields make_fields(const FieldConfig& f, int dim) { return preset(f.preset, dim, f.params); }

ExternalFields make_fields(const RunConfig& c) { return make_fields(c.fields, static_cast<int>(c.lattice_rows.rows())); }

std::shared_ptr<const BandModel> make_band(const RunConfig& c) {
  Lattice lat = make_lattice(c);
  if (c.symbol_band) {
    const SymbolBandConfig& s = *c.symbol_band;
    std::vector<TrigPolynomial> conn, mom;
    for (const auto& t : s.connection) conn.emplace_back(lat, t);
    for (const auto& t : s.moment) mom.emplace_back(lat, t);
    return std::make_shared<SymbolBand>(lat, TrigPolynomial(lat, s.energy), conn, mom);
  }
  SolveOptions o;
  o.n_bands = std::max(c.bands, c.band + 2);
  o.strict = c.strict;
  o.threads = c.threads;
  KGrid grid(lat, c.grid);
  BlochSpectrum s = c.potential.solver == "plane-wave"
                        ? solve_bands(make_potential(c), PlaneWaveBasis(lat, plane_wave_cutoff(c)), grid, o)
                        : solve_bands(make_hamiltonian(c), grid, o);
  return std::make_shared<GridBand>(compute_geometry(s, c.band));
}

Observable make_box_observable(const RunConfig& c, const Lattice& lat, double omega) {
  Observable a(lat, omega);
  for (const auto& t : c.egorov_quantum.observable) a.add(t.mode, t.shift[0], t.coeff);
  return a;
}

SymbolSeries make_symbol_observable(const RunConfig& c, const Lattice& lat) {
  SymbolSeries a(lat);
  for (const auto& t : c.egorov_operator.observable) a.add(t.shift, t.freq, t.coeff);
  return a;
}

}  // namespace semibloch

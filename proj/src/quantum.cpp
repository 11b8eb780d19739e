#include "semibloch/quantum.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>

namespace semibloch {

namespace {

void require_line(const Lattice& lat) {
  if (lat.dim() != 1) throw Error("Schrödinger propagation and line observables support d = 1 only");
}

double lattice_period(const Lattice& lat) { return std::abs(lat.direct()(0, 0)); }

}  // namespace

WavePacket::WavePacket(const Lattice& lat, int cells, int points, double e) : psi(lat, cells, points), eps(e) {
  require_line(lat);
  if (!(e > 0.0)) throw Error("eps must be positive");
}

double WavePacket::spacing() const { return lattice_period(psi.lattice) / psi.n_x; }
double WavePacket::box_length() const { return lattice_period(psi.lattice) * psi.n_cells; }
double WavePacket::slow_frequency() const { return kTwoPi / slow_length(); }
double WavePacket::x(std::size_t q) const { return psi.position(q)[0]; }

// ---------------------------------------------------------------- observables

void Observable::add(int m, int j, cplx c) {
  if (c == cplx(0.0)) return;
  coeffs_[{m, j}] += c;
}

double Observable::period() const { return lattice_period(lat_); }

int Observable::max_mode() const {
  int r = 0;
  for (const auto& [mj, c] : coeffs_) r = std::max(r, std::abs(mj.first));
  return r;
}

int Observable::max_harmonic() const {
  int r = 0;
  for (const auto& [mj, c] : coeffs_) r = std::max(r, std::abs(mj.second));
  return r;
}

cplx Observable::value(double r, double k) const {
  cplx s = 0.0;
  const double a = period();
  for (const auto& [mj, c] : coeffs_) s += c * std::polar(1.0, mj.first * omega_ * r + mj.second * a * k);
  return s;
}

bool Observable::hermitian(double tol) const {
  for (const auto& [mj, c] : coeffs_) {
    auto it = coeffs_.find({-mj.first, -mj.second});
    cplx partner = it == coeffs_.end() ? cplx(0.0) : it->second;
    if (std::abs(partner - std::conj(c)) > tol * std::max(1.0, std::abs(c))) return false;
  }
  return true;
}

Observable& Observable::operator+=(const Observable& o) {
  if (coeffs_.empty() && omega_ == 0.0) {
    lat_ = o.lat_;
    omega_ = o.omega_;
  } else if (!o.coeffs_.empty() && std::abs(o.omega_ - omega_) > 1e-12 * std::abs(omega_)) {
    throw Error("observables with different slow frequencies cannot be added");
  }
  for (const auto& [mj, c] : o.coeffs_) coeffs_[mj] += c;
  return *this;
}

Observable Observable::scaled(cplx s) const {
  Observable o(lat_, omega_);
  for (const auto& [mj, c] : coeffs_) o.coeffs_[mj] = s * c;
  return o;
}

namespace {

void check_observable(const WavePacket& w, const Observable& a) {
  if (!a.lattice().same_as(w.psi.lattice)) throw LatticeMismatchError("observable and wavefunction use different lattices");
  double ratio = a.omega() * w.slow_length() / kTwoPi;
  if (!a.coefficients().empty() && std::abs(ratio - std::round(ratio)) > 1e-9)
    throw Error("observable slow frequency is not a multiple of the box frequency 2 pi / (eps L)");
  if (2 * a.max_harmonic() * w.psi.n_x >= static_cast<int>(w.size()))
    throw Error("observable momentum harmonics exceed half the box");
}

std::size_t wrap(long long q, std::size_t n) {
  long long r = q % static_cast<long long>(n);
  return static_cast<std::size_t>(r < 0 ? r + static_cast<long long>(n) : r);
}

}  // namespace

GridFunction apply_observable(const WavePacket& w, const Observable& a) {
  check_observable(w, a);
  const std::size_t n = w.size();
  const int nx = w.psi.n_x;
  const double per = a.period();
  GridFunction out = w.psi;
  std::fill(out.values.begin(), out.values.end(), cplx(0.0));
  for (const auto& [mj, c] : a.coefficients()) {
    const double theta = mj.first * a.omega() * w.eps;
    const double s = mj.second * per;
    const long long shift = static_cast<long long>(mj.second) * nx;
    for (std::size_t q = 0; q < n; ++q)
      out.values[q] += c * std::polar(1.0, theta * (w.x(q) + 0.5 * s)) * w.psi.values[wrap(static_cast<long long>(q) + shift, n)];
  }
  return out;
}

cplx expectation_complex(const WavePacket& w, const Observable& a) {
  check_observable(w, a);
  const std::size_t n = w.size();
  const int nx = w.psi.n_x;
  const double per = a.period();
  std::map<int, std::vector<cplx>> phase;  // e^{i m omega eps x_q}
  std::map<int, std::vector<cplx>> rho;    // conj psi(x) psi(x + j a)
  for (const auto& [mj, c] : a.coefficients()) {
    if (!phase.count(mj.first)) {
      auto& t = phase[mj.first];
      t.resize(n);
      const double theta = mj.first * a.omega() * w.eps;
      for (std::size_t q = 0; q < n; ++q) t[q] = std::polar(1.0, theta * w.x(q));
    }
    if (!rho.count(mj.second)) {
      auto& r = rho[mj.second];
      r.resize(n);
      const long long shift = static_cast<long long>(mj.second) * nx;
      for (std::size_t q = 0; q < n; ++q)
        r[q] = std::conj(w.psi.values[q]) * w.psi.values[wrap(static_cast<long long>(q) + shift, n)];
    }
  }
  cplx total = 0.0;
  for (const auto& [mj, c] : a.coefficients()) {
    const auto& t = phase[mj.first];
    const auto& r = rho[mj.second];
    cplx s = 0.0;
    for (std::size_t q = 0; q < n; ++q) s += t[q] * r[q];
    const double theta = mj.first * a.omega() * w.eps;
    total += c * std::polar(1.0, 0.5 * theta * mj.second * per) * s;
  }
  return total;
}

double expectation(const WavePacket& w, const Observable& a, bool allow_non_hermitian) {
  const bool herm = a.hermitian();
  if (!herm && !allow_non_hermitian)
    throw NonHermitianError("observable symbol is not Hermitian (c_{-m,-j} != conj c_{m,j})");
  cplx v = expectation_complex(w, a);
  if (herm) {
    double scale = 0.0;
    for (const auto& [mj, c] : a.coefficients()) scale += std::abs(c);
    double nn = w.psi.norm();
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, scale) * std::max(1.0, nn * nn)) {
      std::ostringstream os;
      os << "Hermitian observable has expectation with imaginary part " << v.imag();
      throw Error(os.str());
    }
  }
  return v.real();
}

// ---------------------------------------------------------------- propagation

struct Propagator::Plan {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::size_t n = 0;
  explicit Plan(std::size_t size) : n(size) {
    std::lock_guard<std::mutex> lock(fftw_planner_lock());
    buf = fftw_alloc_complex(n);
    fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(fftw_planner_lock());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
  cplx* data() { return reinterpret_cast<cplx*>(buf); }
};

Propagator::Propagator(const WavePacket& shape, const PeriodicPotential& V, const ExternalFields& fields, double dtau)
    : eps_(shape.eps), dtau_(dtau) {
  if (fields.has_vector_potential())
    throw UnsupportedGaugeError(
        "vector potentials are not supported by the Schrödinger propagator; "
        "use the torus operator model (egorov-operator) for A != 0");
  if (fields.dim() != 1 || V.lattice().dim() != 1) throw Error("Schrödinger propagation supports d = 1 only");
  if (!V.lattice().same_as(shape.psi.lattice)) throw LatticeMismatchError("potential and wavefunction lattices differ");
  if (!(dtau > 0.0)) throw Error("time step must be positive");
  const double a = lattice_period(shape.psi.lattice);
  if (2 * static_cast<int>(std::ceil(V.cutoff() * a / kTwoPi - 1e-9)) >= shape.psi.n_x)
    throw GridShapeError("intra-cell grid does not resolve the periodic potential (need N_x > 2 max|g|)");
  const std::size_t n = shape.size();
  plan_ = std::make_unique<Plan>(n);
  potential_.resize(n);
  Vec x(1), r(1);
  for (std::size_t q = 0; q < n; ++q) {
    x[0] = shape.x(q);
    r[0] = eps_ * x[0];
    potential_[q] = V.value(x) + fields.phi(r);
  }
  xi2_.resize(n);
  const double L = shape.box_length();
  for (std::size_t j = 0; j < n; ++j) {
    long long jj = j < n / 2 ? static_cast<long long>(j) : static_cast<long long>(j) - static_cast<long long>(n);
    double xi = kTwoPi * static_cast<double>(jj) / L;
    xi2_[j] = xi * xi;
  }
  nyquist_ = 0.5 * std::pow(kPi * shape.psi.n_x / a, 2);
}

Propagator::~Propagator() = default;

void Propagator::run(WavePacket& w, double dt, long long steps) const {
  if (steps <= 0) return;
  const std::size_t n = potential_.size();
  if (w.size() != n || w.eps != eps_) throw GridShapeError("wavefunction does not match the propagator grid");
  std::vector<cplx> half(n), full(n), kin(n);
  for (std::size_t q = 0; q < n; ++q) {
    half[q] = std::polar(1.0, -0.5 * dt * potential_[q]);
    full[q] = half[q] * half[q];
    kin[q] = std::polar(1.0 / static_cast<double>(n), -0.5 * dt * xi2_[q]);
  }
  cplx* b = plan_->data();
  for (std::size_t q = 0; q < n; ++q) b[q] = w.psi.values[q] * half[q];
  for (long long s = 0; s < steps; ++s) {
    fftw_execute(plan_->fwd);
    for (std::size_t q = 0; q < n; ++q) b[q] *= kin[q];
    fftw_execute(plan_->bwd);
    const std::vector<cplx>& p = s + 1 == steps ? half : full;
    for (std::size_t q = 0; q < n; ++q) b[q] *= p[q];
  }
  for (std::size_t q = 0; q < n; ++q) w.psi.values[q] = b[q];
}

void Propagator::step(WavePacket& w, long long n) const { run(w, dtau_, n); }

void Propagator::advance(WavePacket& w, double t) const {
  if (t < 0.0) throw Error("propagation time must be non-negative");
  double tau = t / eps_;
  if (tau == 0.0) return;
  long long n = static_cast<long long>(std::ceil(tau / dtau_ - 1e-9));
  run(w, tau / static_cast<double>(n), n);
}

double default_dtau(const WavePacket& shape) {
  const double a = lattice_period(shape.psi.lattice);
  return 0.1 / (0.5 * std::pow(kPi * shape.psi.n_x / a, 2));
}

void propagate(WavePacket& w, const PeriodicPotential& V, const ExternalFields& fields, double t, double dtau) {
  Propagator p(w, V, fields, dtau);
  p.advance(w, t);
}

// ---------------------------------------------------------------- band packets

WavePacket prepare_band_packet(const BlochSpectrum& s, const PacketSpec& spec, int cells, int points, double eps) {
  WavePacket w(s.grid.lattice(), cells, points, eps);
  GapReport g = gap_check(s, spec.band);
  if (!g.isolated)
    throw DegenerateBandError("band " + std::to_string(spec.band) + " is not isolated (gap " + std::to_string(g.gap) + ")");
  const double a = lattice_period(s.grid.lattice());
  const double sigma_x = spec.sigma / eps;
  if (!(sigma_x >= 4.0 * a) || !(8.0 * sigma_x <= w.box_length())) {
    std::ostringstream os;
    os << "packet width " << sigma_x << " (microscopic) must span at least 4 cells and at most 1/8 of the box "
       << w.box_length();
    throw PacketWidthError(os.str());
  }
  for (std::size_t q = 0; q < w.size(); ++q) {
    double x = w.x(q);
    double u = (eps * x - spec.r0) / spec.sigma;
    w.psi.values[q] = std::polar(std::exp(-0.5 * u * u), spec.k0 * x);
  }
  w.psi = band_project(w.psi, s, spec.band);
  w.psi.normalize();
  return w;
}

double boundary_density(const WavePacket& w, double fraction) {
  const std::size_t n = w.size();
  const auto edge = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  double s = 0.0;
  for (std::size_t q = 0; q < n; ++q)
    if (q < edge || q + edge >= n) s += std::norm(w.psi.values[q]);
  return s;
}

ZakMoments zak_moments(const WavePacket& w) {
  ZakGrid z = zak_forward(w.psi);
  const std::size_t P = z.fiber_size();
  const double period = kTwoPi / lattice_period(w.psi.lattice);
  std::vector<double> wk(z.kgrid.size());
  std::size_t peak = 0;
  double total = 0.0;
  for (std::size_t k = 0; k < wk.size(); ++k) {
    double s = 0.0;
    for (std::size_t p = 0; p < P; ++p) s += std::norm(z.fiber(k)[p]);
    wk[k] = s;
    total += s;
    if (s > wk[peak]) peak = k;
  }
  const double ref = z.kgrid.point(peak)[0];
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < wk.size(); ++k) {
    double d = std::remainder(z.kgrid.point(k)[0] - ref, period);
    m1 += wk[k] * d;
    m2 += wk[k] * d * d;
  }
  m1 /= total;
  m2 /= total;
  return {ref + m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

// ---------------------------------------------------------------- refit

Refit refit_observable(const Lattice& lat, double slow_length, const std::function<double(double, double)>& f,
                       const RefitOptions& o) {
  require_line(lat);
  if (o.r_modes < 4 || o.k_modes < 4 || o.r_modes % 2 || o.k_modes % 2)
    throw Error("refit sample counts must be even and at least 4");
  const int mr = o.r_modes, mk = o.k_modes;
  const double a = lattice_period(lat);
  const double omega = kTwoPi / slow_length;
  std::vector<double> samples(static_cast<std::size_t>(mr) * mk);
  parallel_for(samples.size(), o.threads > 0 ? o.threads : default_threads(), [&](std::size_t i) {
    int ir = static_cast<int>(i) / mk, ik = static_cast<int>(i) % mk;
    double r = (static_cast<double>(ir) / mr - 0.5) * slow_length;
    double k = (static_cast<double>(ik) / mk - 0.5) * kTwoPi / a;
    samples[i] = f(r, k);
  });
  // separable DFT; coefficients for m in (-mr/2, mr/2), j in (-mk/2, mk/2)
  MatXc stage(mr, mk);
  for (int ir = 0; ir < mr; ++ir)
    for (int j = -mk / 2; j < mk / 2; ++j) {
      cplx s = 0.0;
      for (int ik = 0; ik < mk; ++ik) {
        double u = static_cast<double>(ik) / mk - 0.5;
        s += samples[static_cast<std::size_t>(ir) * mk + ik] * std::polar(1.0, -kTwoPi * j * u);
      }
      stage(ir, j + mk / 2) = s / static_cast<double>(mk);
    }
  Refit out;
  out.observable = Observable(lat, omega);
  double scale = 0.0;
  MatXc c(mr, mk);
  for (int m = -mr / 2; m < mr / 2; ++m)
    for (int j = -mk / 2; j < mk / 2; ++j) {
      cplx s = 0.0;
      for (int ir = 0; ir < mr; ++ir) {
        double v = static_cast<double>(ir) / mr - 0.5;
        s += stage(ir, j + mk / 2) * std::polar(1.0, -kTwoPi * m * v);
      }
      c(m + mr / 2, j + mk / 2) = s / static_cast<double>(mr);
      scale = std::max(scale, std::abs(c(m + mr / 2, j + mk / 2)));
    }
  const int inner_m = 3 * mr / 8, inner_j = 3 * mk / 8;
  for (int m = -mr / 2; m < mr / 2; ++m)
    for (int j = -mk / 2; j < mk / 2; ++j) {
      cplx v = c(m + mr / 2, j + mk / 2);
      bool nyquist = m == -mr / 2 || j == -mk / 2;
      if (nyquist || std::abs(m) > inner_m || std::abs(j) > inner_j) out.tail += std::abs(v);
      if (nyquist || std::abs(v) <= 1e-16 * scale) continue;
      out.observable.add(m, j, v);
    }
  if (out.tail > o.tol) {
    std::ostringstream os;
    os << "transported symbol is not resolved by " << mr << " x " << mk << " modes (tail " << out.tail
       << " > " << o.tol << "); increase the mode budget";
    throw ModeBudgetError(os.str());
  }
  return out;
}

// ---------------------------------------------------------------- Egorov

double EgorovRun::max_gap() const {
  double g = 0.0;
  for (const auto& s : samples) g = std::max(g, s.gap);
  return g;
}

namespace {

void check_times(const std::vector<double>& t) {
  if (t.empty()) throw Error("Egorov run needs at least one time");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] < 0.0 || (i > 0 && t[i] <= t[i - 1])) throw Error("Egorov times must be non-negative and increasing");
}

}  // namespace

QuantumSeries heisenberg_series(const WavePacket& psi0, const PeriodicPotential& V, const ExternalFields& fields,
                                const Observable& a, const EgorovOptions& o) {
  check_times(o.times);
  const double dtau = o.dtau > 0.0 ? o.dtau : default_dtau(psi0);
  QuantumSeries out;
  Propagator prop(psi0, V, fields, dtau);
  if (o.check_dtau) {
    double window = std::min(o.times.back(), 2.0 * psi0.eps);
    WavePacket coarse = psi0, fine = psi0;
    prop.advance(coarse, window);
    Propagator half(psi0, V, fields, 0.5 * dtau);
    half.advance(fine, window);
    // up to a global phase
    out.dtau_change = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(coarse.psi.dot(fine.psi))));
    if (out.dtau_change > o.dtau_tol)
      throw ConvergenceError("time step not converged: dtau halving changes the state by " +
                             std::to_string(out.dtau_change));
  }
  WavePacket w = psi0;
  double now = 0.0;
  for (double t : o.times) {
    prop.advance(w, t - now);
    now = t;
    out.t.push_back(t);
    out.value.push_back(expectation(w, a));
    out.boundary = std::max(out.boundary, boundary_density(w));
  }
  if (out.boundary > o.boundary_tol)
    throw Error("wavepacket reached the box boundary (density " + std::to_string(out.boundary) + "); enlarge the box");
  return out;
}

std::vector<EgorovSample> transported_series(const WavePacket& psi0, const Observable& a, const EffectiveModel& model,
                                             FlowVariant variant, const EgorovOptions& o) {
  check_times(o.times);
  if (model.fields().has_vector_potential())
    throw UnsupportedGaugeError("transported line observables need A = 0; use the torus operator model");
  if (std::abs(model.eps() - psi0.eps) > 1e-14) throw Error("model eps differs from the wavefunction eps");
  const Lattice& lat = psi0.psi.lattice;
  const int mr = o.refit.r_modes, mk = o.refit.k_modes;
  const double L = psi0.slow_length();
  const double per = lattice_period(lat);
  std::vector<FlowState> z(static_cast<std::size_t>(mr) * mk);
  for (int ir = 0; ir < mr; ++ir)
    for (int ik = 0; ik < mk; ++ik) {
      FlowState& s = z[static_cast<std::size_t>(ir) * mk + ik];
      s.r = Vec::Constant(1, (static_cast<double>(ir) / mr - 0.5) * L);
      s.p = Vec::Constant(1, (static_cast<double>(ik) / mk - 0.5) * kTwoPi / per);
    }
  const int threads = o.refit.threads > 0 ? o.refit.threads : default_threads();
  std::vector<EgorovSample> out;
  double now = 0.0;
  for (double t : o.times) {
    if (t > now) z = flow_ensemble(model, variant, z, t - now, o.flow_step, threads);
    now = t;
    std::vector<double> vals(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) vals[i] = a.value(z[i].r[0], z[i].p[0]).real();
    auto lookup = [&](double r, double k) {
      int ir = static_cast<int>(std::lround((r / L + 0.5) * mr));
      int ik = static_cast<int>(std::lround((k * per / kTwoPi + 0.5) * mk));
      return vals[static_cast<std::size_t>(std::clamp(ir, 0, mr - 1)) * mk + std::clamp(ik, 0, mk - 1)];
    };
    RefitOptions ro = o.refit;
    ro.threads = 1;
    Refit fit = refit_observable(lat, L, lookup, ro);
    EgorovSample s;
    s.t = t;
    s.classical = expectation(psi0, fit.observable);
    s.refit_tail = fit.tail;
    out.push_back(s);
  }
  return out;
}

EgorovRun combine_series(const QuantumSeries& q, std::vector<EgorovSample> c) {
  if (q.t.size() != c.size()) throw Error("quantum and classical series have different lengths");
  EgorovRun run;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(q.t[i] - c[i].t) > 1e-14) throw Error("quantum and classical series use different times");
    c[i].quantum = q.value[i];
    c[i].gap = std::abs(c[i].quantum - c[i].classical);
  }
  run.samples = std::move(c);
  run.boundary = q.boundary;
  run.dtau_change = q.dtau_change;
  return run;
}

EgorovRun egorov_gap(const WavePacket& psi0, const PeriodicPotential& V, const Observable& a,
                     const EffectiveModel& model, FlowVariant variant, const EgorovOptions& o) {
  QuantumSeries q = heisenberg_series(psi0, V, model.fields(), a, o);
  return combine_series(q, transported_series(psi0, a, model, variant, o));
}

}  // namespace semibloch

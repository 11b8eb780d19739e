#include "semibloch/weyl_torus.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/flow.hpp"
#include "semibloch/parallel.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace semibloch {

namespace {

std::vector<int> key_of(const IVec& n) { return std::vector<int>(n.data(), n.data() + n.size()); }

IVec ivec_of(const std::vector<int>& k) {
  IVec n(static_cast<int>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) n[static_cast<int>(i)] = k[i];
  return n;
}

double min_lattice_length(const Lattice& lat) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < lat.dim(); ++i) m = std::min(m, lat.direct().col(i).norm());
  return m;
}

cplx mode_sum(const std::vector<SymbolSeries::Mode>& modes, const Vec& r) {
  cplx s = 0.0;
  for (const auto& m : modes) s += m.coeff * std::polar(1.0, m.freq.dot(r));
  return s;
}

}  // namespace

// ---------------------------------------------------------------- symbols

SymbolSeries SymbolSeries::from_observable(const Observable& a) {
  SymbolSeries b(a.lattice());
  for (const auto& [mj, c] : a.coefficients()) {
    IVec n(1);
    n << mj.second;
    Vec q(1);
    q << mj.first * a.omega();
    b.add(n, q, c);
  }
  return b;
}

void SymbolSeries::add(const IVec& shift, const Vec& freq, cplx c) {
  if (lat_.dim() == 0) throw Error("symbol series has no lattice");
  if (shift.size() != lat_.dim() || freq.size() != lat_.dim()) throw Error("symbol term dimension does not match the lattice");
  auto& list = modes_[key_of(shift)];
  for (auto& m : list)
    if ((m.freq - freq).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, freq.cwiseAbs().maxCoeff())) {
      m.coeff += c;
      return;
    }
  list.push_back(Mode{freq, c});
}

std::size_t SymbolSeries::size() const {
  std::size_t n = 0;
  for (const auto& [k, v] : modes_) n += v.size();
  return n;
}

cplx SymbolSeries::value(const Vec& k, const Vec& r) const {
  cplx s = 0.0;
  for (const auto& [key, list] : modes_) {
    Vec gamma = lat_.lattice_vector(ivec_of(key), Space::direct);
    s += mode_sum(list, r) * std::polar(1.0, gamma.dot(k));
  }
  return s;
}

cplx SymbolSeries::coefficient(const IVec& shift, const Vec& r) const {
  auto it = modes_.find(key_of(shift));
  return it == modes_.end() ? cplx(0.0) : mode_sum(it->second, r);
}

bool SymbolSeries::real_symbol(double tol) const {
  double scale = 0.0;
  for (const auto& [key, list] : modes_)
    for (const auto& m : list) scale = std::max(scale, std::abs(m.coeff));
  const double bound = tol * std::max(1.0, scale);
  auto partner = [&](const std::vector<int>& key, const Mode& m) {
    std::vector<int> neg(key);
    for (auto& v : neg) v = -v;
    auto it = modes_.find(neg);
    cplx c = 0.0;
    if (it != modes_.end())
      for (const auto& o : it->second)
        if ((o.freq + m.freq).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.freq.cwiseAbs().maxCoeff())) c += o.coeff;
    return c;
  };
  for (const auto& [key, list] : modes_)
    for (const auto& m : list)
      if (std::abs(partner(key, m) - std::conj(m.coeff)) > bound) return false;
  return true;
}

int SymbolSeries::reach() const {
  int r = 0;
  for (const auto& [key, list] : modes_)
    for (int v : key) r = std::max(r, std::abs(v));
  return r;
}

double SymbolSeries::max_frequency() const {
  double f = 0.0;
  for (const auto& [key, list] : modes_)
    for (const auto& m : list) f = std::max(f, m.freq.norm());
  return f;
}

SymbolSeries& SymbolSeries::operator+=(const SymbolSeries& o) {
  if (lat_.dim() == 0) lat_ = o.lat_;
  if (!o.lat_.same_as(lat_)) throw LatticeMismatchError("symbol series on different lattices");
  for (const auto& [key, list] : o.modes_)
    for (const auto& m : list) add(ivec_of(key), m.freq, m.coeff);
  return *this;
}

SymbolSeries SymbolSeries::scaled(cplx s) const {
  SymbolSeries out(*this);
  for (auto& [key, list] : out.modes_)
    for (auto& m : list) m.coeff *= s;
  return out;
}

SymbolSeries poisson_bracket(const SymbolSeries& a, const SymbolSeries& b) {
  if (!a.lattice().same_as(b.lattice())) throw LatticeMismatchError("symbol series on different lattices");
  const Lattice& lat = a.lattice();
  SymbolSeries out(lat);
  for (const auto& [ka, la] : a.modes()) {
    IVec na = ivec_of(ka);
    Vec ga = lat.lattice_vector(na, Space::direct);
    for (const auto& [kb, lb] : b.modes()) {
      IVec nb = ivec_of(kb);
      Vec gb = lat.lattice_vector(nb, Space::direct);
      for (const auto& ma : la)
        for (const auto& mb : lb) {
          // (i ga).(i qb) - (i qa).(i gb)
          double w = -(ga.dot(mb.freq) - ma.freq.dot(gb));
          if (w == 0.0) continue;
          out.add(na + nb, ma.freq + mb.freq, w * ma.coeff * mb.coeff);
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------- basis

TorusBasis::TorusBasis(const Lattice& lat, int truncation) : lat_(lat), N_(truncation) {
  if (truncation < 1) throw BasisTruncationError("truncation must be at least 1");
  size_ = 1;
  for (int a = 0; a < lat.dim(); ++a) size_ *= 2 * truncation + 1;
}

IVec TorusBasis::label(Eigen::Index i) const {
  const int d = dim(), side = 2 * N_ + 1;
  IVec n(d);
  for (int a = d - 1; a >= 0; --a) {
    n[a] = static_cast<int>(i % side) - N_;
    i /= side;
  }
  return n;
}

Eigen::Index TorusBasis::index(const IVec& n) const {
  const int side = 2 * N_ + 1;
  Eigen::Index i = 0;
  for (int a = 0; a < dim(); ++a) {
    if (std::abs(n[a]) > N_) return -1;
    i = i * side + (n[a] + N_);
  }
  return i;
}

std::vector<Eigen::Index> TorusBasis::interior(int shell) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < size_; ++i)
    if (label(i).cwiseAbs().maxCoeff() <= N_ - shell) out.push_back(i);
  return out;
}

bool TorusOperator::hermitian(double tol) const {
  double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

TorusOperator quantize(const SymbolSeries& b, int truncation, double eps, const Vec& offset) {
  const Lattice& lat = b.lattice();
  if (lat.dim() == 0) throw Error("symbol series has no lattice");
  if (!(eps > 0.0)) throw Error("eps must be positive");
  if (b.reach() > 2 * truncation) {
    std::ostringstream os;
    os << "symbol shift " << b.reach() << " exceeds the basis of truncation " << truncation;
    throw BasisTruncationError(os.str());
  }
  const int d = lat.dim();
  TorusOperator op;
  op.basis = TorusBasis(lat, truncation);
  op.eps = eps;
  op.offset = offset.size() == d ? offset : zero_vec(d);
  const Eigen::Index D = op.basis.size();
  op.matrix = MatXc::Zero(D, D);
  op.edge.assign(static_cast<std::size_t>(D), 0);
  struct Entry {
    IVec shift;
    const std::vector<SymbolSeries::Mode>* modes;
  };
  std::vector<Entry> entries;
  for (const auto& [key, list] : b.modes()) entries.push_back({ivec_of(key), &list});
  for (Eigen::Index i = 0; i < D; ++i) {
    IVec n = op.basis.label(i);
    Vec xn = lat.lattice_vector(n, Space::direct);
    for (const auto& e : entries) {
      IVec np = n - e.shift;
      Eigen::Index j = op.basis.index(np);
      if (j < 0) {
        op.edge[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      Vec mid = eps * (op.offset + 0.5 * (xn + lat.lattice_vector(np, Space::direct)));
      op.matrix(j, i) += mode_sum(*e.modes, mid);
    }
  }
  return op;
}

// ---------------------------------------------------------------- fits

namespace {

struct FitShape {
  int d = 0;
  std::vector<int> dims;  // k axes then r axes
  std::size_t total = 1;
};

FitShape fit_shape(const Lattice& lat, const SymbolFitOptions& o) {
  if (o.k_modes < 4 || o.r_modes < 4 || o.k_modes % 2 || o.r_modes % 2)
    throw Error("symbol fit sample counts must be even and at least 4");
  FitShape s;
  s.d = lat.dim();
  for (int a = 0; a < s.d; ++a) s.dims.push_back(o.k_modes);
  for (int a = 0; a < s.d; ++a) s.dims.push_back(o.r_modes);
  for (int n : s.dims) s.total *= static_cast<std::size_t>(n);
  return s;
}

std::vector<int> unravel(std::size_t i, const std::vector<int>& dims) {
  std::vector<int> idx(dims.size());
  for (std::size_t a = dims.size(); a-- > 0;) {
    idx[a] = static_cast<int>(i % static_cast<std::size_t>(dims[a]));
    i /= static_cast<std::size_t>(dims[a]);
  }
  return idx;
}

// in-place multi-dimensional DFT
void dft(std::vector<cplx>& data, const std::vector<int>& dims, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_lock());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_lock());
  fftw_destroy_plan(plan);
}

}  // namespace

SymbolFitNodes symbol_fit_nodes(const Lattice& lat, double period, const SymbolFitOptions& o) {
  if (!(period > 0.0)) throw Error("symbol period must be positive");
  FitShape s = fit_shape(lat, o);
  SymbolFitNodes nodes;
  nodes.grid.resize(s.total);
  nodes.mid.resize(o.check_residual ? s.total : 0);
  for (std::size_t i = 0; i < s.total; ++i) {
    std::vector<int> idx = unravel(i, s.dims);
    for (int shifted = 0; shifted < (o.check_residual ? 2 : 1); ++shifted) {
      Vec u(s.d), r(s.d);
      for (int a = 0; a < s.d; ++a) {
        u[a] = (idx[a] + 0.5 * shifted) / o.k_modes;
        r[a] = period * (idx[s.d + a] + 0.5 * shifted) / o.r_modes;
      }
      CanonicalPoint p{lat.to_cartesian(u, Space::dual), r};
      (shifted ? nodes.mid : nodes.grid)[i] = p;
    }
  }
  return nodes;
}

SymbolFit fit_from_samples(const Lattice& lat, double period, const SymbolFitOptions& o,
                           const std::vector<double>& grid_values, const std::vector<double>& mid_values) {
  FitShape s = fit_shape(lat, o);
  if (grid_values.size() != s.total) throw Error("symbol fit sample count does not match the node grid");
  if (o.check_residual && mid_values.size() != s.total) throw Error("symbol fit residual samples are missing");
  std::vector<cplx> c(grid_values.begin(), grid_values.end());
  dft(c, s.dims, FFTW_FORWARD);
  double peak = 0.0;
  for (auto& v : c) {
    v /= static_cast<double>(s.total);
    peak = std::max(peak, std::abs(v));
  }
  SymbolFit out;
  out.series = SymbolSeries(lat);
  std::vector<cplx> kept(s.total, cplx(0.0));
  for (std::size_t i = 0; i < s.total; ++i) {
    std::vector<int> idx = unravel(i, s.dims);
    bool nyquist = false, outer = false;
    IVec n(s.d);
    Vec q(s.d);
    for (int a = 0; a < 2 * s.d; ++a) {
      const int M = s.dims[a];
      int m = idx[a] < M / 2 ? idx[a] : idx[a] - M;
      if (m == -M / 2) nyquist = true;
      if (8 * std::abs(m) > 3 * M) outer = true;
      if (a < s.d)
        n[a] = m;
      else
        q[a - s.d] = kTwoPi * m / period;
    }
    if (nyquist || outer) out.tail += std::abs(c[i]);
    if (nyquist || std::abs(c[i]) <= 1e-15 * peak) continue;
    out.series.add(n, q, c[i]);
    kept[i] = c[i];
  }
  if (o.check_residual) {
    // the kept series at the half-shifted nodes
    for (std::size_t i = 0; i < s.total; ++i) {
      if (kept[i] == 0.0) continue;
      std::vector<int> idx = unravel(i, s.dims);
      double ph = 0.0;
      for (int a = 0; a < 2 * s.d; ++a) {
        const int M = s.dims[a];
        int m = idx[a] < M / 2 ? idx[a] : idx[a] - M;
        ph += kPi * m / M;
      }
      kept[i] *= std::polar(1.0, ph);
    }
    dft(kept, s.dims, FFTW_BACKWARD);
    for (std::size_t i = 0; i < s.total; ++i) out.residual = std::max(out.residual, std::abs(kept[i] - mid_values[i]));
  }
  return out;
}

SymbolFit fit_symbol(const Lattice& lat, double period, const SymbolSampler& f, const SymbolFitOptions& o) {
  SymbolFitNodes nodes = symbol_fit_nodes(lat, period, o);
  std::vector<double> g = f(nodes.grid);
  std::vector<double> m = o.check_residual ? f(nodes.mid) : std::vector<double>{};
  SymbolFit fit = fit_from_samples(lat, period, o, g, m);
  if (fit.error() > o.tol) {
    std::ostringstream os;
    os << "symbol is not resolved by " << o.k_modes << " x " << o.r_modes << " modes per axis (tail " << fit.tail
       << ", residual " << fit.residual << " > " << o.tol << "); increase the mode budget";
    throw ModeBudgetError(os.str());
  }
  return fit;
}

namespace {

SymbolSampler hamiltonian_sampler(const EffectiveModel& model, int order) {
  if (order != 0 && order != 1) throw Error("Peierls order must be 0 or 1");
  return [&model, order](const std::vector<CanonicalPoint>& pts) {
    std::vector<double> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = model.h_cl_grad(pts[i].k, pts[i].r, order).value;
    return v;
  };
}

}  // namespace

TorusOperator peierls_operator(const EffectiveModel& model, int order, int truncation, double period,
                               const SymbolFitOptions& opts, SymbolFit* fit_out) {
  if (!(model.eps() > 0.0)) throw Error("Peierls operator needs eps > 0");
  SymbolFit fit;
  try {
    fit = fit_symbol(model.band().lattice(), period, hamiltonian_sampler(model, order), opts);
  } catch (const ModeBudgetError& e) {
    throw ModeBudgetError(std::string("Hamiltonian refit residual too large: ") + e.what());
  }
  TorusOperator h = quantize(fit.series, truncation, model.eps());
  if (fit_out) *fit_out = std::move(fit);
  return h;
}

// ---------------------------------------------------------------- evolution

TorusEvolution::TorusEvolution(const TorusOperator& h) : eps_(h.eps) {
  if (!h.hermitian(1e-10)) throw NonHermitianError("Hamiltonian matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatXc> es(h.matrix);
  if (es.info() != Eigen::Success) throw ConvergenceError("Hamiltonian eigendecomposition failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

MatXc TorusEvolution::propagator(double t) const {
  VecXc ph(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) ph[i] = std::polar(1.0, -values_[i] * t / eps_);
  return vectors_ * ph.asDiagonal() * vectors_.adjoint();
}

MatXc TorusEvolution::heisenberg(const MatXc& a, double t) const {
  if (a.rows() != vectors_.rows() || a.cols() != vectors_.rows()) throw Error("operator size does not match the propagator");
  MatXc x = vectors_.adjoint() * a * vectors_;
  const Eigen::Index D = values_.size();
  for (Eigen::Index j = 0; j < D; ++j)
    for (Eigen::Index i = 0; i < D; ++i) x(i, j) *= std::polar(1.0, (values_[i] - values_[j]) * t / eps_);
  return vectors_ * x * vectors_.adjoint();
}

double interior_norm(const MatXc& X, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  if (n == 0) throw BasisTruncationError("interior block is empty; enlarge the truncation");
  MatXc B(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) B(i, j) = X(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  double scale = B.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if ((B - B.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    MatXc H = 0.5 * (B + B.adjoint());
    Eigen::SelfAdjointEigenSolver<MatXc> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<MatXc> svd(B);
  return svd.singularValues()[0];
}

double heisenberg_gap(const TorusEvolution& U, const TorusOperator& a, const TorusOperator& transported, double t,
                      int shell) {
  if (a.basis.size() != transported.basis.size()) throw Error("operators live on different truncations");
  MatXc X = U.heisenberg(a.matrix, t) - transported.matrix;
  return interior_norm(X, a.basis.interior(shell));
}

double HeisenbergRun::max_gap() const {
  double g = 0.0;
  for (const auto& s : samples) g = std::max(g, s.gap);
  return g;
}

HeisenbergRun heisenberg_gap(const EffectiveModel& model, double period, const SymbolSeries& a,
                             const HeisenbergOptions& o) {
  const double eps = model.eps();
  const Lattice& lat = model.band().lattice();
  if (!(eps > 0.0)) throw Error("Heisenberg run needs eps > 0");
  if (o.flow_order != 0 && o.flow_order != 1) throw Error("flow order must be 0 or 1");
  if (o.times.empty()) throw Error("Heisenberg run needs at least one time");
  for (std::size_t i = 0; i < o.times.size(); ++i)
    if (o.times[i] < 0.0 || (i > 0 && o.times[i] <= o.times[i - 1]))
      throw Error("Heisenberg times must be non-negative and increasing");
  if (!a.lattice().same_as(lat)) throw LatticeMismatchError("observable and model use different lattices");
  if (!a.real_symbol(1e-12)) throw NonHermitianError("observable symbol is not real");
  for (const auto& [key, list] : a.modes())
    for (const auto& m : list)
      for (int i = 0; i < m.freq.size(); ++i) {
        double u = m.freq[i] * period / kTwoPi;
        if (std::abs(u - std::round(u)) > 1e-9) throw Error("observable frequencies are not multiples of 2 pi / period");
      }
  const int threads = o.threads > 0 ? o.threads : default_threads();

  HeisenbergRun run;
  SymbolFitNodes nodes = symbol_fit_nodes(lat, period, o.fit);
  SymbolFit hfit;
  {
    SymbolSampler hs = hamiltonian_sampler(model, 1);
    std::vector<double> g = hs(nodes.grid), m = o.fit.check_residual ? hs(nodes.mid) : std::vector<double>{};
    hfit = fit_from_samples(lat, period, o.fit, g, m);
    if (hfit.error() > o.fit.tol) {
      std::ostringstream os;
      os << "Hamiltonian refit residual too large (" << hfit.error() << " > " << o.fit.tol << "); increase the mode budget";
      throw ModeBudgetError(os.str());
    }
  }
  run.hamiltonian_refit = hfit.error();
  for (const auto& p : nodes.grid) run.speed = std::max(run.speed, model.h_cl_grad(p.k, p.r, 1).grad_k.norm());

  const double cell = min_lattice_length(lat);
  const double tau = o.times.back() / eps;
  int shell = o.shell;
  const int inner = static_cast<int>(std::ceil(o.interior / (eps * cell)));
  if (shell <= 0) {
    shell = static_cast<int>(std::ceil(1.3 * run.speed * tau / cell)) + 24 + 2 * a.reach();
    shell = std::max(shell, (inner + 6) / 7);
  }
  run.shell = shell;
  run.truncation = inner + shell;
  if (run.truncation > o.max_truncation) {
    std::ostringstream os;
    os << "Heisenberg run needs truncation " << run.truncation << " > " << o.max_truncation
       << "; shrink the interior window or the time window";
    throw BasisTruncationError(os.str());
  }

  TorusOperator h = quantize(hfit.series, run.truncation, eps);
  TorusOperator ah = quantize(a, run.truncation, eps);
  TorusEvolution U(h);

  EffectiveModel flow_model = o.flow_order == 1 ? model : model.with_eps(0.0);
  std::vector<FlowState> grid, mid;
  for (const auto& p : nodes.grid) grid.push_back(FlowState{p.r, p.k});
  for (const auto& p : nodes.mid) mid.push_back(FlowState{p.r, p.k});
  auto sample = [&](const std::vector<FlowState>& z) {
    std::vector<double> v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[i] = a.value(z[i].p, z[i].r).real();
    return v;
  };
  double t_prev = 0.0;
  for (double t : o.times) {
    if (t > t_prev) {
      grid = flow_ensemble(flow_model, FlowVariant::canonical, grid, t - t_prev, o.flow_step, threads);
      if (!mid.empty()) mid = flow_ensemble(flow_model, FlowVariant::canonical, mid, t - t_prev, o.flow_step, threads);
    }
    t_prev = t;
    SymbolFit fit = fit_from_samples(lat, period, o.fit, sample(grid), mid.empty() ? std::vector<double>{} : sample(mid));
    if (fit.error() > o.fit.tol) {
      std::ostringstream os;
      os << "transported symbol at t = " << t << " is not resolved by " << o.fit.k_modes << " x " << o.fit.r_modes
         << " modes per axis (refit error " << fit.error() << " > " << o.fit.tol << "); increase the mode budget";
      throw ModeBudgetError(os.str());
    }
    TorusOperator moved = quantize(fit.series, run.truncation, eps);
    HeisenbergSample s;
    s.t = t;
    s.refit = fit.error();
    s.gap = heisenberg_gap(U, ah, moved, t, shell);
    run.samples.push_back(s);
  }
  return run;
}

double moyal_residual(const SymbolSeries& a, const SymbolSeries& b, int truncation, double eps, int shell) {
  TorusOperator A = quantize(a, truncation, eps), B = quantize(b, truncation, eps);
  TorusOperator P = quantize(poisson_bracket(a, b), truncation, eps);
  MatXc X = (kI / eps) * (A.matrix * B.matrix - B.matrix * A.matrix) - P.matrix;
  return interior_norm(X, A.basis.interior(std::max(shell, a.reach() + b.reach())));
}

// ---------------------------------------------------------------- Zak

GridFunction apply_torus_on_zak(const WavePacket& psi, const Observable& a) {
  const GridFunction& f = psi.psi;
  if (f.dim() != 1) throw Error("Zak comparison supports d = 1 only");
  if (f.n_cells % 2) throw GridShapeError("Zak comparison needs an even number of cells");
  const int Nc = f.n_cells, half = Nc / 2;
  SymbolSeries b = SymbolSeries::from_observable(a);
  ZakGrid z = zak_forward(f);
  const Lattice& lat = f.lattice;
  const double cell = lat.direct()(0, 0);
  const std::size_t P = z.fiber_size();
  const double norm = 1.0 / std::sqrt(static_cast<double>(Nc));
  ZakGrid out = z;
  for (std::size_t p = 0; p < P; ++p) {
    Vec y = lat.to_cartesian(z.cell_fraction(p), Space::direct);
    // cell coefficients on labels -half..half (the last one is absent on the box)
    VecXc c = VecXc::Zero(2 * half + 1);
    for (int n = -half; n < half; ++n) {
      double x = y[0] + cell * n;
      cplx s = 0.0;
      for (std::size_t j = 0; j < z.kgrid.size(); ++j) s += std::polar(1.0, z.kgrid.point(j)[0] * x) * z.fiber(j)[p];
      c[n + half] = norm * s;
    }
    TorusOperator M = quantize(b, half, psi.eps, y);
    VecXc cp = M.matrix * c;
    for (std::size_t j = 0; j < z.kgrid.size(); ++j) {
      const double k = z.kgrid.point(j)[0];
      cplx s = 0.0;
      for (int n = -half; n < half; ++n) s += std::polar(1.0, -k * (y[0] + cell * n)) * cp[n + half];
      out.fiber(j)[p] = norm * s;
    }
  }
  return zak_inverse(out);
}

double zak_consistency_check(const Observable& a, const WavePacket& psi) {
  GridFunction t = apply_torus_on_zak(psi, a);
  GridFunction l = apply_observable(psi, a);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += std::norm(t.values[i] - l.values[i]);
  return std::sqrt(s);
}

double zak_consistency_residual(const Observable& a, const WavePacket& shape, int* tested) {
  const int Nc = shape.psi.n_cells, Nx = shape.psi.n_x;
  if (shape.psi.dim() != 1) throw Error("Zak comparison supports d = 1 only");
  if (Nc % 4) throw GridShapeError("Zak test space needs a multiple of 4 cells");
  if (a.max_harmonic() > Nc / 4 - 1) throw BasisTruncationError("symbol reach exceeds a quarter of the box");
  double worst = 0.0;
  int count = 0;
  for (int n = -Nc / 4; n < Nc / 4; ++n)
    for (int p = 0; p < Nx; ++p) {
      WavePacket e = shape;
      std::fill(e.psi.values.begin(), e.psi.values.end(), cplx(0.0));
      e.psi.values[static_cast<std::size_t>((n + Nc / 2) * Nx + p)] = 1.0;
      worst = std::max(worst, zak_consistency_check(a, e));
      ++count;
    }
  if (tested) *tested = count;
  return worst;
}

}  // namespace semibloch

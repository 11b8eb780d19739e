#pragma once

#include "semibloch/effective.hpp"
#include "semibloch/lattice.hpp"
#include "semibloch/quantum.hpp"
#include "semibloch/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace semibloch {

// b(k, r) = sum_gamma b_gamma(r) e^{i gamma.k}, b_gamma(r) = sum_q c e^{i q.r}
class SymbolSeries {
 public:
  struct Mode {
    Vec freq;
    cplx coeff;
  };

  SymbolSeries() = default;
  explicit SymbolSeries(const Lattice& lat) : lat_(lat) {}
  // b(k, r) = a(r, k)
  static SymbolSeries from_observable(const Observable& a);

  const Lattice& lattice() const { return lat_; }
  int dim() const { return lat_.dim(); }
  // shift in lattice coefficients
  void add(const IVec& shift, const Vec& freq, cplx c);
  const std::map<std::vector<int>, std::vector<Mode>>& modes() const { return modes_; }
  std::size_t size() const;
  bool empty() const { return modes_.empty(); }

  cplx value(const Vec& k, const Vec& r) const;
  cplx coefficient(const IVec& shift, const Vec& r) const;
  // b_{-gamma}(r) = conj b_gamma(r)
  bool real_symbol(double tol = 1e-12) const;
  int reach() const;  // max |shift|_inf
  double max_frequency() const;

  SymbolSeries& operator+=(const SymbolSeries& o);
  SymbolSeries scaled(cplx s) const;

 private:
  Lattice lat_;
  std::map<std::vector<int>, std::vector<Mode>> modes_;
};

// d_k a . d_r b - d_r a . d_k b
SymbolSeries poisson_bracket(const SymbolSeries& a, const SymbolSeries& b);

// labels n in [-N, N]^d; |n> = e^{-i gamma(n).k}, i eps grad_k |n> = eps gamma(n) |n>
class TorusBasis {
 public:
  TorusBasis() = default;
  TorusBasis(const Lattice& lat, int truncation);
  const Lattice& lattice() const { return lat_; }
  int dim() const { return lat_.dim(); }
  int truncation() const { return N_; }
  Eigen::Index size() const { return size_; }
  IVec label(Eigen::Index i) const;
  Eigen::Index index(const IVec& n) const;  // -1 outside
  // labels with |n|_inf <= N - shell
  std::vector<Eigen::Index> interior(int shell) const;

 private:
  Lattice lat_;
  int N_ = 0;
  Eigen::Index size_ = 0;
};

struct TorusOperator {
  TorusBasis basis;
  double eps = 1.0;
  Vec offset;               // spectrum of i eps grad_k is eps (offset + gamma)
  MatXc matrix;
  std::vector<char> edge;   // columns whose image left the basis

  bool hermitian(double tol = 1e-12) const;
};

// e^{i gamma.k/2} b_gamma(i eps grad_k) e^{i gamma.k/2} summed over the series
TorusOperator quantize(const SymbolSeries& b, int truncation, double eps, const Vec& offset = Vec());

// sampling of a periodic symbol on [zone] x [0, period)^d
struct SymbolFitOptions {
  int k_modes = 32;   // per axis, even
  int r_modes = 32;   // per axis, even
  double tol = 1e-8;  // bound on max(tail, residual)
  bool check_residual = true;
};
struct SymbolFitNodes {
  std::vector<CanonicalPoint> grid;  // row-major over (k axes, r axes)
  std::vector<CanonicalPoint> mid;   // half-step shifted copy for the residual
};
struct SymbolFit {
  SymbolSeries series;
  double tail = 0.0;      // sum |c| outside the inner 3/4 of the budget
  double residual = 0.0;  // max |fit - f| at the shifted nodes
  double error() const { return std::max(tail, residual); }
};
using SymbolSampler = std::function<std::vector<double>(const std::vector<CanonicalPoint>&)>;

SymbolFitNodes symbol_fit_nodes(const Lattice& lat, double period, const SymbolFitOptions& opts);
SymbolFit fit_from_samples(const Lattice& lat, double period, const SymbolFitOptions& opts,
                           const std::vector<double>& grid_values, const std::vector<double>& mid_values);
// throws ModeBudgetError when the error exceeds opts.tol
SymbolFit fit_symbol(const Lattice& lat, double period, const SymbolSampler& f, const SymbolFitOptions& opts);

// quantized h0 (order 0) or h0 + eps h1 (order 1) of a model with period-periodic fields
TorusOperator peierls_operator(const EffectiveModel& model, int order, int truncation, double period,
                               const SymbolFitOptions& opts = {}, SymbolFit* fit = nullptr);

// e^{-i h t / eps} from one Hermitian eigendecomposition
class TorusEvolution {
 public:
  explicit TorusEvolution(const TorusOperator& h);
  const VecX& spectrum() const { return values_; }
  MatXc propagator(double t) const;
  // e^{i h t/eps} a e^{-i h t/eps}
  MatXc heisenberg(const MatXc& a, double t) const;

 private:
  double eps_;
  VecX values_;
  MatXc vectors_;
};

// spectral norm of X restricted to the given basis indices
double interior_norm(const MatXc& X, const std::vector<Eigen::Index>& idx);

// || e^{iht/eps} a e^{-iht/eps} - transported ||, interior block
double heisenberg_gap(const TorusEvolution& U, const TorusOperator& a, const TorusOperator& transported, double t,
                      int shell);

struct HeisenbergOptions {
  std::vector<double> times{0.5, 1.0, 1.5, 2.0};  // increasing
  double flow_step = 0.01;
  int flow_order = 1;        // classical flow of h0 + eps h1 (1) or of h0 (0)
  SymbolFitOptions fit{64, 64, 1e-8, true};
  double interior = 2.0;     // half-width of the interior window in r
  int shell = 0;             // 0: automatic
  int max_truncation = 512;
  int threads = 0;
};

struct HeisenbergSample {
  double t = 0.0;
  double gap = 0.0;
  double refit = 0.0;
};

struct HeisenbergRun {
  int truncation = 0;
  int shell = 0;
  double hamiltonian_refit = 0.0;
  double speed = 0.0;  // sup |d_k h| used for the shell
  std::vector<HeisenbergSample> samples;
  double max_gap() const;
};

// a: real symbol with period-periodic r-dependence; the quantum side always uses h0 + eps h1
HeisenbergRun heisenberg_gap(const EffectiveModel& model, double period, const SymbolSeries& a,
                             const HeisenbergOptions& opts);

// || (i/eps)[a^, b^] - {a, b}^ || on the interior block
double moyal_residual(const SymbolSeries& a, const SymbolSeries& b, int truncation, double eps, int shell);

// U* b^ U psi with b(k, r) = a(r, k), fiberwise on the Zak grid of psi
GridFunction apply_torus_on_zak(const WavePacket& psi, const Observable& a);
// || U* b^ U psi - a(eps x, -i d/dx) psi ||; psi must vanish within the symbol reach of the box edge
double zak_consistency_check(const Observable& a, const WavePacket& psi);
// max of the check over point deltas in the central half of the box
double zak_consistency_residual(const Observable& a, const WavePacket& shape, int* tested = nullptr);

}  // namespace semibloch

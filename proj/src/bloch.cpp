#include "semibloch/bloch.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace semibloch {

namespace {

std::vector<int> key_of(const IVec& g) { return std::vector<int>(g.data(), g.data() + g.size()); }

std::string coords_string(const IVec& g) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
  os << ")";
  return os.str();
}

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

PeriodicPotential::PeriodicPotential(const Lattice& lat, const std::vector<std::pair<IVec, cplx>>& coeffs)
    : lat_(lat) {
  for (const auto& [g, c] : coeffs) {
    if (g.size() != lat.dim()) throw LatticeMismatchError("potential coefficient has wrong dimension");
    if (c == cplx(0.0)) continue;
    coeffs_[key_of(g)] += c;
  }
  double scale = 0.0;
  for (const auto& [k, c] : coeffs_) scale = std::max(scale, std::abs(c));
  for (const auto& [k, c] : coeffs_) {
    IVec g = Eigen::Map<const Eigen::VectorXi>(k.data(), static_cast<Eigen::Index>(k.size()));
    cplx partner = coefficient(IVec(-g));
    if (std::abs(partner - std::conj(c)) > 1e-12 * std::max(1.0, scale))
      throw Error("potential is not real: V(-G) != conj V(G) at G = " + coords_string(g));
    cutoff_ = std::max(cutoff_, lat_.lattice_vector(g, Space::dual).norm());
  }
}

PeriodicPotential PeriodicPotential::cosine_series(const Lattice& lat, const std::vector<double>& cc,
                                                   const std::vector<double>& ss) {
  if (lat.dim() != 1) throw LatticeMismatchError("cosine_series is one-dimensional");
  std::vector<std::pair<IVec, cplx>> co;
  std::size_t n = std::max(cc.size(), ss.size());
  for (std::size_t i = 0; i < n; ++i) {
    double c = i < cc.size() ? cc[i] : 0.0;
    double s = i < ss.size() ? ss[i] : 0.0;
    IVec g(1);
    g[0] = static_cast<int>(i + 1);
    co.push_back({g, cplx(0.5 * c, -0.5 * s)});
    co.push_back({IVec(-g), cplx(0.5 * c, 0.5 * s)});
  }
  return PeriodicPotential(lat, co);
}

cplx PeriodicPotential::coefficient(const IVec& g) const {
  auto it = coeffs_.find(key_of(g));
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

double PeriodicPotential::value(const Vec& x) const {
  double v = 0.0;
  for (const auto& [k, c] : coeffs_) {
    IVec g = Eigen::Map<const Eigen::VectorXi>(k.data(), static_cast<Eigen::Index>(k.size()));
    double ph = lat_.lattice_vector(g, Space::dual).dot(x);
    v += (c * std::exp(kI * ph)).real();
  }
  return v;
}

bool PeriodicPotential::inversion_symmetric(double tol) const {
  for (const auto& [k, c] : coeffs_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

PlaneWaveBasis::PlaneWaveBasis(const Lattice& lat, double cutoff) : lat_(lat), cutoff_(cutoff) {
  if (!(cutoff >= 0.0)) throw Error("plane-wave cutoff must be non-negative");
  const int d = lat.dim();
  IVec bound(d);
  for (int i = 0; i < d; ++i)
    bound[i] = static_cast<int>(std::floor(cutoff * lat.direct().col(i).norm() / kTwoPi)) + 1;
  IVec g = -bound;
  const double lim = cutoff * (1.0 + 1e-12) + 1e-12;
  while (true) {
    Vec G = lat.lattice_vector(g, Space::dual);
    if (G.norm() <= lim) {
      lookup_[key_of(g)] = static_cast<int>(coords_.size());
      coords_.push_back(g);
      vectors_.push_back(G);
    }
    int i = d - 1;
    while (i >= 0 && g[i] == bound[i]) {
      g[i] = -bound[i];
      --i;
    }
    if (i < 0) break;
    ++g[i];
  }
}

PlaneWaveBasis PlaneWaveBasis::cell_grid(const Lattice& lat, int n) {
  if (n < 1) throw GridShapeError("cell grid needs at least one point");
  PlaneWaveBasis b;
  b.lat_ = lat;
  const int d = lat.dim();
  IVec g = IVec::Constant(d, -n / 2);
  while (true) {
    b.lookup_[key_of(g)] = static_cast<int>(b.coords_.size());
    b.coords_.push_back(g);
    b.vectors_.push_back(lat.lattice_vector(g, Space::dual));
    b.cutoff_ = std::max(b.cutoff_, b.vectors_.back().norm());
    int i = d - 1;
    while (i >= 0 && g[i] == n - 1 - n / 2) {
      g[i] = -n / 2;
      --i;
    }
    if (i < 0) break;
    ++g[i];
  }
  return b;
}

int PlaneWaveBasis::find(const IVec& g) const {
  auto it = lookup_.find(key_of(g));
  return it == lookup_.end() ? -1 : it->second;
}

int PlaneWaveBasis::max_abs_coord() const {
  int m = 0;
  for (const auto& g : coords_) m = std::max(m, g.cwiseAbs().maxCoeff());
  return m;
}

MatXc FiberHamiltonian::velocity(const Vec& k, const MatXc& c, int axis) const {
  return c.adjoint() * derivative(k, axis) * c;
}

VecXc FiberHamiltonian::velocity_row(const Vec& k, const MatXc& c, int band, int axis) const {
  return (c.col(band).adjoint() * derivative(k, axis) * c).transpose();
}

MatXc assemble_hper(const Vec& k, const PeriodicPotential& V, const PlaneWaveBasis& basis) {
  if (!V.lattice().same_as(basis.lattice()))
    throw LatticeMismatchError("potential and plane-wave basis use different lattices");
  const int n = basis.size();
  MatXc h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = V.coefficient(IVec(basis.coords(i) - basis.coords(j)));
  for (int i = 0; i < n; ++i) h(i, i) += 0.5 * (k + basis.vector(i)).squaredNorm();
  return h;
}

PlaneWaveHamiltonian::PlaneWaveHamiltonian(PeriodicPotential V, PlaneWaveBasis basis)
    : V_(std::move(V)), basis_(std::move(basis)) {
  if (!V_.lattice().same_as(basis_.lattice()))
    throw LatticeMismatchError("potential and plane-wave basis use different lattices");
  potential_block_ = assemble_hper(Vec::Zero(basis_.lattice().dim()), V_, basis_);
  for (int i = 0; i < basis_.size(); ++i)
    potential_block_(i, i) -= 0.5 * basis_.vector(i).squaredNorm();
}

MatXc PlaneWaveHamiltonian::matrix(const Vec& k) const {
  MatXc h = potential_block_;
  for (int i = 0; i < basis_.size(); ++i) h(i, i) += 0.5 * (k + basis_.vector(i)).squaredNorm();
  return h;
}

MatXc PlaneWaveHamiltonian::derivative(const Vec& k, int axis) const {
  MatXc d = MatXc::Zero(size(), size());
  for (int i = 0; i < size(); ++i) d(i, i) = k[axis] + basis_.vector(i)[axis];
  return d;
}

MatXc PlaneWaveHamiltonian::velocity(const Vec& k, const MatXc& c, int axis) const {
  VecX w(size());
  for (int i = 0; i < size(); ++i) w[i] = k[axis] + basis_.vector(i)[axis];
  return c.adjoint() * (w.asDiagonal() * c);
}

VecXc PlaneWaveHamiltonian::velocity_row(const Vec& k, const MatXc& c, int band, int axis) const {
  VecXc w(size());
  for (int i = 0; i < size(); ++i) w[i] = (k[axis] + basis_.vector(i)[axis]) * c(i, band);
  return (w.adjoint() * c).transpose();
}

VecXc PlaneWaveHamiltonian::continue_vector(const VecXc& c, const IVec& shift) const {
  VecXc out = VecXc::Zero(size());
  for (int i = 0; i < size(); ++i) {
    int j = basis_.find(IVec(basis_.coords(i) + shift));
    if (j >= 0) out[i] = c[j];
  }
  return out;
}

SampledCellHamiltonian::SampledCellHamiltonian(PeriodicPotential V, int points)
    : V_(std::move(V)), points_(points) {
  if (V_.lattice().dim() != 1) throw LatticeMismatchError("sampled-cell Hamiltonian is one-dimensional");
  if (points < 2 || points % 2) throw GridShapeError("sampled-cell Hamiltonian needs an even number of points per cell");
  basis_ = PlaneWaveBasis::cell_grid(V_.lattice(), points);
  const int n = basis_.size();
  potential_block_ = MatXc::Zero(n, n);
  // aliasing: coefficient g lands on g mod n
  for (const auto& [key, c] : V_.coefficients()) {
    int g = key[0];
    for (int i = 0; i < n; ++i) {
      int gi = basis_.coords(i)[0];
      int gj = gi - g;
      gj = ((gj + n / 2) % n + n) % n - n / 2;
      potential_block_(i, basis_.find(IVec::Constant(1, gj))) += c;
    }
  }
}

double SampledCellHamiltonian::momentum(const Vec& k, int i) const {
  const double band = basis_.vector(1)[0] - basis_.vector(0)[0];
  const double period = band * points_;
  double xi = k[0] + basis_.vector(i)[0];
  return xi - period * std::floor((xi + 0.5 * period) / period);
}

MatXc SampledCellHamiltonian::matrix(const Vec& k) const {
  MatXc h = potential_block_;
  for (int i = 0; i < size(); ++i) {
    double xi = momentum(k, i);
    h(i, i) += 0.5 * xi * xi;
  }
  return h;
}

MatXc SampledCellHamiltonian::derivative(const Vec& k, int) const {
  MatXc d = MatXc::Zero(size(), size());
  for (int i = 0; i < size(); ++i) d(i, i) = momentum(k, i);
  return d;
}

VecXc SampledCellHamiltonian::continue_vector(const VecXc& c, const IVec& shift) const {
  const int n = size();
  VecXc out(n);
  for (int i = 0; i < n; ++i) {
    int g = basis_.coords(i)[0] + shift[0];
    g = ((g + n / 2) % n + n) % n - n / 2;
    out[i] = c[basis_.find(IVec::Constant(1, g))];
  }
  return out;
}

TwoLevelChernModel::TwoLevelChernModel(const Lattice& lat, double mass) : lat_(lat), mass_(mass) {
  if (lat.dim() != 2) throw LatticeMismatchError("two-level Chern model is two-dimensional");
}

Vec TwoLevelChernModel::dvector(const Vec& k) const {
  double s1 = k.dot(lat_.direct().col(0)), s2 = k.dot(lat_.direct().col(1));
  Vec d(3);
  d << std::sin(s1), std::sin(s2), mass_ + std::cos(s1) + std::cos(s2);
  return d;
}

namespace {
MatXc pauli_sum(double x, double y, double z) {
  MatXc h(2, 2);
  h << cplx(z, 0), cplx(x, -y), cplx(x, y), cplx(-z, 0);
  return h;
}
}  // namespace

MatXc TwoLevelChernModel::matrix(const Vec& k) const {
  Vec d = dvector(k);
  return pauli_sum(d[0], d[1], d[2]);
}

MatXc TwoLevelChernModel::derivative(const Vec& k, int axis) const {
  const Vec a1 = lat_.direct().col(0), a2 = lat_.direct().col(1);
  double s1 = k.dot(a1), s2 = k.dot(a2);
  double dx = std::cos(s1) * a1[axis];
  double dy = std::cos(s2) * a2[axis];
  double dz = -std::sin(s1) * a1[axis] - std::sin(s2) * a2[axis];
  return pauli_sum(dx, dy, dz);
}

BlochSpectrum solve_bands(std::shared_ptr<const FiberHamiltonian> model, const KGrid& grid,
                          const SolveOptions& opts) {
  if (!model->lattice().same_as(grid.lattice()))
    throw LatticeMismatchError("k-grid and Hamiltonian use different lattices");
  BlochSpectrum s;
  s.model = model;
  s.grid = grid;
  const int n = model->size();
  s.energies.resize(static_cast<Eigen::Index>(grid.size()), n);
  s.vectors.resize(grid.size());
  std::vector<int> status(grid.size(), 0);
  int threads = opts.threads > 0 ? opts.threads : default_threads();
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    Eigen::SelfAdjointEigenSolver<MatXc> es(model->matrix(grid.point(i)));
    if (es.info() != Eigen::Success) {
      status[i] = 1;
      return;
    }
    s.energies.row(static_cast<Eigen::Index>(i)) = es.eigenvalues().transpose();
    s.vectors[i] = es.eigenvectors();
  });
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (status[i]) throw ConvergenceError("eigensolver failed at k-grid index " + std::to_string(i));
  return s;
}

BlochSpectrum solve_bands(const PeriodicPotential& V, const PlaneWaveBasis& basis, const KGrid& grid,
                          const SolveOptions& opts) {
  auto model = std::make_shared<PlaneWaveHamiltonian>(V, basis);
  BlochSpectrum s = solve_bands(model, grid, opts);
  ConvergenceReport& rep = s.convergence;
  rep.tolerance = opts.convergence_tol;
  if (2 * opts.n_bands > basis.size()) {
    std::string msg = "cutoff too small: " + std::to_string(opts.n_bands) + " requested bands exceed half of " +
                      std::to_string(basis.size()) + " plane waves";
    if (opts.strict) throw ConvergenceError(msg);
    rep.warnings.push_back(msg);
  }
  if (opts.check_convergence) {
    PlaneWaveBasis big(basis.lattice(), 2.0 * basis.cutoff());
    PlaneWaveHamiltonian fine(V, big);
    std::size_t samples = std::min<std::size_t>(grid.size(), static_cast<std::size_t>(std::max(1, opts.convergence_samples)));
    int nb = std::min(opts.n_bands, basis.size());
    double change = 0.0;
    for (std::size_t m = 0; m < samples; ++m) {
      std::size_t i = m * grid.size() / samples;
      Eigen::SelfAdjointEigenSolver<MatXc> es(fine.matrix(grid.point(i)), Eigen::EigenvaluesOnly);
      for (int b = 0; b < nb; ++b)
        change = std::max(change, std::abs(es.eigenvalues()[b] - s.energy(i, b)));
    }
    rep.checked = true;
    rep.max_change = change;
    rep.converged = change <= opts.convergence_tol;
    if (!rep.converged) {
      std::ostringstream os;
      os << "bands not converged: doubling the cutoff moves the lowest " << nb << " bands by " << change
         << " > " << opts.convergence_tol;
      if (opts.strict) throw ConvergenceError(os.str());
      rep.warnings.push_back(os.str());
    }
  }
  return s;
}

GapReport gap_check(const BlochSpectrum& s, int band, double threshold) {
  if (band < 0 || band >= s.n_states()) throw Error("band index out of range");
  GapReport r;
  r.band = band;
  r.threshold = threshold;
  r.gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    double g = std::numeric_limits<double>::infinity();
    if (band > 0) g = std::min(g, s.energy(k, band) - s.energy(k, band - 1));
    if (band + 1 < s.n_states()) g = std::min(g, s.energy(k, band + 1) - s.energy(k, band));
    if (g < r.gap) {
      r.gap = g;
      r.argmin = k;
    }
  }
  r.isolated = r.gap > threshold;
  return r;
}

GridFunction::GridFunction(const Lattice& lat, int cells, int points) : lattice(lat), n_cells(cells), n_x(points) {
  if (cells < 1 || points < 1) throw GridShapeError("grid needs at least one cell and one point per cell");
  std::size_t n = 1;
  for (int i = 0; i < lat.dim(); ++i) n *= static_cast<std::size_t>(cells) * points;
  values.assign(n, cplx(0.0));
}

Vec GridFunction::fractional(std::size_t q) const {
  const int d = dim();
  const int m = axis_points();
  Vec f(d);
  for (int i = d - 1; i >= 0; --i) {
    int qi = static_cast<int>(q % m);
    q /= m;
    f[i] = (qi / n_x - n_cells / 2) + static_cast<double>(qi % n_x) / n_x - 0.5;
  }
  return f;
}

Vec GridFunction::position(std::size_t q) const { return lattice.to_cartesian(fractional(q), Space::direct); }

double GridFunction::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s);
}

cplx GridFunction::dot(const GridFunction& o) const {
  if (o.values.size() != values.size()) throw GridShapeError("grid functions have different shapes");
  cplx s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::conj(values[i]) * o.values[i];
  return s;
}

void GridFunction::normalize() {
  double n = norm();
  if (n == 0.0) throw Error("cannot normalize a zero wavefunction");
  for (auto& v : values) v /= n;
}

std::size_t ZakGrid::fiber_size() const { return static_cast<std::size_t>(ipow(n_x, lattice.dim())); }

double ZakGrid::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s);
}

Vec ZakGrid::cell_fraction(std::size_t p) const {
  const int d = lattice.dim();
  Vec u(d);
  for (int i = d - 1; i >= 0; --i) {
    u[i] = static_cast<double>(p % n_x) / n_x - 0.5;
    p /= n_x;
  }
  return u;
}

namespace {

// Reorder a grid function into [cell][point] blocks and back.
struct CellLayout {
  int d, nc, nx;
  std::size_t cells, points;
  CellLayout(int dim, int c, int x) : d(dim), nc(c), nx(x) {
    cells = static_cast<std::size_t>(ipow(c, dim));
    points = static_cast<std::size_t>(ipow(x, dim));
  }
  std::size_t grid_index(std::size_t c, std::size_t p) const {
    std::size_t q = 0;
    std::vector<int> ci(d), pi(d);
    for (int i = d - 1; i >= 0; --i) {
      ci[i] = static_cast<int>(c % nc);
      c /= nc;
      pi[i] = static_cast<int>(p % nx);
      p /= nx;
    }
    for (int i = 0; i < d; ++i) q = q * (static_cast<std::size_t>(nc) * nx) + static_cast<std::size_t>(ci[i]) * nx + pi[i];
    return q;
  }
};

// Apply the 1D Zak kernel along one cell axis, in place on [cell][point] data.
void zak_axis(std::vector<cplx>& data, const CellLayout& L, int axis, bool inverse) {
  const int nc = L.nc, nx = L.nx;
  const double sgn = inverse ? 1.0 : -1.0;
  const double norm = 1.0 / std::sqrt(static_cast<double>(nc));
  std::vector<cplx> cellphase(static_cast<std::size_t>(nc) * nc);
  for (int j = 0; j < nc; ++j)
    for (int n = 0; n < nc; ++n) {
      long long pj = static_cast<long long>(j - nc / 2) * (n - nc / 2);
      long long r = ((pj % nc) + nc) % nc;
      cellphase[static_cast<std::size_t>(j) * nc + n] = std::polar(norm, sgn * kTwoPi * static_cast<double>(r) / nc);
    }
  std::vector<cplx> pointphase(static_cast<std::size_t>(nx) * nc);
  for (int p = 0; p < nx; ++p)
    for (int j = 0; j < nc; ++j) {
      double u = static_cast<double>(p) / nx - 0.5;
      pointphase[static_cast<std::size_t>(p) * nc + j] = std::polar(1.0, sgn * kTwoPi * u * (j - nc / 2) / nc);
    }
  std::size_t cstride = static_cast<std::size_t>(ipow(nc, L.d - 1 - axis));
  std::size_t pstride = static_cast<std::size_t>(ipow(nx, L.d - 1 - axis));
  std::vector<cplx> in(nc), out(nc);
  for (std::size_t c0 = 0; c0 < L.cells; ++c0) {
    if ((c0 / cstride) % nc != 0) continue;
    for (std::size_t p = 0; p < L.points; ++p) {
      const cplx* pp = &pointphase[static_cast<std::size_t>((p / pstride) % nx) * nc];
      for (int n = 0; n < nc; ++n) in[n] = data[(c0 + n * cstride) * L.points + p];
      if (!inverse) {
        for (int j = 0; j < nc; ++j) {
          cplx acc = 0.0;
          const cplx* row = &cellphase[static_cast<std::size_t>(j) * nc];
          for (int n = 0; n < nc; ++n) acc += row[n] * in[n];
          out[j] = acc * pp[j];
        }
      } else {
        for (int j = 0; j < nc; ++j) in[j] *= pp[j];
        for (int n = 0; n < nc; ++n) {
          cplx acc = 0.0;
          for (int j = 0; j < nc; ++j) acc += cellphase[static_cast<std::size_t>(j) * nc + n] * in[j];
          out[n] = acc;
        }
      }
      for (int n = 0; n < nc; ++n) data[(c0 + n * cstride) * L.points + p] = out[n];
    }
  }
}

}  // namespace

ZakGrid zak_forward(const GridFunction& psi) {
  const int d = psi.dim();
  if (psi.n_cells < 1 || psi.n_x < 1 || psi.values.size() != static_cast<std::size_t>(ipow(psi.n_cells * psi.n_x, d)))
    throw GridShapeError("grid shape is not cells x intra-cell points");
  CellLayout L(d, psi.n_cells, psi.n_x);
  ZakGrid z;
  z.lattice = psi.lattice;
  z.n_cells = psi.n_cells;
  z.n_x = psi.n_x;
  z.kgrid = KGrid(psi.lattice, std::vector<int>(d, psi.n_cells));
  z.values.resize(L.cells * L.points);
  for (std::size_t c = 0; c < L.cells; ++c)
    for (std::size_t p = 0; p < L.points; ++p) z.values[c * L.points + p] = psi.values[L.grid_index(c, p)];
  for (int a = 0; a < d; ++a) zak_axis(z.values, L, a, false);
  return z;
}

GridFunction zak_inverse(const ZakGrid& z) {
  const int d = z.lattice.dim();
  CellLayout L(d, z.n_cells, z.n_x);
  if (z.values.size() != L.cells * L.points) throw GridShapeError("Zak grid has inconsistent shape");
  std::vector<cplx> data = z.values;
  for (int a = 0; a < d; ++a) zak_axis(data, L, a, true);
  GridFunction psi(z.lattice, z.n_cells, z.n_x);
  for (std::size_t c = 0; c < L.cells; ++c)
    for (std::size_t p = 0; p < L.points; ++p) psi.values[L.grid_index(c, p)] = data[c * L.points + p];
  return psi;
}

std::vector<cplx> zak_fiber_at(const GridFunction& psi, const Vec& s) {
  const int d = psi.dim();
  CellLayout L(d, psi.n_cells, psi.n_x);
  std::vector<cplx> out(L.points, cplx(0.0));
  const double norm = std::pow(static_cast<double>(psi.n_cells), -0.5 * d);
  for (std::size_t c = 0; c < L.cells; ++c) {
    for (std::size_t p = 0; p < L.points; ++p) {
      std::size_t q = L.grid_index(c, p);
      Vec f = psi.fractional(q);
      out[p] += std::polar(norm, -kTwoPi * f.dot(s)) * psi.values[q];
    }
  }
  return out;
}

namespace {

// columns: intra-cell samples of e^{2 pi i g.u}/sqrt(N_x^d) per plane wave
MatXc fiber_synthesis(const PlaneWaveBasis& basis, const ZakGrid& z) {
  std::size_t P = z.fiber_size();
  MatXc W(static_cast<Eigen::Index>(P), basis.size());
  const double norm = 1.0 / std::sqrt(static_cast<double>(P));
  for (std::size_t p = 0; p < P; ++p) {
    Vec u = z.cell_fraction(p);
    for (int i = 0; i < basis.size(); ++i)
      W(static_cast<Eigen::Index>(p), i) = std::polar(norm, kTwoPi * basis.coords(i).cast<double>().dot(u));
  }
  return W;
}

const PlaneWaveBasis& check_projection_inputs(const ZakGrid& z, const BlochSpectrum& s) {
  const PlaneWaveBasis* basis = s.model->plane_waves();
  if (!basis) throw Error("band projection needs a plane-wave spectrum");
  KGrid expect(z.lattice, std::vector<int>(z.lattice.dim(), z.n_cells));
  if (!s.grid.same_points(expect))
    throw GridShapeError("spectrum k-grid does not match the Zak grid of the wavefunction");
  if (s.model->sampled_points() > 0) {
    if (s.model->sampled_points() != z.n_x)
      throw GridShapeError("sampled-cell spectrum uses a different number of points per cell");
  } else if (2 * basis->max_abs_coord() >= z.n_x)
    throw GridShapeError("intra-cell grid does not resolve the plane-wave cutoff (need N_x > 2 max|g|)");
  return *basis;
}

}  // namespace

GridFunction band_project(const GridFunction& psi, const BlochSpectrum& s, int band) {
  ZakGrid z = zak_forward(psi);
  const PlaneWaveBasis& basis = check_projection_inputs(z, s);
  if (band < 0 || band >= s.n_states()) throw Error("band index out of range");
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    double g = std::numeric_limits<double>::infinity();
    if (band > 0) g = std::min(g, s.energy(k, band) - s.energy(k, band - 1));
    if (band + 1 < s.n_states()) g = std::min(g, s.energy(k, band + 1) - s.energy(k, band));
    if (g < 1e-10)
      throw DegenerateBandError("band " + std::to_string(band) + " is degenerate at k-grid index " + std::to_string(k));
  }
  MatXc W = fiber_synthesis(basis, z);
  const auto P = static_cast<Eigen::Index>(z.fiber_size());
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    Eigen::Map<VecXc> f(z.fiber(k), P);
    VecXc u = W * s.vectors[k].col(band);
    cplx a = u.dot(f);
    f = a * u;
  }
  return zak_inverse(z);
}

std::vector<double> band_weights(const GridFunction& psi, const BlochSpectrum& s) {
  ZakGrid z = zak_forward(psi);
  const PlaneWaveBasis& basis = check_projection_inputs(z, s);
  MatXc W = fiber_synthesis(basis, z);
  const auto P = static_cast<Eigen::Index>(z.fiber_size());
  std::vector<double> w(static_cast<std::size_t>(s.n_states()) + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    Eigen::Map<const VecXc> f(z.fiber(k), P);
    VecXc a = s.vectors[k].adjoint() * (W.adjoint() * f);
    for (int m = 0; m < s.n_states(); ++m) w[m] += std::norm(a[m]);
    total += f.squaredNorm();
  }
  double captured = 0.0;
  for (int m = 0; m < s.n_states(); ++m) captured += w[m];
  w.back() = std::max(0.0, total - captured);
  return w;
}

GridFunction bloch_state(const BlochSpectrum& s, int band, std::size_t k, int n_x) {
  const int d = s.grid.dim();
  for (int i = 1; i < d; ++i)
    if (s.grid.sizes()[i] != s.grid.sizes()[0]) throw GridShapeError("Bloch state needs equal grid sizes per axis");
  GridFunction psi(s.grid.lattice(), s.grid.sizes()[0], n_x);
  ZakGrid z = zak_forward(psi);
  const PlaneWaveBasis& basis = check_projection_inputs(z, s);
  MatXc W = fiber_synthesis(basis, z);
  const auto P = static_cast<Eigen::Index>(z.fiber_size());
  Eigen::Map<VecXc>(z.fiber(k), P) = W * s.vectors[k].col(band);
  return zak_inverse(z);
}

}  // namespace semibloch

#include "semibloch/geometry.hpp"

#include "semibloch/errors.hpp"
#include "semibloch/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace semibloch {

MatXc velocity_matrix(const BlochSpectrum& s, std::size_t k, int axis) {
  return s.model->velocity(s.grid.point(k), s.vectors[k], axis);
}

void require_nondegenerate(const BlochSpectrum& s, int band, double rel_tol) {
  if (band < 0 || band >= s.n_states()) throw Error("band index out of range");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    lo = std::min(lo, s.energy(k, band));
    hi = std::max(hi, s.energy(k, band));
  }
  const double tol = rel_tol * (hi > lo ? hi - lo : 1.0);
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    double g = std::numeric_limits<double>::infinity();
    if (band > 0) g = std::min(g, s.energy(k, band) - s.energy(k, band - 1));
    if (band + 1 < s.n_states()) g = std::min(g, s.energy(k, band + 1) - s.energy(k, band));
    if (g < tol) {
      std::ostringstream os;
      os << "band " << band << " is degenerate at k-grid index " << k << " (k = " << s.grid.point(k).transpose()
         << ", splitting " << g << ")";
      throw DegenerateBandError(os.str());
    }
  }
}

namespace {

// sum over m != n of w(E_n - E_m) * v^i_nm v^j_mn
template <class Weight, class Part>
Mat sum_over_states(const BlochSpectrum& s, std::size_t k, int band, Weight weight, Part part, double* tail) {
  const int d = s.grid.dim();
  std::vector<VecXc> v(d);  // v[a][m] = v^a_{nm}
  for (int a = 0; a < d; ++a) v[a] = s.model->velocity_row(s.grid.point(k), s.vectors[k], band, a);
  Mat out = Mat::Zero(d, d), last = Mat::Zero(d, d);
  const int top = s.n_states() - 1;
  for (int m = 0; m < s.n_states(); ++m) {
    if (m == band) continue;
    double w = weight(s.energy(k, band) - s.energy(k, m));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        double t = w * part(v[i][m] * std::conj(v[j][m]));
        out(i, j) += t;
        if (m == top || (band == top && m == top - 1)) last(i, j) = t;
      }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) out(i, j) = -out(j, i);
  if (tail) {
    double t = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (std::abs(out(i, j)) > 1e-300) t = std::max(t, std::abs(last(i, j)) / std::abs(out(i, j)));
    *tail = t;
  }
  return out;
}

}  // namespace

Mat berry_curvature_at(const BlochSpectrum& s, std::size_t k, int band, double* tail) {
  return sum_over_states(
      s, k, band, [](double de) { return -2.0 / (de * de); }, [](cplx z) { return z.imag(); }, tail);
}

Mat rammal_wilkinson_at(const BlochSpectrum& s, std::size_t k, int band, double* tail) {
  return sum_over_states(
      s, k, band, [](double de) { return 1.0 / de; }, [](cplx z) { return z.imag(); }, tail);
}

namespace {
template <class F>
std::vector<Mat> field_over_grid(const BlochSpectrum& s, int band, double* tail, F f) {
  require_nondegenerate(s, band);
  std::vector<Mat> out(s.n_k());
  std::vector<double> tails(s.n_k(), 0.0);
  parallel_for(s.n_k(), default_threads(), [&](std::size_t k) { out[k] = f(s, k, band, &tails[k]); });
  if (tail) {
    double t = 0.0;
    for (double x : tails) t = std::max(t, x);
    *tail = t;
  }
  return out;
}
}  // namespace

std::vector<Mat> berry_curvature(const BlochSpectrum& s, int band, double* tail) {
  return field_over_grid(s, band, tail, berry_curvature_at);
}

std::vector<Mat> rammal_wilkinson(const BlochSpectrum& s, int band, double* tail) {
  return field_over_grid(s, band, tail, rammal_wilkinson_at);
}

namespace {

// <c(k)|c(k + step e_axis)> with the Gamma*-continuation across the zone edge
cplx link(const BlochSpectrum& s, const std::vector<VecXc>& c, std::size_t k, int axis, int step = 1) {
  int wrapped = 0;
  std::size_t nb = s.grid.neighbour(k, axis, step, &wrapped);
  if (wrapped == 0) return c[k].dot(c[nb]);
  IVec shift = IVec::Zero(s.grid.dim());
  shift[axis] = wrapped;
  return c[k].dot(s.model->continue_vector(c[nb], shift));
}

std::vector<VecXc> band_vectors(const BlochSpectrum& s, int band) {
  std::vector<VecXc> c(s.n_k());
  for (std::size_t k = 0; k < s.n_k(); ++k) c[k] = s.vectors[k].col(band);
  return c;
}

}  // namespace

PlaquetteField berry_curvature_plaquette(const BlochSpectrum& s, int band) {
  const int d = s.grid.dim();
  if (d < 2) throw Error("plaquette curvature needs a 2D or 3D k-grid");
  require_nondegenerate(s, band);
  std::vector<VecXc> c = band_vectors(s, band);
  std::vector<std::vector<cplx>> links(d, std::vector<cplx>(s.n_k()));
  PlaquetteField out;
  double minlink = 1.0;
  for (int a = 0; a < d; ++a)
    for (std::size_t k = 0; k < s.n_k(); ++k) {
      links[a][k] = link(s, c, k, a);
      minlink = std::min(minlink, std::abs(links[a][k]));
    }
  out.min_link = minlink;
  if (minlink < 1e-8)
    throw RefineGridError("link overlap below 1e-8; refine the k-grid for band " + std::to_string(band));
  Vec off = Vec::Constant(d, 0.5) + s.grid.offset();
  out.centers = KGrid(s.grid.lattice(), s.grid.sizes(), off);
  const Mat& B = s.grid.lattice().dual();
  const Mat Binv = B.inverse();
  const double orient = B.determinant() > 0 ? 1.0 : -1.0;
  out.curvature.assign(s.n_k(), Mat::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      ChernPlane plane;
      plane.axis_a = a;
      plane.axis_b = b;
      int other = d == 3 ? 3 - a - b : -1;
      int nslices = other >= 0 ? s.grid.sizes()[other] : 1;
      plane.slices.assign(nslices, 0.0);
      const double scale = static_cast<double>(s.grid.sizes()[a]) * s.grid.sizes()[b];
      for (std::size_t k = 0; k < s.n_k(); ++k) {
        std::size_t ka = s.grid.neighbour(k, a, 1, nullptr);
        std::size_t kb = s.grid.neighbour(k, b, 1, nullptr);
        cplx w = links[a][k] * links[b][ka] * std::conj(links[a][kb]) * std::conj(links[b][k]);
        double flux = -std::arg(w);
        out.curvature[k](a, b) = flux * scale;
        out.curvature[k](b, a) = -flux * scale;
        int slice = other >= 0 ? s.grid.index(k)[other] : 0;
        plane.slices[slice] += flux;
      }
      for (double& x : plane.slices) x *= orient / kTwoPi;
      plane.chern = plane.slices[0];
      out.chern.push_back(plane);
    }
  // fractional 2-form -> Cartesian: Omega = B^{-T} Omega_frac B^{-1}
  for (auto& m : out.curvature) m = Binv.transpose() * m * Binv;
  return out;
}

std::vector<VecXc> parallel_transport_gauge(const BlochSpectrum& s, int band) {
  require_nondegenerate(s, band);
  const int d = s.grid.dim();
  std::vector<VecXc> c = band_vectors(s, band);
  for (int a = 0; a < d; ++a) {
    const int n = s.grid.sizes()[a];
    // windings unwrapped from line to neighbouring line so the gauge stays smooth across lines
    std::vector<double> winding(s.n_k(), 0.0);
    for (std::size_t start = 0; start < s.n_k(); ++start) {
      IVec idx = s.grid.index(start);
      bool line_start = idx[a] == 0;
      for (int b = a + 1; b < d; ++b) line_start = line_start && idx[b] == 0;
      if (!line_start) continue;
      std::vector<std::size_t> line(n);
      line[0] = start;
      for (int j = 1; j < n; ++j) line[j] = s.grid.neighbour(line[j - 1], a, 1, nullptr);
      for (int j = 1; j < n; ++j) {
        cplx ov = c[line[j - 1]].dot(c[line[j]]);
        c[line[j]] *= std::polar(1.0, -std::arg(ov));
      }
      double alpha = std::arg(link(s, c, line[n - 1], a));
      for (int b = a - 1; b >= 0; --b) {
        if (idx[b] == 0) continue;
        IVec pidx = idx;
        pidx[b] -= 1;
        double ref = winding[s.grid.linear(pidx)];
        alpha = ref + std::remainder(alpha - ref, kTwoPi);
        break;
      }
      winding[start] = alpha;
      for (int j = 1; j < n; ++j) c[line[j]] *= std::polar(1.0, alpha * j / n);
    }
  }
  return c;
}

namespace {
std::vector<Vec> connection_from(const BlochSpectrum& s, const std::vector<VecXc>& c) {
  const int d = s.grid.dim();
  const Mat Bit = s.grid.lattice().dual().inverse().transpose();
  std::vector<Vec> out(s.n_k(), Vec::Zero(d));
  for (std::size_t k = 0; k < s.n_k(); ++k) {
    Vec frac(d);
    for (int a = 0; a < d; ++a) {
      const int n = s.grid.sizes()[a];
      // phase of <c(k)|c(k + m h)>, central differences; fourth order when the line is long enough
      auto phase = [&](int m) { return std::arg(link(s, c, k, a, m)); };
      double d1 = phase(1) - phase(-1);
      if (n >= 8)
        frac[a] = -(8.0 * d1 - (phase(2) - phase(-2))) / 12.0 * n;
      else
        frac[a] = -0.5 * d1 * n;
    }
    out[k] = Bit * frac;
  }
  return out;
}
}  // namespace

std::vector<Vec> berry_connection(const BlochSpectrum& s, int band, Gauge gauge) {
  if (gauge == Gauge::parallel_transport) return connection_from(s, parallel_transport_gauge(s, band));
  require_nondegenerate(s, band);
  return connection_from(s, band_vectors(s, band));
}

double zak_phase(const BlochSpectrum& s, int band, int axis, std::size_t start) {
  require_nondegenerate(s, band);
  std::vector<VecXc> c = band_vectors(s, band);
  cplx prod = 1.0;
  std::size_t k = start;
  for (int j = 0; j < s.grid.sizes()[axis]; ++j) {
    cplx l = link(s, c, k, axis);
    prod *= l / std::abs(l);
    k = s.grid.neighbour(k, axis, 1, nullptr);
  }
  return -std::arg(prod);
}

BandGeometry compute_geometry(const BlochSpectrum& s, int band) {
  BandGeometry g;
  g.band = band;
  g.grid = s.grid;
  g.gap = gap_check(s, band, 0.0).gap;
  g.energy.resize(s.n_k());
  for (std::size_t k = 0; k < s.n_k(); ++k) g.energy[k] = s.energy(k, band);
  g.curvature = berry_curvature(s, band, &g.curvature_tail);
  g.moment = rammal_wilkinson(s, band, &g.moment_tail);
  g.connection = berry_connection(s, band);
  if (s.grid.dim() >= 2) g.chern = berry_curvature_plaquette(s, band).chern;
  for (int a = 0; a < s.grid.dim(); ++a) g.zak_phases.push_back(zak_phase(s, band, a, 0));
  return g;
}

std::vector<double> component(const std::vector<Vec>& f, int i) {
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k][i];
  return out;
}

std::vector<double> component(const std::vector<Mat>& f, int i, int j) {
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k](i, j);
  return out;
}

}  // namespace semibloch

#include "semibloch/lattice.hpp"

#include "semibloch/errors.hpp"

#include <cmath>
#include <string>

namespace semibloch {

Mat dual_basis(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() < 1 || a.rows() > 3)
    throw DegenerateLatticeError("lattice basis must be a square d x d matrix with 1 <= d <= 3");
  const double det = a.determinant();
  double scale = 1.0;
  for (int i = 0; i < a.cols(); ++i) scale *= a.col(i).norm();
  if (!(std::abs(det) > 1e-12 * scale) || !std::isfinite(det))
    throw DegenerateLatticeError("lattice basis is singular (det = " + std::to_string(det) + ")");
  // B^T A = 2 pi I
  Mat b = kTwoPi * a.inverse().transpose();
  return b;
}

Lattice Lattice::from_rows(const Mat& rows) { return Lattice(Mat(rows.transpose())); }

Lattice::Lattice(const Mat& a) : direct_(a) {
  dual_ = dual_basis(a);
  direct_inv_ = direct_.inverse();
  dual_inv_ = dual_.inverse();
  cell_volume_ = std::abs(direct_.determinant());
  dual_volume_ = std::abs(dual_.determinant());
}

Vec Lattice::to_cartesian(const Vec& frac, Space s) const { return basis(s) * frac; }

Vec Lattice::to_fractional(const Vec& x, Space s) const {
  return (s == Space::direct ? direct_inv_ : dual_inv_) * x;
}

Vec Lattice::lattice_vector(const IVec& n, Space s) const { return basis(s) * n.cast<double>(); }

CellPoint Lattice::reduce(const Vec& x, Space s) const {
  const int d = dim();
  Vec f = to_fractional(x, s);
  CellPoint out;
  out.offset = IVec::Zero(d);
  Vec u(d);
  for (int i = 0; i < d; ++i) {
    double n = std::floor(f[i] + 0.5);
    double r = f[i] - n;
    if (r >= 0.5) { r -= 1.0; n += 1.0; }
    if (r < -0.5) { r += 1.0; n -= 1.0; }
    out.offset[i] = static_cast<int>(n);
    u[i] = r;
  }
  out.reduced = to_cartesian(u, s);
  return out;
}

bool Lattice::same_as(const Lattice& o, double tol) const {
  if (dim() != o.dim()) return false;
  return (direct_ - o.direct_).cwiseAbs().maxCoeff() <= tol * (1.0 + direct_.cwiseAbs().maxCoeff());
}

KGrid::KGrid(const Lattice& lat, std::vector<int> sizes, Vec offset)
    : lat_(lat), sizes_(std::move(sizes)) {
  if (static_cast<int>(sizes_.size()) != lat.dim())
    throw GridShapeError("k-grid needs one size per lattice dimension");
  total_ = 1;
  for (int n : sizes_) {
    if (n < 1) throw GridShapeError("k-grid sizes must be positive");
    total_ *= static_cast<std::size_t>(n);
  }
  offset_ = offset.size() == 0 ? Vec(Vec::Zero(lat.dim())) : offset;
}

IVec KGrid::index(std::size_t lin) const {
  const int d = dim();
  IVec idx(d);
  for (int i = d - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(lin % sizes_[i]);
    lin /= sizes_[i];
  }
  return idx;
}

std::size_t KGrid::linear(const IVec& idx) const {
  std::size_t lin = 0;
  for (int i = 0; i < dim(); ++i) {
    int n = sizes_[i];
    int j = ((idx[i] % n) + n) % n;
    lin = lin * n + j;
  }
  return lin;
}

int KGrid::centered(int axis, int idx) const { return idx - sizes_[axis] / 2; }

Vec KGrid::fractional(std::size_t lin) const {
  IVec idx = index(lin);
  Vec f(dim());
  for (int i = 0; i < dim(); ++i) f[i] = (centered(i, idx[i]) + offset_[i]) / sizes_[i];
  return f;
}

Vec KGrid::point(std::size_t lin) const { return lat_.to_cartesian(fractional(lin), Space::dual); }

std::size_t KGrid::neighbour(std::size_t lin, int axis, int step, int* wrapped) const {
  IVec idx = index(lin);
  int n = sizes_[axis];
  int j = idx[axis] + step;
  int w = 0;
  while (j >= n) { j -= n; ++w; }
  while (j < 0) { j += n; --w; }
  idx[axis] = j;
  if (wrapped) *wrapped = w;
  return linear(idx);
}

double KGrid::cell_measure() const {
  return lat_.dual_cell_volume() / static_cast<double>(total_);
}

bool KGrid::same_points(const KGrid& o) const {
  if (!lat_.same_as(o.lat_) || sizes_ != o.sizes_) return false;
  return (offset_ - o.offset_).cwiseAbs().maxCoeff() < 1e-14;
}

}  // namespace semibloch

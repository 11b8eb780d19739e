#include "semibloch/effective.hpp"

#include "semibloch/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace semibloch {

namespace {

std::vector<std::pair<int, int>> pairs(int d) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) out.push_back({i, j});
  return out;
}

double opnorm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[0];
}

}  // namespace

TrigPolynomial::TrigPolynomial(const Lattice& lat, std::vector<Term> terms)
    : direct_(lat.direct()), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.n.size() != lat.dim()) throw Error("trigonometric polynomial term has wrong dimension");
}

TrigPolynomial TrigPolynomial::constant(const Lattice& lat, double c) {
  return TrigPolynomial(lat, {{IVec::Zero(lat.dim()), c, 0.0}});
}

double TrigPolynomial::evaluate(const Vec& k, Vec* grad, Mat* hess) const {
  const int d = dim();
  if (grad) *grad = Vec::Zero(d);
  if (hess) *hess = Mat::Zero(d, d);
  double v = 0.0;
  for (const auto& t : terms_) {
    Vec g = direct_ * t.n.cast<double>();
    const double x = g.dot(k), cs = std::cos(x), sn = std::sin(x);
    v += t.c * cs + t.s * sn;
    if (grad) *grad += (-t.c * sn + t.s * cs) * g;
    if (hess) *hess += (-t.c * cs - t.s * sn) * g * g.transpose();
  }
  return v;
}

SymbolBand::SymbolBand(const Lattice& lat, TrigPolynomial energy, std::vector<TrigPolynomial> connection,
                       std::vector<TrigPolynomial> moment)
    : lat_(lat), energy_(std::move(energy)), conn_(std::move(connection)), moment_(std::move(moment)) {
  const int d = lat.dim();
  if (conn_.empty()) conn_.assign(d, TrigPolynomial(lat, {}));
  if (moment_.empty()) moment_.assign(pairs(d).size(), TrigPolynomial(lat, {}));
  if (static_cast<int>(conn_.size()) != d) throw Error("symbol band: connection needs one polynomial per axis");
  if (moment_.size() != pairs(d).size())
    throw Error("symbol band: moment needs " + std::to_string(pairs(d).size()) + " polynomials (pairs i<j)");
}

BandPoint SymbolBand::at(const Vec& k) const {
  const int d = dim();
  BandPoint b;
  b.E = energy_.evaluate(k, &b.grad_E, &b.hess_E);
  b.conn.resize(d);
  b.jac_conn.resize(d, d);
  for (int j = 0; j < d; ++j) {
    Vec g;
    b.conn[j] = conn_[j].evaluate(k, &g, nullptr);
    b.jac_conn.col(j) = g;
  }
  b.omega = b.jac_conn - b.jac_conn.transpose();
  b.moment = Mat::Zero(d, d);
  b.grad_moment.assign(d, Mat::Zero(d, d));
  auto pr = pairs(d);
  for (std::size_t p = 0; p < pr.size(); ++p) {
    auto [i, j] = pr[p];
    Vec g;
    double m = moment_[p].evaluate(k, &g, nullptr);
    b.moment(i, j) = m;
    b.moment(j, i) = -m;
    for (int l = 0; l < d; ++l) {
      b.grad_moment[l](i, j) = g[l];
      b.grad_moment[l](j, i) = -g[l];
    }
  }
  return b;
}

GridBand::GridBand(const BandGeometry& g) : grid_(g.grid), band_(g.band) {
  const int d = grid_.dim();
  energy_ = FourierInterpolant(grid_, g.energy);
  for (int j = 0; j < d; ++j) conn_.emplace_back(grid_, component(g.connection, j));
  for (auto [i, j] : pairs(d)) {
    omega_.emplace_back(grid_, component(g.curvature, i, j));
    moment_.emplace_back(grid_, component(g.moment, i, j));
  }
}

BandPoint GridBand::at(const Vec& k) const {
  const int d = dim();
  BandPoint b;
  b.E = energy_.evaluate(k, 2, &b.grad_E, &b.hess_E);
  b.conn.resize(d);
  b.jac_conn.resize(d, d);
  for (int j = 0; j < d; ++j) {
    Vec g;
    b.conn[j] = conn_[j].evaluate(k, 1, &g, nullptr);
    b.jac_conn.col(j) = g;
  }
  b.omega = Mat::Zero(d, d);
  b.moment = Mat::Zero(d, d);
  b.grad_moment.assign(d, Mat::Zero(d, d));
  auto pr = pairs(d);
  for (std::size_t p = 0; p < pr.size(); ++p) {
    auto [i, j] = pr[p];
    double w = omega_[p].value(k);
    b.omega(i, j) = w;
    b.omega(j, i) = -w;
    Vec g;
    double m = moment_[p].evaluate(k, 1, &g, nullptr);
    b.moment(i, j) = m;
    b.moment(j, i) = -m;
    for (int l = 0; l < d; ++l) {
      b.grad_moment[l](i, j) = g[l];
      b.grad_moment[l](j, i) = -g[l];
    }
  }
  return b;
}

std::string GridBand::describe() const {
  std::ostringstream os;
  os << "interpolated band " << band_ << " on a";
  for (std::size_t i = 0; i < grid_.sizes().size(); ++i) os << (i ? "x" : " ") << grid_.sizes()[i];
  os << " grid";
  return os.str();
}

double form_dot(const Mat& X, const Mat& Y) { return (X.array() * Y.array()).sum(); }

EffectiveModel::EffectiveModel(std::shared_ptr<const BandModel> band, ExternalFields fields, double eps)
    : band_(std::move(band)), fields_(std::move(fields)), eps_(eps) {
  if (!band_) throw Error("effective model needs a band");
  if (!(eps_ >= 0.0) || !std::isfinite(eps_)) throw Error("eps must be finite and non-negative");
  if (fields_.dim() != band_->dim()) throw Error("field dimension does not match the band");
}

SymbolGrad EffectiveModel::h0_grad(const Vec& k, const Vec& r) const {
  FieldPoint f = fields_.at(r);
  BandPoint b = band_->at(k - f.A);
  SymbolGrad out;
  out.value = b.E + f.phi;
  out.grad_k = b.grad_E;
  out.grad_r = f.grad_phi - f.jac_A * b.grad_E;
  return out;
}

SymbolGrad EffectiveModel::h1_grad(const Vec& k, const Vec& r) const {
  const int d = dim();
  FieldPoint f = fields_.at(r);
  BandPoint b = band_->at(k - f.A);
  const Vec F = lorentz_force(f, b.grad_E);
  SymbolGrad out;
  out.value = -F.dot(b.conn) - form_dot(f.B, b.moment);
  // derivative in the kinetic momentum at fixed r
  Vec gk = -(b.jac_conn * F + b.hess_E * (f.B.transpose() * b.conn));
  for (int l = 0; l < d; ++l) gk[l] -= form_dot(f.B, b.grad_moment[l]);
  // derivative in r at fixed kinetic momentum
  Vec gr(d);
  for (int m = 0; m < d; ++m) {
    double dF_dot_conn = 0.0;
    for (int j = 0; j < d; ++j) {
      double dFj = -f.hess_phi(m, j);
      for (int i = 0; i < d; ++i) dFj += f.grad_B[m](j, i) * b.grad_E[i];
      dF_dot_conn += dFj * b.conn[j];
    }
    gr[m] = -dF_dot_conn - form_dot(f.grad_B[m], b.moment);
  }
  out.grad_k = gk;
  out.grad_r = gr - f.jac_A * gk;
  return out;
}

double EffectiveModel::h_cl(const Vec& k, const Vec& r) const { return h_cl_grad(k, r).value; }

SymbolGrad EffectiveModel::h_cl_grad(const Vec& k, const Vec& r, int order) const {
  SymbolGrad a = h0_grad(k, r);
  if (order == 0 || eps_ == 0.0) return a;
  SymbolGrad b = h1_grad(k, r);
  a.value += eps_ * b.value;
  a.grad_k += eps_ * b.grad_k;
  a.grad_r += eps_ * b.grad_r;
  return a;
}

SymbolGrad EffectiveModel::H_sc_grad(const Vec& r, const Vec& kappa) const {
  const int d = dim();
  FieldPoint f = fields_.at(r);
  BandPoint b = band_->at(kappa);
  SymbolGrad out;
  out.value = b.E + f.phi - eps_ * form_dot(b.moment, f.B);
  out.grad_k = b.grad_E;
  out.grad_r = f.grad_phi;
  for (int l = 0; l < d; ++l) {
    out.grad_k[l] -= eps_ * form_dot(b.grad_moment[l], f.B);
    out.grad_r[l] -= eps_ * form_dot(b.moment, f.grad_B[l]);
  }
  return out;
}

double EffectiveModel::H_leading(const Vec& r, const Vec& kappa) const {
  return band_->at(kappa).E + fields_.phi(r);
}

CanonicalPoint EffectiveModel::map_T(const Vec& k, const Vec& r) const {
  FieldPoint f = fields_.at(r);
  Vec a = band_->at(k - f.A).conn;
  return {k + eps_ * f.jac_A * a, r + eps_ * a};
}

CanonicalPoint EffectiveModel::map_T_inverse(const Vec& kt, const Vec& rt, double tol, int max_iter) const {
  Vec k = kt, r = rt;
  for (int it = 0; it < max_iter; ++it) {
    FieldPoint f = fields_.at(r);
    Vec a = band_->at(k - f.A).conn;
    Vec rn = rt - eps_ * a;
    Vec kn = kt - eps_ * f.jac_A * a;
    double step = std::max((rn - r).cwiseAbs().maxCoeff(), (kn - k).cwiseAbs().maxCoeff());
    r = rn;
    k = kn;
    if (step <= tol * (1.0 + std::max(k.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff()))) {
      PMat J = map_T_jacobian(k, r);
      if (std::abs(J.determinant()) < 1e-8)
        throw SingularJacobianError("map T: Jacobian determinant below 1e-8; reduce eps");
      return {k, r};
    }
  }
  throw SingularJacobianError("map T: inverse fixed-point iteration did not converge; eps too large for this model");
}

PMat EffectiveModel::map_T_jacobian(const Vec& k, const Vec& r, double h) const {
  const int d = dim();
  PMat J(2 * d, 2 * d);
  for (int c = 0; c < 2 * d; ++c) {
    Vec kp = k, km = k, rp = r, rm = r;
    if (c < d) {
      kp[c] += h;
      km[c] -= h;
    } else {
      rp[c - d] += h;
      rm[c - d] -= h;
    }
    CanonicalPoint p = map_T(kp, rp), m = map_T(km, rm);
    PVec col(2 * d);
    col << (p.k - m.k) / (2 * h), (p.r - m.r) / (2 * h);
    J.col(c) = col;
  }
  return J;
}

PhaseSample EffectiveModel::to_kinetic(const Vec& k, const Vec& r) const { return {r, k - fields_.A(r)}; }

CanonicalPoint EffectiveModel::to_canonical(const Vec& r, const Vec& kappa) const {
  return {kappa + fields_.A(r), r};
}

PhaseSample EffectiveModel::canonical_to_corrected(const Vec& k, const Vec& r) const {
  CanonicalPoint t = map_T(k, r);
  return {t.r, t.k - fields_.A(t.r)};
}

CanonicalPoint EffectiveModel::corrected_to_canonical(const Vec& r, const Vec& kappa) const {
  return map_T_inverse(kappa + fields_.A(r), r);
}

double EffectiveModel::nondegeneracy(const std::vector<PhaseSample>& samples) const {
  double sup = 0.0;
  for (const auto& s : samples) {
    Mat B = fields_.B(s.r);
    Mat O = band_->at(s.p).omega;
    sup = std::max(sup, opnorm(B * O) + opnorm(O));
  }
  return eps_ * sup;
}

void EffectiveModel::require_nondegenerate(const std::vector<PhaseSample>& samples) const {
  double m = nondegeneracy(samples);
  if (m >= 1.0) {
    std::ostringstream os;
    os << "eps = " << eps_ << " violates the symplectic nondegeneracy bound: eps * sup(|B Omega| + |Omega|) = " << m
       << " >= 1";
    throw NondegeneracyError(os.str());
  }
}

std::vector<PhaseSample> phase_samples(const Lattice& lat, const Vec& lo, const Vec& hi, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int d = lat.dim();
  std::vector<PhaseSample> out;
  for (int s = 0; s < n; ++s) {
    Vec r(d), f(d);
    for (int i = 0; i < d; ++i) {
      r[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
      f[i] = u(rng) - 0.5;
    }
    out.push_back({r, lat.to_cartesian(f, Space::dual)});
  }
  return out;
}

}  // namespace semibloch

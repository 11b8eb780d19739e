#include "semibloch/fields.hpp"

#include "semibloch/errors.hpp"

#include <cmath>
#include <random>

namespace semibloch {

ScalarTerm ScalarTerm::ramp(const Vec& direction, double amplitude, double length) {
  if (!(length > 0.0)) throw FieldPresetError("window length must be positive");
  ScalarTerm t;
  t.kind = Kind::ramp;
  t.direction = direction;
  t.amplitude = amplitude;
  t.length = length;
  return t;
}

ScalarTerm ScalarTerm::fourier(const Vec& freq, cplx coeff) {
  ScalarTerm t;
  t.kind = Kind::fourier;
  t.freq = freq;
  t.coeff = coeff;
  return t;
}

void ScalarTerm::accumulate(const Vec& r, double* v, Vec* g, Mat* h) const {
  if (kind == Kind::ramp) {
    const double x = direction.dot(r) / length;
    const double th = std::tanh(x);
    const double sech2 = 1.0 - th * th;
    if (v) *v += amplitude * length * th;
    if (g) *g += amplitude * sech2 * direction;
    if (h) *h += (-2.0 * amplitude * sech2 * th / length) * direction * direction.transpose();
    return;
  }
  const cplx e = coeff * std::exp(kI * freq.dot(r));
  if (v) *v += e.real();
  if (g) *g += -e.imag() * freq;
  if (h) *h += -e.real() * freq * freq.transpose();
}

ScalarField::ScalarField(int dim, std::vector<ScalarTerm> terms) : dim_(dim) {
  for (const auto& t : terms) add(t);
}

void ScalarField::add(const ScalarTerm& t) {
  const Vec& v = t.kind == ScalarTerm::Kind::ramp ? t.direction : t.freq;
  if (v.size() != dim_) throw FieldPresetError("field term dimension does not match the lattice");
  terms_.push_back(t);
}

bool ScalarField::band_limited() const {
  for (const auto& t : terms_)
    if (t.kind != ScalarTerm::Kind::fourier) return false;
  return true;
}

double ScalarField::value(const Vec& r) const {
  double v = 0.0;
  for (const auto& t : terms_) t.accumulate(r, &v, nullptr, nullptr);
  return v;
}

double ScalarField::evaluate(const Vec& r, Vec* grad, Mat* hess) const {
  double v = 0.0;
  if (grad) *grad = Vec::Zero(dim_);
  if (hess) *hess = Mat::Zero(dim_, dim_);
  for (const auto& t : terms_) t.accumulate(r, &v, grad, hess);
  return v;
}

ExternalFields::ExternalFields(int dim, ScalarField phi, std::vector<ScalarField> A, std::string name)
    : dim_(dim), name_(std::move(name)), phi_(std::move(phi)), A_(std::move(A)) {
  if (phi_.dim() == 0) phi_ = ScalarField(dim);
  if (A_.empty()) A_.assign(dim, ScalarField(dim));
  if (phi_.dim() != dim || static_cast<int>(A_.size()) != dim)
    throw FieldPresetError("external fields: component count does not match dimension " + std::to_string(dim));
  for (const auto& c : A_)
    if (c.dim() != dim) throw FieldPresetError("external fields: vector potential component has wrong dimension");
}

ExternalFields ExternalFields::zero(int dim) { return ExternalFields(dim, ScalarField(dim), {}, "zero"); }

bool ExternalFields::has_vector_potential() const {
  for (const auto& c : A_)
    if (!c.empty()) return true;
  return false;
}

bool ExternalFields::band_limited() const {
  if (!phi_.band_limited()) return false;
  for (const auto& c : A_)
    if (!c.band_limited()) return false;
  return true;
}

Vec ExternalFields::A(const Vec& r) const {
  Vec a(dim_);
  for (int j = 0; j < dim_; ++j) a[j] = A_[j].value(r);
  return a;
}

Mat ExternalFields::B(const Vec& r) const { return at(r).B; }

FieldPoint ExternalFields::at(const Vec& r) const {
  const int d = dim_;
  FieldPoint f;
  f.phi = phi_.evaluate(r, &f.grad_phi, &f.hess_phi);
  f.A.resize(d);
  f.jac_A.resize(d, d);
  f.hess_A.resize(d);
  for (int j = 0; j < d; ++j) {
    Vec g;
    f.A[j] = A_[j].evaluate(r, &g, &f.hess_A[j]);
    f.jac_A.col(j) = g;
  }
  f.B = f.jac_A - f.jac_A.transpose();
  f.grad_B.assign(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) f.grad_B[k](i, j) = f.hess_A[j](k, i) - f.hess_A[i](k, j);
  return f;
}

std::vector<std::string> preset_names() { return {"zero", "smooth-linear-phi", "smooth-uniform-B", "custom-fourier"}; }

ExternalFields preset(const std::string& name, int dim, const PresetParams& p) {
  if (dim < 1 || dim > 3) throw FieldPresetError("field presets need dimension 1, 2 or 3");
  if (name == "zero") return ExternalFields::zero(dim);
  if (name == "smooth-linear-phi") {
    Vec e = p.direction.size() == dim ? p.direction : Vec(Vec::Unit(dim, 0));
    if (e.norm() == 0.0) throw FieldPresetError("smooth-linear-phi: direction must be nonzero");
    e.normalize();
    ScalarField phi(dim, {ScalarTerm::ramp(e, -p.E0, p.length)});
    return ExternalFields(dim, phi, {}, name);
  }
  if (name == "smooth-uniform-B") {
    if (dim == 1) throw FieldPresetError("smooth-uniform-B: no magnetic 2-form in one dimension");
    // symmetric gauge A = (B0/2)(-L tanh(y/L), L tanh(x/L)) in the (1,2) plane
    std::vector<ScalarField> A(dim, ScalarField(dim));
    A[0].add(ScalarTerm::ramp(Vec::Unit(dim, 1), -0.5 * p.B0, p.length));
    A[1].add(ScalarTerm::ramp(Vec::Unit(dim, 0), 0.5 * p.B0, p.length));
    return ExternalFields(dim, ScalarField(dim), A, name);
  }
  if (name == "custom-fourier") {
    ScalarField phi(dim);
    for (const auto& t : p.phi_terms) phi.add(ScalarTerm::fourier(t.freq, t.coeff));
    if (!p.A_terms.empty() && static_cast<int>(p.A_terms.size()) != dim)
      throw FieldPresetError("custom-fourier: vector potential needs one term list per component");
    std::vector<ScalarField> A(dim, ScalarField(dim));
    for (std::size_t j = 0; j < p.A_terms.size(); ++j)
      for (const auto& t : p.A_terms[j]) A[j].add(ScalarTerm::fourier(t.freq, t.coeff));
    return ExternalFields(dim, phi, A, name);
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw FieldPresetError("unknown field preset '" + name + "' (known: " + known + ")");
}

ExternalFields combine(const ExternalFields& a, const ExternalFields& b) {
  if (a.dim() != b.dim()) throw FieldPresetError("cannot combine fields of different dimension");
  ScalarField phi = a.scalar_potential();
  for (const auto& t : b.scalar_potential().terms()) phi.add(t);
  std::vector<ScalarField> A = a.vector_potential();
  for (int j = 0; j < a.dim(); ++j)
    for (const auto& t : b.vector_potential()[j].terms()) A[j].add(t);
  return ExternalFields(a.dim(), phi, A, a.name() + "+" + b.name());
}

Vec lorentz_force(const FieldPoint& f, const Vec& v) { return -f.grad_phi + f.B * v; }

Vec lorentz_force(const ExternalFields& f, const Vec& r, const Vec& v) { return lorentz_force(f.at(r), v); }

FieldBounds sample_bounds(const ExternalFields& f, const Vec& lo, const Vec& hi, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FieldBounds b;
  b.samples = samples;
  const int d = f.dim();
  for (int s = 0; s < samples; ++s) {
    Vec r(d);
    for (int i = 0; i < d; ++i) r[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    FieldPoint p = f.at(r);
    b.phi = std::max(b.phi, std::abs(p.phi));
    b.grad_phi = std::max(b.grad_phi, p.grad_phi.norm());
    b.A = std::max(b.A, p.A.norm());
    b.jac_A = std::max(b.jac_A, p.jac_A.norm());
    b.B = std::max(b.B, p.B.norm());
    double gb = 0.0;
    for (const auto& m : p.grad_B) gb += m.squaredNorm();
    b.grad_B = std::max(b.grad_B, std::sqrt(gb));
  }
  return b;
}

double closedness_residual(const ExternalFields& f, const Vec& r, double h) {
  const int d = f.dim();
  std::vector<Mat> dB(d);
  for (int k = 0; k < d; ++k) {
    Vec rp = r, rm = r;
    rp[k] += h;
    rm[k] -= h;
    dB[k] = (f.B(rp) - f.B(rm)) / (2 * h);
  }
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        worst = std::max(worst, std::abs(dB[k](i, j) + dB[i](j, k) + dB[j](k, i)));
  return worst;
}

}  // namespace semibloch

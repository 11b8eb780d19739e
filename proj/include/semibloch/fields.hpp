#pragma once

#include "semibloch/types.hpp"

#include <string>
#include <vector>

namespace semibloch {

// One smooth bounded scalar term.
//   ramp:    amplitude * L * tanh(direction . r / L)
//   fourier: Re(coeff * exp(i freq . r))
struct ScalarTerm {
  enum class Kind { ramp, fourier };
  Kind kind = Kind::fourier;
  Vec direction;   // ramp
  double amplitude = 0.0;
  double length = 1.0;
  Vec freq;        // fourier
  cplx coeff{0.0, 0.0};

  static ScalarTerm ramp(const Vec& direction, double amplitude, double length);
  static ScalarTerm fourier(const Vec& freq, cplx coeff);

  // adds value, gradient and Hessian into the accumulators (any may be null)
  void accumulate(const Vec& r, double* v, Vec* g, Mat* h) const;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(int dim, std::vector<ScalarTerm> terms = {});

  int dim() const { return dim_; }
  const std::vector<ScalarTerm>& terms() const { return terms_; }
  void add(const ScalarTerm& t);
  bool empty() const { return terms_.empty(); }
  bool band_limited() const;  // fourier terms only

  double value(const Vec& r) const;
  double evaluate(const Vec& r, Vec* grad, Mat* hess) const;

 private:
  int dim_ = 0;
  std::vector<ScalarTerm> terms_;
};

// Everything the flows need at one position.
struct FieldPoint {
  double phi = 0.0;
  Vec grad_phi;
  Mat hess_phi;
  Vec A;
  Mat jac_A;              // jac_A(i, j) = d_i A_j
  std::vector<Mat> hess_A;  // hess_A[j](i, k) = d_i d_k A_j
  Mat B;                  // B_ij = d_i A_j - d_j A_i
  std::vector<Mat> grad_B;  // grad_B[k](i, j) = d_k B_ij
};

class ExternalFields {
 public:
  ExternalFields() = default;
  ExternalFields(int dim, ScalarField phi, std::vector<ScalarField> A, std::string name = "custom");
  static ExternalFields zero(int dim);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const ScalarField& scalar_potential() const { return phi_; }
  const std::vector<ScalarField>& vector_potential() const { return A_; }

  bool has_vector_potential() const;
  bool band_limited() const;

  double phi(const Vec& r) const { return phi_.value(r); }
  Vec A(const Vec& r) const;
  Mat B(const Vec& r) const;
  FieldPoint at(const Vec& r) const;

 private:
  int dim_ = 0;
  std::string name_;
  ScalarField phi_;
  std::vector<ScalarField> A_;
};

struct FourierTerm {
  Vec freq;
  cplx coeff;
};

struct PresetParams {
  double E0 = 0.0;       // smooth-linear-phi field strength
  double B0 = 0.0;       // smooth-uniform-B field strength
  double length = 20.0;  // window length L
  Vec direction;         // field direction for smooth-linear-phi (defaults to e_1)
  std::vector<FourierTerm> phi_terms;               // custom-fourier
  std::vector<std::vector<FourierTerm>> A_terms;    // custom-fourier, one list per component
};

std::vector<std::string> preset_names();
// name in {zero, smooth-linear-phi, smooth-uniform-B, custom-fourier}
ExternalFields preset(const std::string& name, int dim, const PresetParams& p);
// field terms add: phi and A of both
ExternalFields combine(const ExternalFields& a, const ExternalFields& b);

// F_j = -d_j phi + sum_i B_ji v_i
Vec lorentz_force(const FieldPoint& f, const Vec& v);
Vec lorentz_force(const ExternalFields& f, const Vec& r, const Vec& v);

struct FieldBounds {
  double phi = 0.0, grad_phi = 0.0, A = 0.0, jac_A = 0.0, B = 0.0, grad_B = 0.0;
  int samples = 0;
};
// sampled sup norms over the box [lo, hi]
FieldBounds sample_bounds(const ExternalFields& f, const Vec& lo, const Vec& hi, int samples, unsigned seed = 1);

// max |d_k B_ij + d_i B_jk + d_j B_ki| by centered differences of B with step h
double closedness_residual(const ExternalFields& f, const Vec& r, double h = 1e-4);

}  // namespace semibloch

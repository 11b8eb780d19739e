#pragma once

#include "semibloch/fields.hpp"
#include "semibloch/geometry.hpp"
#include "semibloch/interp.hpp"
#include "semibloch/lattice.hpp"
#include "semibloch/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace semibloch {

// f(k) = sum_n c_n cos(gamma_n . k) + s_n sin(gamma_n . k), gamma_n = sum_i n_i a_i
class TrigPolynomial {
 public:
  struct Term {
    IVec n;
    double c = 0.0;
    double s = 0.0;
  };
  TrigPolynomial() = default;
  TrigPolynomial(const Lattice& lat, std::vector<Term> terms);
  static TrigPolynomial constant(const Lattice& lat, double c);

  const std::vector<Term>& terms() const { return terms_; }
  int dim() const { return static_cast<int>(direct_.cols()); }
  double value(const Vec& k) const { return evaluate(k, nullptr, nullptr); }
  double evaluate(const Vec& k, Vec* grad, Mat* hess) const;

 private:
  Mat direct_;
  std::vector<Term> terms_;
};

// Everything about one band at one momentum.
struct BandPoint {
  double E = 0.0;
  Vec grad_E;
  Mat hess_E;
  Vec conn;                 // Berry connection
  Mat jac_conn;             // jac_conn(i, j) = d_i conn_j
  Mat omega;                // curvature 2-form
  Mat moment;               // Rammal-Wilkinson 2-form
  std::vector<Mat> grad_moment;  // grad_moment[l](i, j) = d_l M_ij
};

class BandModel {
 public:
  virtual ~BandModel() = default;
  virtual int dim() const = 0;
  virtual const Lattice& lattice() const = 0;
  virtual BandPoint at(const Vec& k) const = 0;
  virtual std::string describe() const = 0;
};

// Closed-form band: E, connection and moment as trigonometric polynomials;
// the curvature is the curl of the connection.
class SymbolBand : public BandModel {
 public:
  // moment: one polynomial per pair i < j in lexicographic order (none in 1D)
  SymbolBand(const Lattice& lat, TrigPolynomial energy, std::vector<TrigPolynomial> connection = {},
             std::vector<TrigPolynomial> moment = {});
  int dim() const override { return lat_.dim(); }
  const Lattice& lattice() const override { return lat_; }
  BandPoint at(const Vec& k) const override;
  std::string describe() const override { return "symbol band"; }

 private:
  Lattice lat_;
  TrigPolynomial energy_;
  std::vector<TrigPolynomial> conn_;
  std::vector<TrigPolynomial> moment_;
};

// Band from solver data, by Fourier interpolation of the grid quantities.
class GridBand : public BandModel {
 public:
  explicit GridBand(const BandGeometry& g);
  int dim() const override { return grid_.dim(); }
  const Lattice& lattice() const override { return grid_.lattice(); }
  BandPoint at(const Vec& k) const override;
  std::string describe() const override;

 private:
  KGrid grid_;
  int band_ = 0;
  FourierInterpolant energy_;
  std::vector<FourierInterpolant> conn_;
  std::vector<FourierInterpolant> omega_, moment_;  // pairs i < j
};

// sum_ij X_ij Y_ij
double form_dot(const Mat& X, const Mat& Y);

struct SymbolGrad {
  double value = 0.0;
  Vec grad_k;
  Vec grad_r;
};

// kinetic-chart point (r, kappa)
struct PhaseSample {
  Vec r, p;
};

// canonical-chart point
struct CanonicalPoint {
  Vec k, r;
};

class EffectiveModel {
 public:
  EffectiveModel(std::shared_ptr<const BandModel> band, ExternalFields fields, double eps);

  int dim() const { return band_->dim(); }
  double eps() const { return eps_; }
  const BandModel& band() const { return *band_; }
  std::shared_ptr<const BandModel> band_ptr() const { return band_; }
  const ExternalFields& fields() const { return fields_; }
  EffectiveModel with_eps(double eps) const { return EffectiveModel(band_, fields_, eps); }

  // canonical chart (k, r)
  double h0(const Vec& k, const Vec& r) const { return h0_grad(k, r).value; }
  double h1(const Vec& k, const Vec& r) const { return h1_grad(k, r).value; }
  double h_cl(const Vec& k, const Vec& r) const;
  SymbolGrad h0_grad(const Vec& k, const Vec& r) const;
  SymbolGrad h1_grad(const Vec& k, const Vec& r) const;
  SymbolGrad h_cl_grad(const Vec& k, const Vec& r, int order = 1) const;  // order 0: h0 only

  // kinetic chart (r, kappa)
  double H_sc(const Vec& r, const Vec& kappa) const { return H_sc_grad(r, kappa).value; }
  SymbolGrad H_sc_grad(const Vec& r, const Vec& kappa) const;  // grad_k is d/dkappa
  double H_leading(const Vec& r, const Vec& kappa) const;

  // T(k, r) = (k + eps sum_m conn_m(k - A(r)) grad A_m(r), r + eps conn(k - A(r)))
  CanonicalPoint map_T(const Vec& k, const Vec& r) const;
  CanonicalPoint map_T_inverse(const Vec& k, const Vec& r, double tol = 1e-13, int max_iter = 200) const;
  // Jacobian of (k, r) -> T(k, r), ordering (k, r), by centered differences
  PMat map_T_jacobian(const Vec& k, const Vec& r, double h = 1e-6) const;

  // eps-independent charts: kappa = k - A(r)
  PhaseSample to_kinetic(const Vec& k, const Vec& r) const;
  CanonicalPoint to_canonical(const Vec& r, const Vec& kappa) const;
  // eps-dependent substitution: T followed by the kinetic chart, (k, r) -> (r', kappa')
  PhaseSample canonical_to_corrected(const Vec& k, const Vec& r) const;
  CanonicalPoint corrected_to_canonical(const Vec& r, const Vec& kappa) const;

  // eps * sup(|B Omega| + |Omega|) over samples; must stay below 1
  double nondegeneracy(const std::vector<PhaseSample>& samples) const;
  void require_nondegenerate(const std::vector<PhaseSample>& samples) const;

 private:
  std::shared_ptr<const BandModel> band_;
  ExternalFields fields_;
  double eps_;
};

// random (r, kappa) samples: r in [lo, hi], kappa over the Brillouin zone
std::vector<PhaseSample> phase_samples(const Lattice& lat, const Vec& lo, const Vec& hi, int n, unsigned seed = 7);

}  // namespace semibloch

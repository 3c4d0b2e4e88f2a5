#pragma once

#include "carnot/expr.hpp"
#include "carnot/forms.hpp"
#include "carnot/group.hpp"

namespace carnot {

// A chart over a Carnot group: smooth expressions taking chart coordinates
// into exponential coordinates, a local diffeomorphism onto its image. The
// trivial chart is the identity (chart coordinates = exponential
// coordinates). Non-trivial charts let fixtures like the winding map work
// in cylindrical coordinates.
class Chart {
 public:
  static std::shared_ptr<const Chart> exponential(AlgebraPtr group,
                                                  SampleBox domain);
  // Polar on the first two coordinates (r, t), identity on the rest.
  static std::shared_ptr<const Chart> cylinder(AlgebraPtr group,
                                               SampleBox domain);
  static std::shared_ptr<const Chart> custom(AlgebraPtr group,
                                             std::vector<ScalarExpr> into_group,
                                             SampleBox domain,
                                             std::vector<std::string> names);

  const AlgebraPtr& group() const { return group_; }
  bool trivial() const { return trivial_; }
  const std::vector<ScalarExpr>& into_group() const { return into_group_; }
  const SampleBox& domain() const { return domain_; }
  const std::vector<std::string>& coord_names() const { return names_; }
  int dim() const { return group_->dim(); }

  // d(into_group)/du, symbolic.
  const Matrix<ScalarExpr>& jacobian() const;
  // M(u): row j = components of the pulled-back coframe chart^* theta^j in
  // the chart differentials du.
  const Matrix<ScalarExpr>& invariant_in_coords() const;
  // M(u)^{-1}; uses an adjugate divided by det for non-trivial charts.
  const Matrix<ScalarExpr>& coords_in_invariant() const;

  DVec to_group(const DVec& u) const;

 private:
  Chart() = default;
  AlgebraPtr group_;
  std::vector<ScalarExpr> into_group_;
  bool trivial_ = true;
  SampleBox domain_;
  std::vector<std::string> names_;
  mutable std::optional<Matrix<ScalarExpr>> jacobian_, m_, minv_;
};

using ChartPtr = std::shared_ptr<const Chart>;

enum class FormBasis { Coordinate, Invariant };

// Differential form on a chart with symbolic coefficients, expressed either
// in the chart differentials du^I or in the pulled-back left-invariant
// coframe theta^I.
struct FieldForm {
  ChartPtr chart;
  int degree = 0;
  GradedVectorSpace values = GradedVectorSpace::scalar();
  FormBasis basis = FormBasis::Invariant;
  Matrix<ScalarExpr> coeffs;  // C(dim, degree) x values.dim

  FieldForm() = default;
  FieldForm(ChartPtr chart_, int degree_,
            GradedVectorSpace values_ = GradedVectorSpace::scalar(),
            FormBasis basis_ = FormBasis::Invariant);

  bool structurally_zero() const;
  FieldForm component(int v) const;
  FieldForm operator+(const FieldForm& o) const;
  FieldForm operator-(const FieldForm& o) const;
  FieldForm scaled(const ScalarExpr& s) const;
};

// Constant-coefficient field form from a left-invariant form.
FieldForm from_algebra_form(const AlgebraForm& form, const ChartPtr& chart);

FieldForm to_basis(const FieldForm& form, FormBasis target);

// Exterior derivative. On invariant-basis forms over the trivial chart this
// uses frame derivatives plus structure equations; on coordinate-basis forms
// it is the plain coordinate d.
FieldForm exterior_d(const FieldForm& form);

// Directional derivative along the left-invariant frame field X_i
// (trivial chart coordinates).
ScalarExpr frame_derivative(const AlgebraPtr& alg, const ScalarExpr& e, int i);

// C-infinity-linear extensions acting on invariant coframe indices only.
FieldForm d0_field(const FieldForm& form);
FieldForm d0_pinv_field(const FieldForm& form);
FieldForm project_E0_field(const FieldForm& form);
FieldForm project_E0_perp_field(const FieldForm& form);

// The Rumin operator suite.
struct RuminOps {
  FieldForm D;      // d0^{-1} (d - d0)
  FieldForm P;      // sum (-1)^k D^k
  FieldForm pi_E;   // I - P d0^{-1} d - d P d0^{-1}
  FieldForm pi_E0;  // orthogonal projection to E0
  FieldForm d_c;    // pi_E0 pi_E d pi_E0
};
RuminOps rumin_ops(const FieldForm& form);
FieldForm rumin_d(const FieldForm& form);  // just d_c
FieldForm pi_E(const FieldForm& form);

// Pointwise inner product against a left-invariant scalar form.
ScalarExpr field_inner(const FieldForm& a, const AlgebraForm& b);

// Zero the coefficients of non-horizontal coframe elements (degree 1,
// invariant basis).
FieldForm horizontal_part(const FieldForm& form);

// Numeric coefficients at a chart point.
DMat eval_coeffs(const FieldForm& form, const DVec& u);

// Value of a V-valued invariant 1-form on a velocity vector attached at the
// group point x (trivial chart).
DVec eval_one_form(const FieldForm& form, const DVec& x, const DVec& velocity);

struct FieldIdentityResult {
  TestVerdict verdict = TestVerdict::Unknown;
  bool exact = false;
  std::vector<double> witness;
  double max_abs = 0.0;
};
FieldIdentityResult identity_test(const FieldForm& a, const FieldForm& b,
                                  unsigned long long seed = 12345,
                                  int samples = 32, double tol = 1e-9);
FieldIdentityResult field_is_zero(const FieldForm& a,
                                  unsigned long long seed = 12345,
                                  int samples = 32, double tol = 1e-9);

// Potential of a V-valued 2-cocycle rho on H: the 1-form
// alpha_g(Y) = rho(X, zeta(ad X) Y) at g = exp(X), zeta(z) =
// 1/(1-e^{-z}) - 1/z. Satisfies d alpha = rho; polynomial coefficients.
FieldForm cocycle_potential(const AlgebraPtr& base, const AlgebraForm& rho);

}  // namespace carnot

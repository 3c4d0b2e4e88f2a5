#pragma once

#include "carnot/extensions.hpp"
#include "carnot/field_forms.hpp"

namespace carnot {

// Smooth map between Carnot groups in exponential coordinates. The map is
// given by expressions over a chart on the source (trivial chart = the
// exponential coordinates themselves; cylinder/custom charts let fixtures
// like the winding map stay inside the expression language).
struct GroupMap {
  AlgebraPtr source, target;
  ChartPtr chart;                      // chart on the source
  std::vector<ScalarExpr> components;  // target coordinates over chart coords
  bool simply_connected = false;
  std::string excluded;  // description of the excluded singular set

  static GroupMap on_exponential(AlgebraPtr source, AlgebraPtr target,
                                 std::vector<ScalarExpr> components,
                                 SampleBox domain, bool simply_connected,
                                 std::string excluded = "");
  static GroupMap on_chart(ChartPtr source_chart, AlgebraPtr target,
                           std::vector<ScalarExpr> components,
                           bool simply_connected, std::string excluded = "");
  static GroupMap identity(const AlgebraPtr& alg, SampleBox domain);
  static GroupMap linear(AlgebraPtr source, AlgebraPtr target, const QMat& m,
                         SampleBox domain, bool simply_connected = true);

  DVec eval(const DVec& u) const;
  const Matrix<ScalarExpr>& jacobian() const;  // d components / d u

  // Composition with the bundle projection of an extension over the target
  // group: pi o f, defined when target = ext.derived.
  GroupMap project_through(const CentralExtension& ext) const;

 private:
  mutable std::optional<Matrix<ScalarExpr>> jacobian_;
};

// Matrix of the differential in left-invariant frames at a chart point:
// rows = target coframe components, columns = source frame directions.
DMat left_trivialized_differential(const GroupMap& map, const DVec& u);

// Symbolic version scaled by det(chart jacobian) to stay division-free;
// the unscaled matrix is scaled / det.
struct ScaledDifferential {
  Matrix<ScalarExpr> scaled;
  ScalarExpr det;  // det of the source chart jacobian (1 for trivial charts)
};
ScaledDifferential scaled_left_trivialized_differential(const GroupMap& map);

enum class ContactVerdict { Contact, ProbablyContact, NotContact };
struct ContactResult {
  ContactVerdict verdict = ContactVerdict::ProbablyContact;
  bool exact = false;
  std::vector<double> witness;  // chart point for NotContact
};
ContactResult is_contact(const GroupMap& map, unsigned long long seed = 12345,
                         int samples = 32, double tol = 1e-9);

// Pansu differential at a chart point: the horizontal block of the
// left-trivialized differential extended to higher layers through bracket
// presentations; fails with Inconsistent when the extension is not a
// homomorphism within tolerance.
struct PansuDifferential {
  DMat matrix;  // target dim x source dim, graded
  double max_residual = 0.0;
  bool consistent = true;
};
PansuDifferential pansu_differential(const GroupMap& map, const DVec& u,
                                     double tol = 1e-9);

// Slow numeric cross-check: delta_{1/lambda}(f(g)^{-1} f(g delta_lambda
// exp(v))) for one scale lambda (trivial-chart maps only).
DVec pansu_differential_limit(const GroupMap& map, const DVec& u,
                              const DVec& v, double lambda);

// Symbolic Pansu differential (valid where the map is contact).
Matrix<ScalarExpr> pansu_differential_symbolic(const GroupMap& map);

// Pansu pullback of a left-invariant (V-valued) form; the result lives on
// the source chart in coordinate differentials.
FieldForm pansu_pullback(const GroupMap& map, const AlgebraForm& tau);

// Classical de Rham pullback of a field form on the target (trivial target
// chart, invariant basis) through the map; result in coordinate basis on
// the source chart.
FieldForm pullback(const GroupMap& map, const FieldForm& omega);
FieldForm pullback(const GroupMap& map, const AlgebraForm& omega);

}  // namespace carnot

#pragma once

#include "carnot/algebra.hpp"
#include "carnot/expr.hpp"
#include "carnot/forms.hpp"

namespace carnot {

// Group operations in exponential coordinates of the first kind, plus the
// left-invariant frame and coframe as polynomial-coefficient matrices.
// Supports step <= 6 (the Dynkin coefficients are generated up to there).
class GroupGeometry {
 public:
  explicit GroupGeometry(AlgebraPtr alg);

  const AlgebraPtr& algebra() const { return alg_; }

  // Group law log(exp(p) exp(q)); exact over rationals.
  QVec bch(const QVec& p, const QVec& q) const;
  DVec bch(const DVec& p, const DVec& q) const;
  QVec inverse(const QVec& p) const;
  DVec inverse(const DVec& p) const;

  // A(x): column i holds the coordinate components of the left-invariant
  // field X_i at x, i.e. X_i = sum_j A_{ji}(x) d/dx_j. Entries are
  // polynomials; A(0) = I.
  const Matrix<ScalarExpr>& frame_matrix() const;
  // Theta(x) = A(x)^{-1}: row i gives theta^i = sum_j Theta_{ij}(x) dx_j.
  const Matrix<ScalarExpr>& coframe_matrix() const;

  DMat frame_at(const DVec& x) const;
  DMat coframe_at(const DVec& x) const;

  // Left-trivialized derivative of a curve: Theta(x) * velocity.
  DVec left_trivialize(const DVec& x, const DVec& velocity) const;

 private:
  AlgebraPtr alg_;
  mutable std::optional<Matrix<ScalarExpr>> frame_, coframe_;
};

std::shared_ptr<GroupGeometry> group_cache(const AlgebraPtr& alg);

// Coefficients of z / (1 - e^{-z}) (Bernoulli numbers over factorials,
// B_1 = +1/2 convention). zeta(z) = 1/(1-e^{-z}) - 1/z shifts the list by
// one: zeta coefficient of z^k is bernoulli_over_factorial(k+1).
Rational bernoulli_over_factorial(int k);

}  // namespace carnot

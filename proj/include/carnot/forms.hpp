#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

// Strictly increasing multi-indices of {0..n-1}, rank <-> combination.
class CombTable {
 public:
  CombTable() = default;
  CombTable(int n, int k);
  int size() const { return static_cast<int>(combos_.size()); }
  const std::vector<int>& combo(int rank) const { return combos_[rank]; }
  int rank(const std::vector<int>& combo) const;
  // Sorts (extra, rest...) where rest is already increasing; returns
  // (rank, sign) or nullopt if a duplicate index occurs.
  std::optional<std::pair<int, int>> insert_sorted(
      int extra, const std::vector<int>& rest) const;

 private:
  int n_ = 0, k_ = 0;
  std::vector<std::vector<int>> combos_;
  std::map<std::vector<int>, int> rank_;
};

// Left-invariant V-valued k-form: exact rational coefficients over the
// coframe monomials theta^I, componentwise in a basis of V.
struct AlgebraForm {
  AlgebraPtr alg;
  int degree = 0;
  GradedVectorSpace values = GradedVectorSpace::scalar();
  QMat coeffs;  // C(dim, degree) x values.dim

  AlgebraForm() = default;
  AlgebraForm(AlgebraPtr alg_, int degree_,
              GradedVectorSpace values_ = GradedVectorSpace::scalar());

  static AlgebraForm coframe_element(AlgebraPtr alg, int i);
  static AlgebraForm monomial(AlgebraPtr alg, const std::vector<int>& indices,
                              const Rational& c = Rational(1),
                              int value_index = 0,
                              GradedVectorSpace values =
                                  GradedVectorSpace::scalar());

  bool is_zero() const { return coeffs.is_zero(); }
  AlgebraForm component(int v) const;  // scalar component v
  // Evaluate on a tuple of coefficient vectors; returns a V-vector.
  QVec evaluate(const std::vector<QVec>& args) const;

  AlgebraForm operator+(const AlgebraForm& o) const;
  AlgebraForm operator-(const AlgebraForm& o) const;
  AlgebraForm operator*(const Rational& s) const;
  bool operator==(const AlgebraForm& o) const;
  std::string to_string() const;
};

AlgebraForm wedge(const AlgebraForm& a, const AlgebraForm& b);

// Cached exact Rumin-complex data for one algebra: inner products on
// Lambda^k g*, the matrices of d0, d0^{-1}, the E0 bases, projections, and
// the Hodge star with volume form theta^1 ^ ... ^ theta^n.
class RuminCalculus {
 public:
  explicit RuminCalculus(AlgebraPtr alg);

  const AlgebraPtr& algebra() const { return alg_; }
  int dim() const { return alg_->dim(); }
  const CombTable& combs(int k) const;
  const QMat& form_gram(int k) const;    // inner product on Lambda^k
  const QMat& d0_matrix(int k) const;    // Lambda^k -> Lambda^{k+1}
  const QMat& d0_pinv_matrix(int k) const;  // Lambda^k -> Lambda^{k-1}
  const QMat& e0_matrix(int k) const;    // columns: orthogonal basis of E0^k
  const QMat& e0_projection(int k) const;
  QMat e0_perp_projection(int k) const;
  const QMat& hodge_matrix(int k) const; // Lambda^k -> Lambda^{n-k}
  int combo_weight(int k, int rank) const;

 private:
  void ensure_degree(int k) const;
  AlgebraPtr alg_;
  QMat gram_dual_;
  mutable std::map<int, CombTable> combs_;
  mutable std::map<int, QMat> gram_, d0_, pinv_, e0_, proj_e0_, hodge_;
};

// Shared per-algebra cache (algebras are immutable).
std::shared_ptr<RuminCalculus> rumin_cache(const AlgebraPtr& alg);

AlgebraForm d0(const AlgebraForm& form);
AlgebraForm d0_pseudoinverse(const AlgebraForm& form);
std::vector<AlgebraForm> e0_basis(const AlgebraPtr& alg, int degree);
AlgebraForm project_E0(const AlgebraForm& form);
AlgebraForm project_E0_perp(const AlgebraForm& form);
AlgebraForm hodge_star(const AlgebraForm& form);

// Weight of a form: the minimum coframe weight of its nonzero terms,
// componentwise over V (weights of the value space do not enter).
// nullopt plays the role of +infinity for the zero form.
std::optional<int> weight(const AlgebraForm& form);
std::map<int, AlgebraForm> pure_weight_split(const AlgebraForm& form);

int max_nontrivial_E0_weight_2(const AlgebraPtr& alg);

bool cocycle_check(const AlgebraForm& rho);
// rho = pi_E0(rho) + d0(mu) with mu in ker(d0)^perp; throws on non-cocycles.
struct CocycleDecomposition {
  AlgebraForm e0_part;
  AlgebraForm mu;
};
CocycleDecomposition cohomology_decompose(const AlgebraForm& rho);

// Pointwise inner product of two scalar k-forms (used componentwise).
Rational form_inner(const AlgebraForm& a, const AlgebraForm& b);

}  // namespace carnot

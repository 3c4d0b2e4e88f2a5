#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carnot/linalg.hpp"
#include "carnot/rational.hpp"

namespace carnot {

// A graded inner-product space: basis vectors carry a layer >= 1 and a
// symmetric positive definite gram matrix (identity unless overridden).
struct GradedVectorSpace {
  int dim = 0;
  std::vector<std::string> names;
  std::vector<int> layers;
  QMat gram;

  GradedVectorSpace() = default;
  GradedVectorSpace(std::vector<std::string> names_, std::vector<int> layers_,
                    std::optional<QMat> gram_ = std::nullopt);

  static GradedVectorSpace scalar(const std::string& name = "v",
                                  int layer = 1);
  static GradedVectorSpace trivial();  // dim 0

  int max_layer() const;
  std::vector<int> layer_indices(int layer) const;
  bool operator==(const GradedVectorSpace& o) const {
    return dim == o.dim && layers == o.layers && gram == o.gram;
  }
};

struct ValidationIssue {
  std::string clause;   // which invariant failed
  std::string message;  // witness description
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  void add(const std::string& clause, const std::string& message) {
    issues.push_back({clause, message});
  }
  std::string to_string() const;
};

class StratifiedAlgebra;
using AlgebraPtr = std::shared_ptr<const StratifiedAlgebra>;

// Linear map between graded spaces, graded when it maps layer k into layer k.
struct GradedLinearMap {
  std::vector<int> source_layers;
  std::vector<int> target_layers;
  QMat matrix;  // target_dim x source_dim

  bool is_graded() const;
  GradedLinearMap compose(const GradedLinearMap& inner) const;
  static GradedLinearMap identity(const std::vector<int>& layers);
};

// Stratified Lie algebra with exact rational structure constants
// [e_j, e_k] = sum_i c^i_{jk} e_i, layer-major basis ordering, and a
// layer-block-diagonal SPD inner product.
class StratifiedAlgebra {
 public:
  struct BracketEntry {
    int j, k;                        // 0-based basis indices, j < k
    std::map<int, Rational> coeffs;  // i -> c^i_{jk}
  };

  StratifiedAlgebra(std::vector<std::string> names, std::vector<int> layers,
                    std::vector<BracketEntry> brackets,
                    std::optional<QMat> gram = std::nullopt);

  int dim() const { return dim_; }
  int step() const { return step_; }
  int rank() const { return rank_; }  // dim of the horizontal layer
  int homogeneous_dimension() const { return homogeneous_dim_; }
  int layer_of(int i) const { return layers_[i]; }
  const std::vector<int>& layers() const { return layers_; }
  const std::vector<std::string>& names() const { return names_; }
  const QMat& gram() const { return gram_; }
  const GradedVectorSpace& space() const { return space_; }
  std::vector<int> layer_indices(int layer) const {
    return space_.layer_indices(layer);
  }
  bool abelian() const { return step_ <= 1; }

  // Structure constants of [e_j, e_k] as a coefficient vector.
  const QVec& basis_bracket(int j, int k) const;
  // Bilinear extension to coefficient vectors.
  QVec bracket(const QVec& v, const QVec& w) const;
  DVec bracket_d(const DVec& v, const DVec& w) const;

  // Optional metadata: the algebra is declared to be the jet space
  // J^k(R^n). Used only by the Lipschitz-1-connected whitelist.
  std::optional<std::pair<int, int>> jet_tag;

  bool operator==(const StratifiedAlgebra& o) const {
    return layers_ == o.layers_ && table_ == o.table_ && gram_ == o.gram_;
  }
  bool operator!=(const StratifiedAlgebra& o) const { return !(*this == o); }

  // For each basis vector e_c with layer >= 2, a presentation
  // e_c = sum coeff * [e_a, e_b] with layer(a) = 1, layer(b) = layer(c)-1.
  // Empty optional when the algebra is not stratified-onto.
  struct BracketPresentation {
    struct Term {
      int a, b;
      Rational coeff;
    };
    std::vector<Term> terms;
  };
  std::optional<std::vector<BracketPresentation>> bracket_presentations()
      const;

 private:
  int dim_, step_, rank_, homogeneous_dim_;
  std::vector<std::string> names_;
  std::vector<int> layers_;
  std::vector<QVec> table_;  // dim*dim coefficient vectors
  QMat gram_;
  GradedVectorSpace space_;
};

// Diagnostic validation of all stratified-algebra invariants.
ValidationReport validate_stratified(const StratifiedAlgebra& alg);

// The dilation delta_lambda scaling layer k by lambda^k.
GradedLinearMap dilation(const StratifiedAlgebra& alg, const Rational& lambda);
QVec dilate_point(const StratifiedAlgebra& alg, const Rational& lambda,
                  const QVec& coords);
DVec dilate_point(const StratifiedAlgebra& alg, double lambda,
                  const DVec& coords);

// Standard families with the usual basis conventions.
AlgebraPtr make_heisenberg(int n);
AlgebraPtr make_filiform(int s);
AlgebraPtr make_euclidean(int n);
// family in {"heisenberg", "filiform", "euclidean"}; jet spaces are
// metadata-only in this version and rejected here.
AlgebraPtr make_standard(const std::string& family,
                         const std::vector<int>& params);

AlgebraPtr direct_product(const AlgebraPtr& a, const AlgebraPtr& b);

}  // namespace carnot

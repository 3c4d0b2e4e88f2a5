#include "carnot/algebra.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace carnot {

GradedVectorSpace::GradedVectorSpace(std::vector<std::string> names_,
                                     std::vector<int> layers_,
                                     std::optional<QMat> gram_)
    : dim(static_cast<int>(layers_.size())),
      names(std::move(names_)),
      layers(std::move(layers_)) {
  if (names.empty()) {
    for (int i = 0; i < dim; ++i) names.push_back("v" + std::to_string(i + 1));
  }
  if (static_cast<int>(names.size()) != dim)
    throw Error(ErrorCode::DimensionMismatch,
                "basis names and layer list sizes differ");
  gram = gram_ ? *gram_ : QMat::identity(dim);
  if (static_cast<int>(gram.rows()) != dim ||
      static_cast<int>(gram.cols()) != dim)
    throw Error(ErrorCode::DimensionMismatch, "gram matrix has wrong size");
}

GradedVectorSpace GradedVectorSpace::scalar(const std::string& name,
                                            int layer) {
  return GradedVectorSpace({name}, {layer});
}

GradedVectorSpace GradedVectorSpace::trivial() {
  return GradedVectorSpace({}, {});
}

int GradedVectorSpace::max_layer() const {
  int m = 0;
  for (int l : layers) m = std::max(m, l);
  return m;
}

std::vector<int> GradedVectorSpace::layer_indices(int layer) const {
  std::vector<int> out;
  for (int i = 0; i < dim; ++i)
    if (layers[i] == layer) out.push_back(i);
  return out;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "valid";
  std::ostringstream os;
  for (const auto& issue : issues)
    os << "[" << issue.clause << "] " << issue.message << "\n";
  return os.str();
}

bool GradedLinearMap::is_graded() const {
  for (std::size_t i = 0; i < matrix.rows(); ++i)
    for (std::size_t j = 0; j < matrix.cols(); ++j)
      if (matrix(i, j) != 0 && target_layers[i] != source_layers[j])
        return false;
  return true;
}

GradedLinearMap GradedLinearMap::compose(const GradedLinearMap& inner) const {
  return {inner.source_layers, target_layers, matrix * inner.matrix};
}

GradedLinearMap GradedLinearMap::identity(const std::vector<int>& layers) {
  return {layers, layers, QMat::identity(layers.size())};
}

StratifiedAlgebra::StratifiedAlgebra(std::vector<std::string> names,
                                     std::vector<int> layers,
                                     std::vector<BracketEntry> brackets,
                                     std::optional<QMat> gram)
    : dim_(static_cast<int>(layers.size())),
      names_(std::move(names)),
      layers_(std::move(layers)) {
  if (names_.empty())
    for (int i = 0; i < dim_; ++i) names_.push_back("e" + std::to_string(i + 1));
  if (static_cast<int>(names_.size()) != dim_)
    throw Error(ErrorCode::DimensionMismatch,
                "basis names and layer list sizes differ");
  for (int i = 0; i + 1 < dim_; ++i)
    if (layers_[i] > layers_[i + 1])
      throw Error(ErrorCode::InvalidArgument,
                  "basis must be ordered layer-major");
  for (int l : layers_)
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "layers start at 1");

  table_.assign(static_cast<std::size_t>(dim_) * dim_, QVec(dim_, Rational(0)));
  for (const auto& e : brackets) {
    if (e.j < 0 || e.j >= dim_ || e.k < 0 || e.k >= dim_ || e.j == e.k)
      throw Error(ErrorCode::InvalidArgument, "bracket entry index out of range");
    for (const auto& [i, c] : e.coeffs) {
      if (i < 0 || i >= dim_)
        throw Error(ErrorCode::InvalidArgument, "bracket coefficient index out of range");
      table_[e.j * dim_ + e.k][i] += c;
      table_[e.k * dim_ + e.j][i] -= c;
    }
  }

  gram_ = gram ? *gram : QMat::identity(dim_);
  if (static_cast<int>(gram_.rows()) != dim_ ||
      static_cast<int>(gram_.cols()) != dim_)
    throw Error(ErrorCode::DimensionMismatch, "gram matrix has wrong size");

  step_ = 0;
  for (int l : layers_) step_ = std::max(step_, l);
  rank_ = 0;
  homogeneous_dim_ = 0;
  for (int l : layers_) {
    if (l == 1) ++rank_;
    homogeneous_dim_ += l;
  }
  space_ = GradedVectorSpace(names_, layers_, gram_);
}

const QVec& StratifiedAlgebra::basis_bracket(int j, int k) const {
  return table_[j * dim_ + k];
}

QVec StratifiedAlgebra::bracket(const QVec& v, const QVec& w) const {
  if (static_cast<int>(v.size()) != dim_ || static_cast<int>(w.size()) != dim_)
    throw Error(ErrorCode::DimensionMismatch, "bracket arguments have wrong length");
  QVec out(dim_, Rational(0));
  for (int j = 0; j < dim_; ++j) {
    if (v[j] == 0) continue;
    for (int k = 0; k < dim_; ++k) {
      if (w[k] == 0) continue;
      const Rational f = v[j] * w[k];
      const QVec& c = basis_bracket(j, k);
      for (int i = 0; i < dim_; ++i)
        if (c[i] != 0) out[i] += f * c[i];
    }
  }
  return out;
}

DVec StratifiedAlgebra::bracket_d(const DVec& v, const DVec& w) const {
  DVec out(dim_, 0.0);
  for (int j = 0; j < dim_; ++j) {
    if (v[j] == 0.0) continue;
    for (int k = 0; k < dim_; ++k) {
      if (w[k] == 0.0) continue;
      const double f = v[j] * w[k];
      const QVec& c = basis_bracket(j, k);
      for (int i = 0; i < dim_; ++i)
        if (c[i] != 0) out[i] += f * to_double(c[i]);
    }
  }
  return out;
}

std::optional<std::vector<StratifiedAlgebra::BracketPresentation>>
StratifiedAlgebra::bracket_presentations() const {
  std::vector<BracketPresentation> out(dim_);
  for (int layer = 2; layer <= step_; ++layer) {
    auto targets = layer_indices(layer);
    if (targets.empty()) continue;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < dim_; ++a) {
      if (layers_[a] != 1) continue;
      for (int b = 0; b < dim_; ++b)
        if (layers_[b] == layer - 1) pairs.emplace_back(a, b);
    }
    QMat m(dim_, pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const QVec& br = basis_bracket(pairs[p].first, pairs[p].second);
      for (int i = 0; i < dim_; ++i) m(i, p) = br[i];
    }
    for (int c : targets) {
      QVec rhs(dim_, Rational(0));
      rhs[c] = 1;
      auto sol = m.solve(rhs);
      if (!sol) return std::nullopt;
      BracketPresentation pres;
      for (std::size_t p = 0; p < pairs.size(); ++p)
        if ((*sol)[p] != 0)
          pres.terms.push_back({pairs[p].first, pairs[p].second, (*sol)[p]});
      out[c] = std::move(pres);
    }
  }
  return out;
}

ValidationReport validate_stratified(const StratifiedAlgebra& alg) {
  ValidationReport report;
  const int n = alg.dim();

  // Jacobi identity on all basis triples.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        QVec ea(n, Rational(0)), eb(n, Rational(0)), ec(n, Rational(0));
        ea[a] = 1;
        eb[b] = 1;
        ec[c] = 1;
        QVec s = alg.bracket(alg.bracket(ea, eb), ec) +
                 alg.bracket(alg.bracket(eb, ec), ea) +
                 alg.bracket(alg.bracket(ec, ea), eb);
        if (!is_zero(s))
          report.add("jacobi", "fails on basis triple (" + alg.names()[a] +
                                   "," + alg.names()[b] + "," + alg.names()[c] +
                                   ")");
      }

  // Grading compatibility, with layers beyond the step treated as zero.
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const QVec& br = alg.basis_bracket(j, k);
      const int want = alg.layer_of(j) + alg.layer_of(k);
      for (int i = 0; i < n; ++i)
        if (br[i] != 0 && alg.layer_of(i) != want)
          report.add("grading", "[" + alg.names()[j] + "," + alg.names()[k] +
                                    "] has a component in layer " +
                                    std::to_string(alg.layer_of(i)) +
                                    ", expected " + std::to_string(want));
    }

  // Stratification is onto: [g^1, g^k] spans g^{k+1}.
  for (int layer = 2; layer <= alg.step(); ++layer) {
    auto targets = alg.layer_indices(layer);
    if (targets.empty()) {
      report.add("stratification", "layer " + std::to_string(layer) + " is empty");
      continue;
    }
    std::vector<QVec> gens;
    for (int a = 0; a < n; ++a) {
      if (alg.layer_of(a) != 1) continue;
      for (int b = 0; b < n; ++b)
        if (alg.layer_of(b) == layer - 1)
          gens.push_back(alg.basis_bracket(a, b));
    }
    QMat m(n, gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g)
      for (int i = 0; i < n; ++i) m(i, g) = gens[g][i];
    if (m.rank() != targets.size())
      report.add("stratification", "[g^[1], g^[" + std::to_string(layer - 1) +
                                       "]] does not span g^[" +
                                       std::to_string(layer) + "]");
  }

  // Gram: symmetric, positive definite, layers pairwise orthogonal.
  const QMat& g = alg.gram();
  bool symmetric = true;
  for (int i = 0; i < n && symmetric; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g(i, j) != g(j, i)) {
        symmetric = false;
        break;
      }
  if (!symmetric) report.add("gram", "inner product matrix is not symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g(i, j) != 0 && alg.layer_of(i) != alg.layer_of(j)) {
        report.add("gram", "layers are not pairwise orthogonal");
        i = n;
        break;
      }
  if (symmetric) {
    // Leading principal minors must be positive.
    for (int k = 1; k <= n; ++k) {
      QMat sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = g(i, j);
      if (sub.determinant() <= 0) {
        report.add("gram", "inner product matrix is not positive definite");
        break;
      }
    }
  }

  return report;
}

GradedLinearMap dilation(const StratifiedAlgebra& alg, const Rational& lambda) {
  if (lambda <= 0)
    throw Error(ErrorCode::InvalidArgument, "dilation requires lambda > 0");
  QMat m(alg.dim(), alg.dim());
  for (int i = 0; i < alg.dim(); ++i) {
    Rational p(1);
    for (int k = 0; k < alg.layer_of(i); ++k) p *= lambda;
    m(i, i) = p;
  }
  return {alg.layers(), alg.layers(), m};
}

QVec dilate_point(const StratifiedAlgebra& alg, const Rational& lambda,
                  const QVec& coords) {
  QVec out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    Rational p(1);
    for (int k = 0; k < alg.layer_of(static_cast<int>(i)); ++k) p *= lambda;
    out[i] = p * coords[i];
  }
  return out;
}

DVec dilate_point(const StratifiedAlgebra& alg, double lambda,
                  const DVec& coords) {
  DVec out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    out[i] = std::pow(lambda, alg.layer_of(static_cast<int>(i))) * coords[i];
  return out;
}

AlgebraPtr make_heisenberg(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "heisenberg(n) needs n >= 1");
  std::vector<std::string> names;
  std::vector<int> layers;
  for (int i = 0; i < n; ++i) {
    names.push_back(n == 1 ? "X" : "X" + std::to_string(i + 1));
    layers.push_back(1);
  }
  for (int i = 0; i < n; ++i) {
    names.push_back(n == 1 ? "Y" : "Y" + std::to_string(i + 1));
    layers.push_back(1);
  }
  names.push_back("Z");
  layers.push_back(2);
  std::vector<StratifiedAlgebra::BracketEntry> brackets;
  for (int i = 0; i < n; ++i)
    brackets.push_back({i, n + i, {{2 * n, Rational(1)}}});
  return std::make_shared<StratifiedAlgebra>(names, layers, brackets);
}

AlgebraPtr make_filiform(int s) {
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "filiform(s) needs s >= 1");
  std::vector<std::string> names = {"X", "Y"};
  std::vector<int> layers = {1, 1};
  for (int k = 2; k <= s; ++k) {
    names.push_back("Z" + std::to_string(k));
    layers.push_back(k);
  }
  std::vector<StratifiedAlgebra::BracketEntry> brackets;
  if (s >= 2) brackets.push_back({0, 1, {{2, Rational(1)}}});
  for (int k = 2; k < s; ++k) brackets.push_back({0, k, {{k + 1, Rational(1)}}});
  return std::make_shared<StratifiedAlgebra>(names, layers, brackets);
}

AlgebraPtr make_euclidean(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "euclidean(n) needs n >= 0");
  std::vector<std::string> names;
  std::vector<int> layers;
  for (int i = 0; i < n; ++i) {
    names.push_back(n <= 3 ? std::string(1, "xyz"[i]) : "x" + std::to_string(i + 1));
    layers.push_back(1);
  }
  return std::make_shared<StratifiedAlgebra>(
      names, layers, std::vector<StratifiedAlgebra::BracketEntry>{});
}

AlgebraPtr make_standard(const std::string& family,
                         const std::vector<int>& params) {
  auto need = [&](std::size_t k) {
    if (params.size() != k)
      throw Error(ErrorCode::InvalidArgument,
                  family + " takes " + std::to_string(k) + " parameter(s)");
  };
  if (family == "heisenberg") {
    need(1);
    return make_heisenberg(params[0]);
  }
  if (family == "filiform") {
    need(1);
    return make_filiform(params[0]);
  }
  if (family == "euclidean") {
    need(1);
    return make_euclidean(params[0]);
  }
  if (family == "jet")
    throw Error(ErrorCode::InvalidArgument,
                "jet spaces are metadata-only: supply the algebra explicitly "
                "and set its jet tag");
  throw Error(ErrorCode::InvalidArgument, "unknown algebra family: " + family);
}

AlgebraPtr direct_product(const AlgebraPtr& a, const AlgebraPtr& b) {
  const int step = std::max(a->step(), b->step());
  std::vector<int> order;          // new index -> source index, a first then b
  std::vector<int> from_a, from_b; // source index -> new index
  from_a.assign(a->dim(), -1);
  from_b.assign(b->dim(), -1);
  std::vector<std::string> names;
  std::vector<int> layers;
  std::set<std::string> used;
  auto add_name = [&](std::string base) {
    std::string name = base;
    int suffix = 2;
    while (used.count(name)) name = base + "_" + std::to_string(suffix++);
    used.insert(name);
    names.push_back(name);
  };
  for (int layer = 1; layer <= step; ++layer) {
    for (int i = 0; i < a->dim(); ++i)
      if (a->layer_of(i) == layer) {
        from_a[i] = static_cast<int>(names.size());
        add_name(a->names()[i]);
        layers.push_back(layer);
        order.push_back(i);
      }
    for (int i = 0; i < b->dim(); ++i)
      if (b->layer_of(i) == layer) {
        from_b[i] = static_cast<int>(names.size());
        add_name(b->names()[i]);
        layers.push_back(layer);
        order.push_back(a->dim() + i);
      }
  }
  std::vector<StratifiedAlgebra::BracketEntry> brackets;
  auto push_brackets = [&](const StratifiedAlgebra& alg,
                           const std::vector<int>& remap) {
    for (int j = 0; j < alg.dim(); ++j)
      for (int k = j + 1; k < alg.dim(); ++k) {
        const QVec& c = alg.basis_bracket(j, k);
        std::map<int, Rational> coeffs;
        for (int i = 0; i < alg.dim(); ++i)
          if (c[i] != 0) coeffs[remap[i]] = c[i];
        if (!coeffs.empty()) {
          int nj = remap[j], nk = remap[k];
          if (nj < nk)
            brackets.push_back({nj, nk, coeffs});
          else {
            for (auto& [i, v] : coeffs) v = -v;
            brackets.push_back({nk, nj, coeffs});
          }
        }
      }
  };
  push_brackets(*a, from_a);
  push_brackets(*b, from_b);
  const int n = static_cast<int>(names.size());
  QMat gram(n, n);
  for (int i = 0; i < a->dim(); ++i)
    for (int j = 0; j < a->dim(); ++j)
      gram(from_a[i], from_a[j]) = a->gram()(i, j);
  for (int i = 0; i < b->dim(); ++i)
    for (int j = 0; j < b->dim(); ++j)
      gram(from_b[i], from_b[j]) = b->gram()(i, j);
  return std::make_shared<StratifiedAlgebra>(names, layers, brackets, gram);
}

}  // namespace carnot

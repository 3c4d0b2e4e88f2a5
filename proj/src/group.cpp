#include "carnot/group.hpp"

#include <functional>
#include <mutex>
#include <unordered_map>

namespace carnot {

namespace {

// Aggregated Dynkin series terms: a two-letter word w (false = first
// argument, true = second) evaluated as the right-normed bracket
// [w1,[w2,[...,w_m]]], times a rational coefficient.
struct DynkinTerm {
  std::vector<bool> word;
  Rational coeff;
};

std::vector<DynkinTerm> build_dynkin_terms(int step) {
  std::map<std::vector<bool>, Rational> acc;
  // Sequences of blocks (r_i, s_i) with r_i + s_i >= 1 and total <= step.
  std::vector<std::pair<int, int>> blocks;
  Rational factorial[8];
  factorial[0] = 1;
  for (int i = 1; i < 8; ++i) factorial[i] = factorial[i - 1] * i;

  std::function<void(int)> recurse = [&](int total) {
    if (!blocks.empty()) {
      const int n = static_cast<int>(blocks.size());
      Rational coeff = Rational((n % 2 == 1) ? 1 : -1, n) * Rational(1, total);
      std::vector<bool> word;
      for (const auto& [r, s] : blocks) {
        coeff /= factorial[r] * factorial[s];
        for (int i = 0; i < r; ++i) word.push_back(false);
        for (int i = 0; i < s; ++i) word.push_back(true);
      }
      // Right-normed bracket vanishes when the two innermost letters agree.
      const std::size_t m = word.size();
      if (m == 1 || word[m - 1] != word[m - 2]) {
        acc[word] += coeff;
      }
    }
    for (int w = 1; total + w <= step; ++w)
      for (int r = 0; r <= w; ++r) {
        blocks.emplace_back(r, w - r);
        recurse(total + w);
        blocks.pop_back();
      }
  };
  recurse(0);

  std::vector<DynkinTerm> out;
  for (auto& [word, coeff] : acc)
    if (coeff != 0) out.push_back({word, coeff});
  return out;
}

const std::vector<DynkinTerm>& dynkin_terms(int step) {
  static std::mutex mutex;
  static std::map<int, std::vector<DynkinTerm>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(step);
  if (it == cache.end())
    it = cache.emplace(step, build_dynkin_terms(step)).first;
  return it->second;
}

template <typename T>
std::vector<T> bch_impl(const StratifiedAlgebra& alg, const std::vector<T>& p,
                        const std::vector<T>& q) {
  std::vector<T> out(alg.dim(), T(0));
  for (int i = 0; i < alg.dim(); ++i) out[i] = p[i] + q[i];
  for (const auto& term : dynkin_terms(alg.step())) {
    if (term.word.size() < 2) continue;
    const std::size_t m = term.word.size();
    std::vector<T> v = term.word[m - 1] ? q : p;
    for (std::size_t i = m - 1; i-- > 0;) {
      if constexpr (std::is_same_v<T, Rational>)
        v = alg.bracket(term.word[i] ? q : p, v);
      else
        v = alg.bracket_d(term.word[i] ? q : p, v);
    }
    for (int i = 0; i < alg.dim(); ++i) {
      if constexpr (std::is_same_v<T, Rational>)
        out[i] += term.coeff * v[i];
      else
        out[i] += to_double(term.coeff) * v[i];
    }
  }
  return out;
}

// Bracket with symbolic coefficients through the structure constants.
std::vector<ScalarExpr> bracket_expr(const StratifiedAlgebra& alg,
                                     const std::vector<ScalarExpr>& v,
                                     const std::vector<ScalarExpr>& w) {
  std::vector<ScalarExpr> out(alg.dim(), ScalarExpr::constant(Rational(0)));
  for (int j = 0; j < alg.dim(); ++j) {
    if (v[j].is_zero_constant()) continue;
    for (int k = 0; k < alg.dim(); ++k) {
      if (w[k].is_zero_constant()) continue;
      const QVec& c = alg.basis_bracket(j, k);
      for (int i = 0; i < alg.dim(); ++i)
        if (c[i] != 0)
          out[i] = out[i] + ScalarExpr::constant(c[i]) * v[j] * w[k];
    }
  }
  return out;
}

}  // namespace

Rational bernoulli_over_factorial(int k) {
  // z / (1 - e^{-z}) = sum b_k z^k
  static const Rational b[] = {Rational(1),        Rational(1, 2),
                               Rational(1, 12),    Rational(0),
                               Rational(-1, 720),  Rational(0),
                               Rational(1, 30240), Rational(0)};
  if (k < 0 || k >= 8)
    throw Error(ErrorCode::StepTooHigh, "series coefficient out of range");
  return b[k];
}

GroupGeometry::GroupGeometry(AlgebraPtr alg) : alg_(std::move(alg)) {
  if (alg_->step() > 6)
    throw Error(ErrorCode::StepTooHigh,
                "group calculus supports step <= 6; got step " +
                    std::to_string(alg_->step()));
}

QVec GroupGeometry::bch(const QVec& p, const QVec& q) const {
  if (static_cast<int>(p.size()) != alg_->dim() ||
      static_cast<int>(q.size()) != alg_->dim())
    throw Error(ErrorCode::DimensionMismatch, "group points have wrong length");
  return bch_impl(*alg_, p, q);
}

DVec GroupGeometry::bch(const DVec& p, const DVec& q) const {
  if (static_cast<int>(p.size()) != alg_->dim() ||
      static_cast<int>(q.size()) != alg_->dim())
    throw Error(ErrorCode::DimensionMismatch, "group points have wrong length");
  return bch_impl(*alg_, p, q);
}

QVec GroupGeometry::inverse(const QVec& p) const {
  QVec out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
  return out;
}

DVec GroupGeometry::inverse(const DVec& p) const {
  DVec out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
  return out;
}

const Matrix<ScalarExpr>& GroupGeometry::frame_matrix() const {
  if (frame_) return *frame_;
  const int n = alg_->dim();
  // Column i: (ad x / (1 - e^{-ad x})) e_i, series truncated by nilpotency.
  std::vector<ScalarExpr> x;
  for (int j = 0; j < n; ++j) x.push_back(ScalarExpr::variable(j));
  Matrix<ScalarExpr> a(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<ScalarExpr> acc(n, ScalarExpr::constant(Rational(0)));
    std::vector<ScalarExpr> power(n, ScalarExpr::constant(Rational(0)));
    power[i] = ScalarExpr::constant(Rational(1));  // (ad x)^0 e_i
    for (int k = 0; k < alg_->step(); ++k) {
      const Rational c = bernoulli_over_factorial(k);
      if (c != 0)
        for (int j = 0; j < n; ++j)
          acc[j] = acc[j] + ScalarExpr::constant(c) * power[j];
      power = bracket_expr(*alg_, x, power);
    }
    for (int j = 0; j < n; ++j) a(j, i) = acc[j];
  }
  frame_ = std::move(a);
  return *frame_;
}

const Matrix<ScalarExpr>& GroupGeometry::coframe_matrix() const {
  if (coframe_) return *coframe_;
  const int n = alg_->dim();
  const auto& a = frame_matrix();
  // A = I + N with N strictly raising the layer, so A^{-1} is the finite
  // Neumann series I - N + N^2 - ...
  Matrix<ScalarExpr> nil(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      nil(i, j) = i == j ? a(i, j) - ScalarExpr::constant(Rational(1)) : a(i, j);
  Matrix<ScalarExpr> inv(n, n), power(n, n);
  for (int i = 0; i < n; ++i) {
    inv(i, i) = ScalarExpr::constant(Rational(1));
    power(i, i) = ScalarExpr::constant(Rational(1));
  }
  for (int k = 1; k < alg_->step(); ++k) {
    // power = power * nil (symbolic matrix product)
    Matrix<ScalarExpr> next(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<ScalarExpr> terms;
        for (int l = 0; l < n; ++l) {
          if (power(i, l).is_zero_constant() || nil(l, j).is_zero_constant())
            continue;
          terms.push_back(power(i, l) * nil(l, j));
        }
        next(i, j) = ScalarExpr::add(std::move(terms));
      }
    power = next;
    const Rational sign = (k % 2 == 1) ? Rational(-1) : Rational(1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        inv(i, j) = inv(i, j) + ScalarExpr::constant(sign) * power(i, j);
  }
  coframe_ = std::move(inv);
  return *coframe_;
}

namespace {
DMat eval_matrix(const Matrix<ScalarExpr>& m, const DVec& x) {
  DMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).eval(x);
  return out;
}
}  // namespace

DMat GroupGeometry::frame_at(const DVec& x) const {
  return eval_matrix(frame_matrix(), x);
}

DMat GroupGeometry::coframe_at(const DVec& x) const {
  return eval_matrix(coframe_matrix(), x);
}

DVec GroupGeometry::left_trivialize(const DVec& x, const DVec& velocity) const {
  return coframe_at(x) * velocity;
}

std::shared_ptr<GroupGeometry> group_cache(const AlgebraPtr& alg) {
  static std::mutex mutex;
  static std::unordered_map<const StratifiedAlgebra*,
                            std::shared_ptr<GroupGeometry>>
      cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(alg.get());
  if (it != cache.end()) return it->second;
  auto geo = std::make_shared<GroupGeometry>(alg);
  cache.emplace(alg.get(), geo);
  return geo;
}

}  // namespace carnot


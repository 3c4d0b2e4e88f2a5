#include "carnot/forms.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace carnot {

CombTable::CombTable(int n, int k) : n_(n), k_(k) {
  if (k < 0 || k > n) return;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    rank_[cur] = static_cast<int>(combos_.size());
    combos_.push_back(cur);
    if (k == 0) break;
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
}

int CombTable::rank(const std::vector<int>& combo) const {
  auto it = rank_.find(combo);
  return it == rank_.end() ? -1 : it->second;
}

std::optional<std::pair<int, int>> CombTable::insert_sorted(
    int extra, const std::vector<int>& rest) const {
  std::vector<int> merged;
  merged.reserve(rest.size() + 1);
  int sign = 1;
  bool inserted = false;
  for (int r : rest) {
    if (!inserted) {
      if (r == extra) return std::nullopt;
      if (r > extra) {
        merged.push_back(extra);
        inserted = true;
      } else {
        sign = -sign;
      }
    }
    if (r == extra) return std::nullopt;
    merged.push_back(r);
  }
  if (!inserted) merged.push_back(extra);
  int rk = rank(merged);
  if (rk < 0) return std::nullopt;
  return std::make_pair(rk, sign);
}

AlgebraForm::AlgebraForm(AlgebraPtr alg_, int degree_,
                         GradedVectorSpace values_)
    : alg(std::move(alg_)), degree(degree_), values(std::move(values_)) {
  const auto& table = rumin_cache(alg)->combs(degree);
  coeffs = QMat(table.size(), values.dim);
}

AlgebraForm AlgebraForm::coframe_element(AlgebraPtr alg, int i) {
  return monomial(std::move(alg), {i});
}

AlgebraForm AlgebraForm::monomial(AlgebraPtr alg,
                                  const std::vector<int>& indices,
                                  const Rational& c, int value_index,
                                  GradedVectorSpace values) {
  AlgebraForm f(std::move(alg), static_cast<int>(indices.size()),
                std::move(values));
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] == sorted[i + 1]) return f;  // repeated index: zero form
  // Sign of the sorting permutation.
  int sign = 1;
  std::vector<int> tmp = indices;
  for (std::size_t i = 0; i < tmp.size(); ++i)
    for (std::size_t j = i + 1; j < tmp.size(); ++j)
      if (tmp[i] > tmp[j]) {
        std::swap(tmp[i], tmp[j]);
        sign = -sign;
      }
  const auto& table = rumin_cache(f.alg)->combs(f.degree);
  f.coeffs(table.rank(sorted), value_index) = sign * c;
  return f;
}

AlgebraForm AlgebraForm::component(int v) const {
  AlgebraForm out(alg, degree);
  for (std::size_t r = 0; r < coeffs.rows(); ++r)
    out.coeffs(r, 0) = coeffs(r, v);
  return out;
}

QVec AlgebraForm::evaluate(const std::vector<QVec>& args) const {
  if (static_cast<int>(args.size()) != degree)
    throw Error(ErrorCode::DimensionMismatch, "wrong number of arguments");
  const auto& table = rumin_cache(alg)->combs(degree);
  QVec out(values.dim, Rational(0));
  // theta^I(v_1,...,v_k) = det [v_b[i_a]]
  for (int r = 0; r < table.size(); ++r) {
    bool any = false;
    for (int v = 0; v < values.dim; ++v)
      if (coeffs(r, v) != 0) any = true;
    if (!any) continue;
    const auto& combo = table.combo(r);
    QMat m(degree, degree);
    for (int a = 0; a < degree; ++a)
      for (int b = 0; b < degree; ++b) m(a, b) = args[b][combo[a]];
    const Rational det = m.determinant();
    if (det == 0) continue;
    for (int v = 0; v < values.dim; ++v) out[v] += coeffs(r, v) * det;
  }
  return out;
}

AlgebraForm AlgebraForm::operator+(const AlgebraForm& o) const {
  if (*alg != *o.alg || degree != o.degree || !(values == o.values))
    throw Error(ErrorCode::AlgebraMismatch, "cannot add incompatible forms");
  AlgebraForm f = *this;
  f.coeffs = coeffs + o.coeffs;
  return f;
}

AlgebraForm AlgebraForm::operator-(const AlgebraForm& o) const {
  if (*alg != *o.alg || degree != o.degree || !(values == o.values))
    throw Error(ErrorCode::AlgebraMismatch, "cannot subtract incompatible forms");
  AlgebraForm f = *this;
  f.coeffs = coeffs - o.coeffs;
  return f;
}

AlgebraForm AlgebraForm::operator*(const Rational& s) const {
  AlgebraForm f = *this;
  f.coeffs = coeffs * s;
  return f;
}

bool AlgebraForm::operator==(const AlgebraForm& o) const {
  return *alg == *o.alg && degree == o.degree && coeffs == o.coeffs;
}

std::string AlgebraForm::to_string() const {
  const auto& table = rumin_cache(alg)->combs(degree);
  std::ostringstream os;
  bool first = true;
  for (int r = 0; r < table.size(); ++r)
    for (int v = 0; v < values.dim; ++v) {
      if (coeffs(r, v) == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << rational_to_string(coeffs(r, v));
      for (int i : table.combo(r)) os << " " << alg->names()[i] << "*";
      if (values.dim > 1) os << " (x) " << values.names[v];
    }
  if (first) os << "0";
  return os.str();
}

AlgebraForm wedge(const AlgebraForm& a, const AlgebraForm& b) {
  if (*a.alg != *b.alg)
    throw Error(ErrorCode::AlgebraMismatch, "wedge of forms on different algebras");
  if (a.values.dim != 1 && b.values.dim != 1)
    throw Error(ErrorCode::InvalidArgument,
                "wedge requires at least one scalar factor");
  const GradedVectorSpace values = a.values.dim == 1 ? b.values : a.values;
  AlgebraForm out(a.alg, a.degree + b.degree, values);
  if (a.degree + b.degree > a.alg->dim()) return out;
  auto cache = rumin_cache(a.alg);
  const auto& ta = cache->combs(a.degree);
  const auto& tb = cache->combs(b.degree);
  const auto& tout = cache->combs(a.degree + b.degree);
  for (int ra = 0; ra < ta.size(); ++ra)
    for (int va = 0; va < a.values.dim; ++va) {
      if (a.coeffs(ra, va) == 0) continue;
      for (int rb = 0; rb < tb.size(); ++rb)
        for (int vb = 0; vb < b.values.dim; ++vb) {
          if (b.coeffs(rb, vb) == 0) continue;
          // merge combos with sign
          std::vector<int> merged = ta.combo(ra);
          int sign = 1;
          bool zero = false;
          for (int x : tb.combo(rb)) {
            std::size_t pos = merged.size();
            for (std::size_t i = 0; i < merged.size(); ++i) {
              if (merged[i] == x) {
                zero = true;
                break;
              }
              if (merged[i] > x) {
                pos = i;
                break;
              }
            }
            if (zero) break;
            if ((merged.size() - pos) % 2 == 1) sign = -sign;
            merged.insert(merged.begin() + pos, x);
          }
          if (zero) continue;
          const int v = a.values.dim == 1 ? vb : va;
          out.coeffs(tout.rank(merged), v) +=
              sign * a.coeffs(ra, va) * b.coeffs(rb, vb);
        }
    }
  return out;
}

RuminCalculus::RuminCalculus(AlgebraPtr alg) : alg_(std::move(alg)) {
  auto inv = alg_->gram().inverse();
  if (!inv)
    throw Error(ErrorCode::InvalidArgument, "gram matrix is singular");
  gram_dual_ = *inv;
}

const CombTable& RuminCalculus::combs(int k) const {
  auto it = combs_.find(k);
  if (it == combs_.end())
    it = combs_.emplace(k, CombTable(alg_->dim(), k)).first;
  return it->second;
}

int RuminCalculus::combo_weight(int k, int rank) const {
  int w = 0;
  for (int i : combs(k).combo(rank)) w += alg_->layer_of(i);
  return w;
}

const QMat& RuminCalculus::form_gram(int k) const {
  auto it = gram_.find(k);
  if (it != gram_.end()) return it->second;
  const auto& table = combs(k);
  QMat w(table.size(), table.size());
  for (int a = 0; a < table.size(); ++a)
    for (int b = a; b < table.size(); ++b) {
      QMat minor(k, k);
      const auto& ia = table.combo(a);
      const auto& ib = table.combo(b);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) minor(i, j) = gram_dual_(ia[i], ib[j]);
      Rational det = k == 0 ? Rational(1) : minor.determinant();
      w(a, b) = det;
      w(b, a) = det;
    }
  return gram_.emplace(k, std::move(w)).first->second;
}

const QMat& RuminCalculus::d0_matrix(int k) const {
  auto it = d0_.find(k);
  if (it != d0_.end()) return it->second;
  const int n = alg_->dim();
  const auto& src = combs(k);
  const auto& dst = combs(k + 1);
  QMat m(dst.size(), src.size());
  for (int rs = 0; rs < dst.size(); ++rs) {
    const auto& s = dst.combo(rs);
    for (int pi = 0; pi < k + 1; ++pi)
      for (int pj = pi + 1; pj < k + 1; ++pj) {
        const QVec& br = alg_->basis_bracket(s[pi], s[pj]);
        std::vector<int> rest;
        rest.reserve(k - 1);
        for (int t = 0; t < k + 1; ++t)
          if (t != pi && t != pj) rest.push_back(s[t]);
        // (-1)^{i+j} with 1-based positions, i.e. (-1)^{pi+pj}
        const int outer_sign = ((pi + pj) % 2 == 0) ? 1 : -1;
        for (int l = 0; l < n; ++l) {
          if (br[l] == 0) continue;
          auto hit = src.insert_sorted(l, rest);
          if (!hit) continue;
          m(rs, hit->first) += outer_sign * hit->second * br[l];
        }
      }
  }
  return d0_.emplace(k, std::move(m)).first->second;
}

const QMat& RuminCalculus::d0_pinv_matrix(int k) const {
  auto it = pinv_.find(k);
  if (it != pinv_.end()) return it->second;
  const auto& src = combs(k);
  QMat pinv(k == 0 ? 0 : combs(k - 1).size(), src.size());
  if (k >= 1) {
    const QMat& a = d0_matrix(k - 1);
    const QMat proj_im = span_projection(a, form_gram(k));
    for (int col = 0; col < src.size(); ++col) {
      QVec unit(src.size(), Rational(0));
      unit[col] = 1;
      QVec target = proj_im * unit;
      auto eta = least_norm_solve(a, target, form_gram(k - 1));
      if (!eta)
        throw Error(ErrorCode::NoSolution, "pseudo-inverse solve failed");
      for (std::size_t i = 0; i < eta->size(); ++i) pinv(i, col) = (*eta)[i];
    }
  }
  return pinv_.emplace(k, std::move(pinv)).first->second;
}

const QMat& RuminCalculus::e0_matrix(int k) const {
  auto it = e0_.find(k);
  if (it != e0_.end()) return it->second;
  const auto& table = combs(k);
  // E0^k = ker(d0) cap im(d0)^perp, computed weight-by-weight so the basis
  // is pure-weight, then orthogonalized (not normalized).
  std::map<int, std::vector<int>> by_weight;
  for (int r = 0; r < table.size(); ++r)
    by_weight[combo_weight(k, r)].push_back(r);
  QMat basis(table.size(), 0);
  const QMat& a_up = d0_matrix(k);
  const QMat a_down = k >= 1 ? d0_matrix(k - 1) : QMat(table.size(), 0);
  const QMat& w = form_gram(k);
  for (const auto& [weight, idx] : by_weight) {
    (void)weight;
    QMat restricted(a_up.rows() + a_down.cols(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
      for (std::size_t r = 0; r < a_up.rows(); ++r)
        restricted(r, c) = a_up(r, idx[c]);
      // rows of a_down^T W: orthogonality to im(d0)
      for (std::size_t r = 0; r < a_down.cols(); ++r) {
        Rational v(0);
        for (std::size_t i = 0; i < a_down.rows(); ++i)
          if (a_down(i, r) != 0) v += a_down(i, r) * w(i, idx[c]);
        restricted(a_up.rows() + r, c) = v;
      }
    }
    QMat kern = restricted.kernel();
    // Lift back to full index space.
    QMat lifted(table.size(), kern.cols());
    for (std::size_t c = 0; c < kern.cols(); ++c)
      for (std::size_t i = 0; i < idx.size(); ++i)
        lifted(idx[i], c) = kern(i, c);
    // Gram-Schmidt within this weight block (no normalization).
    std::vector<QVec> kept;
    for (std::size_t c = 0; c < lifted.cols(); ++c) {
      QVec v = lifted.col(c);
      for (const auto& u : kept) {
        Rational num = inner(v, u, w);
        if (num == 0) continue;
        Rational den = inner(u, u, w);
        v = v - (num / den) * u;
      }
      if (!is_zero(v)) kept.push_back(v);
    }
    QMat block(table.size(), kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c)
      for (int i = 0; i < table.size(); ++i) block(i, c) = kept[c][i];
    basis = basis.hstack(block);
  }
  return e0_.emplace(k, std::move(basis)).first->second;
}

const QMat& RuminCalculus::e0_projection(int k) const {
  auto it = proj_e0_.find(k);
  if (it != proj_e0_.end()) return it->second;
  QMat p = span_projection(e0_matrix(k), form_gram(k));
  return proj_e0_.emplace(k, std::move(p)).first->second;
}

QMat RuminCalculus::e0_perp_projection(int k) const {
  return QMat::identity(combs(k).size()) - e0_projection(k);
}

const QMat& RuminCalculus::hodge_matrix(int k) const {
  auto it = hodge_.find(k);
  if (it != hodge_.end()) return it->second;
  const int n = alg_->dim();
  const auto& src = combs(k);
  const auto& dst = combs(n - k);
  const QMat& w = form_gram(k);
  QMat star(dst.size(), src.size());
  for (int col = 0; col < src.size(); ++col) {
    // star(theta^col) has component on the complement of each I weighted by
    // sign(I, I^c) * W_k(I, col):  theta^I ^ star(omega) = <theta^I, omega> vol.
    for (int ri = 0; ri < src.size(); ++ri) {
      if (w(ri, col) == 0) continue;
      const auto& i_combo = src.combo(ri);
      std::vector<int> comp;
      comp.reserve(n - k);
      {
        std::vector<bool> used(n, false);
        for (int x : i_combo) used[x] = true;
        for (int x = 0; x < n; ++x)
          if (!used[x]) comp.push_back(x);
      }
      // sign of the permutation (i_combo, comp) relative to (0..n-1)
      std::vector<int> perm = i_combo;
      perm.insert(perm.end(), comp.begin(), comp.end());
      int sign = 1;
      for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
          if (perm[a] > perm[b]) sign = -sign;
      star(dst.rank(comp), col) += sign * w(ri, col);
    }
  }
  return hodge_.emplace(k, std::move(star)).first->second;
}

std::shared_ptr<RuminCalculus> rumin_cache(const AlgebraPtr& alg) {
  static std::mutex mutex;
  static std::unordered_map<const StratifiedAlgebra*,
                            std::shared_ptr<RuminCalculus>>
      cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(alg.get());
  if (it != cache.end()) return it->second;
  auto rc = std::make_shared<RuminCalculus>(alg);
  cache.emplace(alg.get(), rc);
  return rc;
}

namespace {
AlgebraForm apply_matrix(const AlgebraForm& form, const QMat& m, int out_degree) {
  AlgebraForm out(form.alg, out_degree, form.values);
  out.coeffs = m * form.coeffs;
  return out;
}
}  // namespace

AlgebraForm d0(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  return apply_matrix(form, rc->d0_matrix(form.degree), form.degree + 1);
}

AlgebraForm d0_pseudoinverse(const AlgebraForm& form) {
  if (form.degree < 1)
    throw Error(ErrorCode::InvalidArgument, "d0^{-1} needs degree >= 1");
  auto rc = rumin_cache(form.alg);
  return apply_matrix(form, rc->d0_pinv_matrix(form.degree), form.degree - 1);
}

std::vector<AlgebraForm> e0_basis(const AlgebraPtr& alg, int degree) {
  auto rc = rumin_cache(alg);
  const QMat& basis = rc->e0_matrix(degree);
  std::vector<AlgebraForm> out;
  for (std::size_t c = 0; c < basis.cols(); ++c) {
    AlgebraForm f(alg, degree);
    for (std::size_t i = 0; i < basis.rows(); ++i) f.coeffs(i, 0) = basis(i, c);
    out.push_back(std::move(f));
  }
  return out;
}

AlgebraForm project_E0(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  return apply_matrix(form, rc->e0_projection(form.degree), form.degree);
}

AlgebraForm project_E0_perp(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  return apply_matrix(form, rc->e0_perp_projection(form.degree), form.degree);
}

AlgebraForm hodge_star(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  return apply_matrix(form, rc->hodge_matrix(form.degree),
                      form.alg->dim() - form.degree);
}

std::optional<int> weight(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  std::optional<int> w;
  for (std::size_t r = 0; r < form.coeffs.rows(); ++r)
    for (int v = 0; v < form.values.dim; ++v)
      if (form.coeffs(r, v) != 0) {
        int cw = rc->combo_weight(form.degree, static_cast<int>(r));
        if (!w || cw < *w) w = cw;
      }
  return w;
}

std::map<int, AlgebraForm> pure_weight_split(const AlgebraForm& form) {
  auto rc = rumin_cache(form.alg);
  std::map<int, AlgebraForm> out;
  for (std::size_t r = 0; r < form.coeffs.rows(); ++r)
    for (int v = 0; v < form.values.dim; ++v) {
      if (form.coeffs(r, v) == 0) continue;
      int cw = rc->combo_weight(form.degree, static_cast<int>(r));
      auto it = out.find(cw);
      if (it == out.end())
        it = out.emplace(cw, AlgebraForm(form.alg, form.degree, form.values))
                 .first;
      it->second.coeffs(r, v) = form.coeffs(r, v);
    }
  return out;
}

int max_nontrivial_E0_weight_2(const AlgebraPtr& alg) {
  auto rc = rumin_cache(alg);
  const QMat& basis = rc->e0_matrix(2);
  int best = 0;
  for (std::size_t c = 0; c < basis.cols(); ++c)
    for (std::size_t r = 0; r < basis.rows(); ++r)
      if (basis(r, c) != 0)
        best = std::max(best, rc->combo_weight(2, static_cast<int>(r)));
  return best;
}

bool cocycle_check(const AlgebraForm& rho) { return d0(rho).is_zero(); }

CocycleDecomposition cohomology_decompose(const AlgebraForm& rho) {
  if (!cocycle_check(rho))
    throw Error(ErrorCode::NotClosed, "cohomology_decompose needs a cocycle");
  CocycleDecomposition out{project_E0(rho), d0_pseudoinverse(rho)};
  return out;
}

Rational form_inner(const AlgebraForm& a, const AlgebraForm& b) {
  if (*a.alg != *b.alg || a.degree != b.degree)
    throw Error(ErrorCode::AlgebraMismatch, "inner product of incompatible forms");
  auto rc = rumin_cache(a.alg);
  return inner(a.coeffs.col(0), b.coeffs.col(0), rc->form_gram(a.degree));
}

}  // namespace carnot

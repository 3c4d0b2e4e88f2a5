#include "carnot/field_forms.hpp"

#include <algorithm>

namespace carnot {

namespace {

const ScalarExpr kZero = ScalarExpr::constant(Rational(0));
const ScalarExpr kOne = ScalarExpr::constant(Rational(1));

void simplify_all(Matrix<ScalarExpr>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = m(i, j).simplified();
}

ScalarExpr dot_row(const Matrix<ScalarExpr>& m, int row,
                   const std::vector<ScalarExpr>& v) {
  std::vector<ScalarExpr> terms;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!m(row, j).is_zero_constant() && !v[j].is_zero_constant())
      terms.push_back(m(row, j) * v[j]);
  return ScalarExpr::add(std::move(terms));
}

Matrix<ScalarExpr> mat_mul(const Matrix<ScalarExpr>& a,
                           const Matrix<ScalarExpr>& b) {
  Matrix<ScalarExpr> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::vector<ScalarExpr> terms;
      for (std::size_t l = 0; l < a.cols(); ++l)
        if (!a(i, l).is_zero_constant() && !b(l, j).is_zero_constant())
          terms.push_back(a(i, l) * b(l, j));
      out(i, j) = ScalarExpr::add(std::move(terms));
    }
  return out;
}

// Symbolic determinant by Laplace expansion (small matrices only).
ScalarExpr sym_det(const Matrix<ScalarExpr>& m, std::vector<int> cols) {
  const std::size_t k = cols.size();
  const std::size_t row = m.rows() - k;
  if (k == 0) return kOne;
  std::vector<ScalarExpr> terms;
  for (std::size_t c = 0; c < k; ++c) {
    if (m(row, cols[c]).is_zero_constant()) continue;
    std::vector<int> rest;
    for (std::size_t i = 0; i < k; ++i)
      if (i != c) rest.push_back(cols[i]);
    ScalarExpr minor = sym_det(m, rest);
    ScalarExpr term = m(row, cols[c]) * minor;
    if (c % 2 == 1) term = -term;
    terms.push_back(term);
  }
  return ScalarExpr::add(std::move(terms));
}

ScalarExpr sym_det(const Matrix<ScalarExpr>& m) {
  std::vector<int> cols(m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i) cols[i] = static_cast<int>(i);
  return sym_det(m, cols);
}

// Minor of m: rows from `rows`, columns from `cols` (same size).
ScalarExpr sym_minor(const Matrix<ScalarExpr>& m, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  Matrix<ScalarExpr> sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      sub(i, j) = m(rows[i], cols[j]);
  return sym_det(sub);
}

}  // namespace

std::shared_ptr<const Chart> Chart::exponential(AlgebraPtr group,
                                                SampleBox domain) {
  auto chart = std::shared_ptr<Chart>(new Chart());
  chart->group_ = std::move(group);
  chart->trivial_ = true;
  for (int i = 0; i < chart->group_->dim(); ++i)
    chart->into_group_.push_back(ScalarExpr::variable(i));
  if (domain.ranges.empty())
    domain.ranges.assign(chart->group_->dim(), {-1.0, 1.0});
  chart->domain_ = std::move(domain);
  chart->names_ = chart->group_->names();
  for (auto& n : chart->names_)
    std::transform(n.begin(), n.end(), n.begin(), ::tolower);
  return chart;
}

std::shared_ptr<const Chart> Chart::cylinder(AlgebraPtr group,
                                             SampleBox domain) {
  const int n = group->dim();
  if (n < 2 || group->layer_of(0) != 1 || group->layer_of(1) != 1)
    throw Error(ErrorCode::InvalidArgument,
                "cylinder chart needs two horizontal leading coordinates");
  std::vector<ScalarExpr> into;
  auto r = ScalarExpr::variable(0), t = ScalarExpr::variable(1);
  into.push_back(r * ScalarExpr::cos(t));
  into.push_back(r * ScalarExpr::sin(t));
  for (int i = 2; i < n; ++i) into.push_back(ScalarExpr::variable(i));
  std::vector<std::string> names = {"r", "t"};
  for (int i = 2; i < n; ++i) {
    std::string nm = group->names()[i];
    std::transform(nm.begin(), nm.end(), nm.begin(), ::tolower);
    names.push_back(nm);
  }
  if (domain.ranges.empty()) {
    domain.ranges.push_back({0.5, 2.0});
    domain.ranges.push_back({-2.0, 2.0});
    for (int i = 2; i < n; ++i) domain.ranges.push_back({-1.0, 1.0});
  }
  return custom(std::move(group), std::move(into), std::move(domain),
                std::move(names));
}

std::shared_ptr<const Chart> Chart::custom(AlgebraPtr group,
                                           std::vector<ScalarExpr> into_group,
                                           SampleBox domain,
                                           std::vector<std::string> names) {
  auto chart = std::shared_ptr<Chart>(new Chart());
  if (static_cast<int>(into_group.size()) != group->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "chart must map into all group coordinates");
  if (static_cast<int>(domain.ranges.size()) != group->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "chart domain box must match the dimension");
  chart->group_ = std::move(group);
  chart->into_group_ = std::move(into_group);
  chart->trivial_ = false;
  chart->domain_ = std::move(domain);
  chart->names_ = std::move(names);
  return chart;
}

const Matrix<ScalarExpr>& Chart::jacobian() const {
  if (jacobian_) return *jacobian_;
  const int n = dim();
  Matrix<ScalarExpr> j(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) j(i, m) = into_group_[i].diff(m);
  jacobian_ = std::move(j);
  return *jacobian_;
}

const Matrix<ScalarExpr>& Chart::invariant_in_coords() const {
  if (m_) return *m_;
  auto geo = group_cache(group_);
  if (trivial_) {
    m_ = geo->coframe_matrix();
    return *m_;
  }
  // Theta(chart(u)) * J_chart(u)
  const auto& theta = geo->coframe_matrix();
  const int n = dim();
  Matrix<ScalarExpr> composed(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) composed(i, j) = theta(i, j).substitute(into_group_);
  m_ = mat_mul(composed, jacobian());
  return *m_;
}

const Matrix<ScalarExpr>& Chart::coords_in_invariant() const {
  if (minv_) return *minv_;
  auto geo = group_cache(group_);
  if (trivial_) {
    minv_ = geo->frame_matrix();
    return *minv_;
  }
  // M^{-1} = J^{-1} A(chart(u)) with J^{-1} = adj(J) / det(J).
  const int n = dim();
  const auto& jac = jacobian();
  ScalarExpr det = sym_det(jac);
  ScalarExpr det_inv = ScalarExpr::pow(det, -1);
  Matrix<ScalarExpr> adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int r = 0; r < n; ++r)
        if (r != j) rows.push_back(r);
      for (int c = 0; c < n; ++c)
        if (c != i) cols.push_back(c);
      ScalarExpr cof = sym_minor(jac, rows, cols);
      if ((i + j) % 2 == 1) cof = -cof;
      adj(i, j) = cof;
    }
  const auto& frame = group_cache(group_)->frame_matrix();
  Matrix<ScalarExpr> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = frame(i, j).substitute(into_group_);
  Matrix<ScalarExpr> inv = mat_mul(adj, a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = det_inv * inv(i, j);
  minv_ = std::move(inv);
  return *minv_;
}

DVec Chart::to_group(const DVec& u) const {
  DVec out(into_group_.size());
  for (std::size_t i = 0; i < into_group_.size(); ++i)
    out[i] = into_group_[i].eval(u);
  return out;
}

FieldForm::FieldForm(ChartPtr chart_, int degree_, GradedVectorSpace values_,
                     FormBasis basis_)
    : chart(std::move(chart_)),
      degree(degree_),
      values(std::move(values_)),
      basis(basis_) {
  auto rc = rumin_cache(chart->group());
  coeffs = Matrix<ScalarExpr>(rc->combs(degree).size(), values.dim);
}

bool FieldForm::structurally_zero() const {
  for (std::size_t r = 0; r < coeffs.rows(); ++r)
    for (std::size_t c = 0; c < coeffs.cols(); ++c)
      if (!coeffs(r, c).is_zero_constant()) return false;
  return true;
}

FieldForm FieldForm::component(int v) const {
  FieldForm out(chart, degree, GradedVectorSpace::scalar(), basis);
  for (std::size_t r = 0; r < coeffs.rows(); ++r) out.coeffs(r, 0) = coeffs(r, v);
  return out;
}

FieldForm FieldForm::operator+(const FieldForm& o) const {
  if (chart != o.chart || degree != o.degree || basis != o.basis ||
      !(values == o.values))
    throw Error(ErrorCode::AlgebraMismatch, "cannot add incompatible field forms");
  FieldForm out = *this;
  for (std::size_t r = 0; r < coeffs.rows(); ++r)
    for (std::size_t c = 0; c < coeffs.cols(); ++c)
      out.coeffs(r, c) = (coeffs(r, c) + o.coeffs(r, c)).simplified();
  return out;
}

FieldForm FieldForm::operator-(const FieldForm& o) const {
  if (chart != o.chart || degree != o.degree || basis != o.basis ||
      !(values == o.values))
    throw Error(ErrorCode::AlgebraMismatch,
                "cannot subtract incompatible field forms");
  FieldForm out = *this;
  for (std::size_t r = 0; r < coeffs.rows(); ++r)
    for (std::size_t c = 0; c < coeffs.cols(); ++c)
      out.coeffs(r, c) = (coeffs(r, c) - o.coeffs(r, c)).simplified();
  return out;
}

FieldForm FieldForm::scaled(const ScalarExpr& s) const {
  FieldForm out = *this;
  for (std::size_t r = 0; r < coeffs.rows(); ++r)
    for (std::size_t c = 0; c < coeffs.cols(); ++c)
      out.coeffs(r, c) = (s * coeffs(r, c)).simplified();
  return out;
}

FieldForm from_algebra_form(const AlgebraForm& form, const ChartPtr& chart) {
  if (*form.alg != *chart->group())
    throw Error(ErrorCode::AlgebraMismatch, "form and chart algebras differ");
  FieldForm out(chart, form.degree, form.values, FormBasis::Invariant);
  for (std::size_t r = 0; r < form.coeffs.rows(); ++r)
    for (int v = 0; v < form.values.dim; ++v)
      out.coeffs(r, v) = ScalarExpr::constant(form.coeffs(r, v));
  return out;
}

FieldForm to_basis(const FieldForm& form, FormBasis target) {
  if (form.basis == target) return form;
  auto rc = rumin_cache(form.chart->group());
  const auto& table = rc->combs(form.degree);
  const int k = form.degree;
  // Basis change matrix on 1-forms.
  const Matrix<ScalarExpr>& m = target == FormBasis::Coordinate
                                    ? form.chart->invariant_in_coords()
                                    : form.chart->coords_in_invariant();
  // For k-forms: out_I = sum_J in_J * minor(m; rows J, cols I).
  FieldForm out(form.chart, form.degree, form.values, target);
  for (int ri = 0; ri < table.size(); ++ri) {
    const auto& target_combo = table.combo(ri);
    for (int rj = 0; rj < table.size(); ++rj) {
      bool any = false;
      for (int v = 0; v < form.values.dim; ++v)
        if (!form.coeffs(rj, v).is_zero_constant()) any = true;
      if (!any) continue;
      ScalarExpr minor = sym_minor(m, table.combo(rj), target_combo);
      if (minor.is_zero_constant()) continue;
      for (int v = 0; v < form.values.dim; ++v)
        out.coeffs(ri, v) = out.coeffs(ri, v) + form.coeffs(rj, v) * minor;
    }
  }
  if (k == 0) out.coeffs = form.coeffs;
  simplify_all(out.coeffs);
  return out;
}

ScalarExpr frame_derivative(const AlgebraPtr& alg, const ScalarExpr& e, int i) {
  const auto& a = group_cache(alg)->frame_matrix();
  std::vector<ScalarExpr> terms;
  for (int m = 0; m < alg->dim(); ++m) {
    if (a(m, i).is_zero_constant()) continue;
    auto de = e.diff(m);
    if (de.is_zero_constant()) continue;
    terms.push_back(a(m, i) * de);
  }
  return ScalarExpr::add(std::move(terms));
}

FieldForm exterior_d(const FieldForm& form) {
  auto rc = rumin_cache(form.chart->group());
  const int n = form.chart->dim();
  if (form.basis == FormBasis::Coordinate) {
    const auto& src = rc->combs(form.degree);
    const auto& dst = rc->combs(form.degree + 1);
    FieldForm out(form.chart, form.degree + 1, form.values,
                  FormBasis::Coordinate);
    for (int r = 0; r < src.size(); ++r)
      for (int v = 0; v < form.values.dim; ++v) {
        const auto& c = form.coeffs(r, v);
        if (c.is_zero_constant()) continue;
        for (int m = 0; m < n; ++m) {
          auto dc = c.diff(m);
          if (dc.is_zero_constant()) continue;
          auto hit = dst.insert_sorted(m, src.combo(r));
          if (!hit) continue;
          auto term = hit->second > 0 ? dc : -dc;
          out.coeffs(hit->first, v) = out.coeffs(hit->first, v) + term;
        }
      }
    simplify_all(out.coeffs);
    return out;
  }
  if (!form.chart->trivial()) {
    // Compute in coordinates, return in the invariant basis.
    return to_basis(exterior_d(to_basis(form, FormBasis::Coordinate)),
                    FormBasis::Invariant);
  }
  // Trivial chart, invariant basis: frame derivatives + structure equations.
  const auto& alg = form.chart->group();
  const auto& src = rc->combs(form.degree);
  const auto& dst = rc->combs(form.degree + 1);
  const QMat& d0m = rc->d0_matrix(form.degree);
  FieldForm out(form.chart, form.degree + 1, form.values, FormBasis::Invariant);
  for (int r = 0; r < src.size(); ++r)
    for (int v = 0; v < form.values.dim; ++v) {
      const auto& c = form.coeffs(r, v);
      if (c.is_zero_constant()) continue;
      // d0(theta^I) term from the structure constants.
      for (std::size_t rd = 0; rd < d0m.rows(); ++rd)
        if (d0m(rd, r) != 0)
          out.coeffs(rd, v) =
              out.coeffs(rd, v) + ScalarExpr::constant(d0m(rd, r)) * c;
      // X_i(c) theta^i ^ theta^I terms.
      for (int i = 0; i < alg->dim(); ++i) {
        auto xc = frame_derivative(alg, c, i);
        if (xc.is_zero_constant()) continue;
        auto hit = dst.insert_sorted(i, src.combo(r));
        if (!hit) continue;
        auto term = hit->second > 0 ? xc : -xc;
        out.coeffs(hit->first, v) = out.coeffs(hit->first, v) + term;
      }
    }
  simplify_all(out.coeffs);
  return out;
}

namespace {
FieldForm apply_rational_matrix(const FieldForm& form, const QMat& m,
                                int out_degree) {
  if (form.basis != FormBasis::Invariant)
    throw Error(ErrorCode::InvalidArgument,
                "coframe-index operators need the invariant basis");
  FieldForm out(form.chart, out_degree, form.values, FormBasis::Invariant);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (int v = 0; v < form.values.dim; ++v) {
      std::vector<ScalarExpr> terms;
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0 && !form.coeffs(j, v).is_zero_constant())
          terms.push_back(ScalarExpr::constant(m(i, j)) * form.coeffs(j, v));
      out.coeffs(i, v) = ScalarExpr::add(std::move(terms)).simplified();
    }
  return out;
}
}  // namespace

FieldForm d0_field(const FieldForm& form) {
  auto rc = rumin_cache(form.chart->group());
  return apply_rational_matrix(form, rc->d0_matrix(form.degree),
                               form.degree + 1);
}

FieldForm d0_pinv_field(const FieldForm& form) {
  // d0^{-1} is the zero map on functions (nothing in degree -1): encode it
  // as the zero 0-form so operator compositions stay uniform.
  if (form.degree == 0)
    return FieldForm(form.chart, 0, form.values, FormBasis::Invariant);
  auto rc = rumin_cache(form.chart->group());
  return apply_rational_matrix(form, rc->d0_pinv_matrix(form.degree),
                               form.degree - 1);
}

FieldForm project_E0_field(const FieldForm& form) {
  auto rc = rumin_cache(form.chart->group());
  return apply_rational_matrix(form, rc->e0_projection(form.degree),
                               form.degree);
}

FieldForm project_E0_perp_field(const FieldForm& form) {
  auto rc = rumin_cache(form.chart->group());
  return apply_rational_matrix(form, rc->e0_perp_projection(form.degree),
                               form.degree);
}

namespace {
// D = d0^{-1} (d - d0); strictly weight-increasing.
FieldForm op_D(const FieldForm& form) {
  FieldForm diff = exterior_d(form) - d0_field(form);
  return d0_pinv_field(diff);
}

// P = sum_{k>=0} (-1)^k D^k; finite since D raises the coframe weight and
// weights are bounded by the homogeneous dimension.
FieldForm op_P(const FieldForm& form) {
  FieldForm acc = form;
  FieldForm power = form;
  const int bound = form.chart->group()->homogeneous_dimension() + 1;
  int sign = -1;
  for (int k = 1; k <= bound; ++k) {
    power = op_D(power);
    if (power.structurally_zero()) break;
    acc = sign > 0 ? acc + power : acc - power;
    sign = -sign;
  }
  return acc;
}
}  // namespace

FieldForm pi_E(const FieldForm& form) {
  // I - P d0^{-1} d - d P d0^{-1}
  FieldForm out = form - op_P(d0_pinv_field(exterior_d(form)));
  if (form.degree >= 1)
    out = out - exterior_d(op_P(d0_pinv_field(form)));
  return out;
}

RuminOps rumin_ops(const FieldForm& form) {
  RuminOps ops;
  ops.D = op_D(form);
  ops.P = op_P(form);
  ops.pi_E = pi_E(form);
  ops.pi_E0 = project_E0_field(form);
  FieldForm inner = project_E0_field(form);
  ops.d_c = project_E0_field(pi_E(exterior_d(inner)));
  return ops;
}

FieldForm rumin_d(const FieldForm& form) {
  FieldForm inner = project_E0_field(form);
  return project_E0_field(pi_E(exterior_d(inner)));
}

ScalarExpr field_inner(const FieldForm& a, const AlgebraForm& b) {
  if (a.basis != FormBasis::Invariant)
    throw Error(ErrorCode::InvalidArgument, "inner product needs invariant basis");
  if (*a.chart->group() != *b.alg || a.degree != b.degree)
    throw Error(ErrorCode::AlgebraMismatch, "incompatible forms");
  auto rc = rumin_cache(a.chart->group());
  const QMat& w = rc->form_gram(a.degree);
  QVec wb = w * b.coeffs.col(0);
  std::vector<ScalarExpr> terms;
  for (std::size_t i = 0; i < wb.size(); ++i)
    if (wb[i] != 0 && !a.coeffs(i, 0).is_zero_constant())
      terms.push_back(ScalarExpr::constant(wb[i]) * a.coeffs(i, 0));
  return ScalarExpr::add(std::move(terms));
}

FieldForm horizontal_part(const FieldForm& form) {
  if (form.degree != 1 || form.basis != FormBasis::Invariant)
    throw Error(ErrorCode::InvalidArgument,
                "horizontal_part expects invariant 1-forms");
  FieldForm out = form;
  const auto& alg = form.chart->group();
  for (int i = 0; i < alg->dim(); ++i)
    if (alg->layer_of(i) >= 2)
      for (int v = 0; v < form.values.dim; ++v) out.coeffs(i, v) = kZero;
  return out;
}

DMat eval_coeffs(const FieldForm& form, const DVec& u) {
  DMat out(form.coeffs.rows(), form.coeffs.cols());
  for (std::size_t r = 0; r < form.coeffs.rows(); ++r)
    for (std::size_t c = 0; c < form.coeffs.cols(); ++c)
      out(r, c) = form.coeffs(r, c).eval(u);
  return out;
}

DVec eval_one_form(const FieldForm& form, const DVec& x, const DVec& velocity) {
  if (form.degree != 1 || form.basis != FormBasis::Invariant ||
      !form.chart->trivial())
    throw Error(ErrorCode::InvalidArgument,
                "eval_one_form expects an invariant 1-form on the trivial chart");
  auto geo = group_cache(form.chart->group());
  DVec triv = geo->left_trivialize(x, velocity);
  DVec out(form.values.dim, 0.0);
  for (int v = 0; v < form.values.dim; ++v)
    for (std::size_t i = 0; i < triv.size(); ++i) {
      if (form.coeffs(i, v).is_zero_constant()) continue;
      out[v] += form.coeffs(i, v).eval(x) * triv[i];
    }
  return out;
}

FieldIdentityResult field_is_zero(const FieldForm& a, unsigned long long seed,
                                  int samples, double tol) {
  FieldIdentityResult out;
  out.verdict = TestVerdict::Equal;
  out.exact = true;
  const SampleBox& box = a.chart->domain();
  for (std::size_t r = 0; r < a.coeffs.rows(); ++r)
    for (std::size_t c = 0; c < a.coeffs.cols(); ++c) {
      auto res = expr_is_zero(a.coeffs(r, c), box, seed, samples, tol);
      out.max_abs = std::max(out.max_abs, res.max_abs);
      if (res.verdict == TestVerdict::NotEqual) {
        out.verdict = TestVerdict::NotEqual;
        out.exact = res.exact;
        out.witness = res.witness;
        return out;
      }
      if (res.verdict == TestVerdict::Unknown) out.verdict = TestVerdict::Unknown;
      if (!res.exact) out.exact = false;
    }
  return out;
}

FieldIdentityResult identity_test(const FieldForm& a, const FieldForm& b,
                                  unsigned long long seed, int samples,
                                  double tol) {
  FieldForm bb = b.basis == a.basis ? b : to_basis(b, a.basis);
  return field_is_zero(a - bb, seed, samples, tol);
}

FieldForm cocycle_potential(const AlgebraPtr& base, const AlgebraForm& rho) {
  if (*rho.alg != *base || rho.degree != 2)
    throw Error(ErrorCode::InvalidArgument,
                "cocycle_potential expects a degree-2 form on the base");
  const int n = base->dim();
  auto chart = Chart::exponential(base, SampleBox{});
  FieldForm alpha(chart, 1, rho.values, FormBasis::Invariant);
  // x = sum x_i e_i symbolically
  std::vector<ScalarExpr> x;
  for (int i = 0; i < n; ++i) x.push_back(ScalarExpr::variable(i));
  auto rc = rumin_cache(base);
  const auto& pair_table = rc->combs(2);
  for (int j = 0; j < n; ++j) {
    // w = zeta(ad x) e_j truncated by nilpotency
    std::vector<ScalarExpr> w(n, kZero);
    std::vector<ScalarExpr> power(n, kZero);
    power[j] = kOne;
    for (int k = 0; k + 1 <= base->step(); ++k) {
      const Rational c = bernoulli_over_factorial(k + 1);
      if (c != 0)
        for (int i = 0; i < n; ++i)
          if (!power[i].is_zero_constant())
            w[i] = w[i] + ScalarExpr::constant(c) * power[i];
      // power = [x, power]
      std::vector<ScalarExpr> next(n, kZero);
      for (int a = 0; a < n; ++a) {
        if (x[a].is_zero_constant()) continue;
        for (int bidx = 0; bidx < n; ++bidx) {
          if (power[bidx].is_zero_constant()) continue;
          const QVec& br = base->basis_bracket(a, bidx);
          for (int i = 0; i < n; ++i)
            if (br[i] != 0)
              next[i] = next[i] +
                        ScalarExpr::constant(br[i]) * x[a] * power[bidx];
        }
      }
      power = next;
    }
    // alpha_j = rho(x, w) componentwise in V
    for (int v = 0; v < rho.values.dim; ++v) {
      std::vector<ScalarExpr> terms;
      for (int r = 0; r < pair_table.size(); ++r) {
        const Rational c = rho.coeffs(r, v);
        if (c == 0) continue;
        const auto& combo = pair_table.combo(r);
        const int a = combo[0], bidx = combo[1];
        // theta^a ^ theta^b (x, w) = x_a w_b - x_b w_a
        terms.push_back(ScalarExpr::constant(c) *
                        (x[a] * w[bidx] - x[bidx] * w[a]));
      }
      alpha.coeffs(j, v) = ScalarExpr::add(std::move(terms)).simplified();
    }
  }
  return alpha;
}

}  // namespace carnot


#include "carnot/contact_maps.hpp"

#include <algorithm>

#include "carnot/group.hpp"

namespace carnot {

namespace {

Matrix<ScalarExpr> substitute_matrix(const Matrix<ScalarExpr>& m,
                                     const std::vector<ScalarExpr>& args) {
  Matrix<ScalarExpr> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = m(i, j).substitute(args).simplified();
  return out;
}

Matrix<ScalarExpr> sym_mat_mul(const Matrix<ScalarExpr>& a,
                               const Matrix<ScalarExpr>& b) {
  Matrix<ScalarExpr> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      std::vector<ScalarExpr> terms;
      for (std::size_t l = 0; l < a.cols(); ++l)
        if (!a(i, l).is_zero_constant() && !b(l, j).is_zero_constant())
          terms.push_back(a(i, l) * b(l, j));
      out(i, j) = ScalarExpr::add(std::move(terms)).simplified();
    }
  return out;
}

// Determinant and adjugate by Laplace expansion (chart dimensions are small).
ScalarExpr sym_det_cols(const Matrix<ScalarExpr>& m, std::vector<int> rows,
                        std::vector<int> cols) {
  if (rows.empty()) return ScalarExpr::constant(Rational(1));
  std::vector<ScalarExpr> terms;
  const int r0 = rows[0];
  std::vector<int> rest_rows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (m(r0, cols[c]).is_zero_constant()) continue;
    std::vector<int> rest_cols;
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (i != c) rest_cols.push_back(cols[i]);
    ScalarExpr term = m(r0, cols[c]) * sym_det_cols(m, rest_rows, rest_cols);
    if (c % 2 == 1) term = -term;
    terms.push_back(term);
  }
  return ScalarExpr::add(std::move(terms));
}

ScalarExpr sym_det(const Matrix<ScalarExpr>& m) {
  std::vector<int> idx(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) idx[i] = static_cast<int>(i);
  return sym_det_cols(m, idx, idx).simplified();
}

Matrix<ScalarExpr> sym_adjugate(const Matrix<ScalarExpr>& m) {
  const int n = static_cast<int>(m.rows());
  Matrix<ScalarExpr> adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int r = 0; r < n; ++r)
        if (r != j) rows.push_back(r);
      for (int c = 0; c < n; ++c)
        if (c != i) cols.push_back(c);
      ScalarExpr cof = sym_det_cols(m, rows, cols).simplified();
      if ((i + j) % 2 == 1) cof = -cof;
      adj(i, j) = cof;
    }
  return adj;
}

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

GroupMap GroupMap::on_exponential(AlgebraPtr source, AlgebraPtr target,
                                  std::vector<ScalarExpr> components,
                                  SampleBox domain, bool simply_connected,
                                  std::string excluded) {
  GroupMap map;
  map.chart = Chart::exponential(source, std::move(domain));
  map.source = std::move(source);
  map.target = std::move(target);
  map.components = std::move(components);
  map.simply_connected = simply_connected;
  map.excluded = std::move(excluded);
  if (static_cast<int>(map.components.size()) != map.target->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "map needs one component per target coordinate");
  return map;
}

GroupMap GroupMap::on_chart(ChartPtr source_chart, AlgebraPtr target,
                            std::vector<ScalarExpr> components,
                            bool simply_connected, std::string excluded) {
  GroupMap map;
  map.source = source_chart->group();
  map.chart = std::move(source_chart);
  map.target = std::move(target);
  map.components = std::move(components);
  map.simply_connected = simply_connected;
  map.excluded = std::move(excluded);
  if (static_cast<int>(map.components.size()) != map.target->dim())
    throw Error(ErrorCode::DimensionMismatch,
                "map needs one component per target coordinate");
  return map;
}

GroupMap GroupMap::identity(const AlgebraPtr& alg, SampleBox domain) {
  std::vector<ScalarExpr> comps;
  for (int i = 0; i < alg->dim(); ++i) comps.push_back(ScalarExpr::variable(i));
  return on_exponential(alg, alg, std::move(comps), std::move(domain), true);
}

GroupMap GroupMap::linear(AlgebraPtr source, AlgebraPtr target, const QMat& m,
                          SampleBox domain, bool simply_connected) {
  if (static_cast<int>(m.rows()) != target->dim() ||
      static_cast<int>(m.cols()) != source->dim())
    throw Error(ErrorCode::DimensionMismatch, "linear map has wrong shape");
  std::vector<ScalarExpr> comps;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<ScalarExpr> terms;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0)
        terms.push_back(ScalarExpr::constant(m(i, j)) *
                        ScalarExpr::variable(static_cast<int>(j)));
    comps.push_back(ScalarExpr::add(std::move(terms)));
  }
  return on_exponential(std::move(source), std::move(target), std::move(comps),
                        std::move(domain), simply_connected);
}

DVec GroupMap::eval(const DVec& u) const {
  DVec out(components.size());
  for (std::size_t i = 0; i < components.size(); ++i)
    out[i] = components[i].eval(u);
  return out;
}

const Matrix<ScalarExpr>& GroupMap::jacobian() const {
  if (jacobian_) return *jacobian_;
  const int rows = static_cast<int>(components.size());
  const int cols = source->dim();
  Matrix<ScalarExpr> j(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int m = 0; m < cols; ++m) j(i, m) = components[i].diff(m).simplified();
  jacobian_ = std::move(j);
  return *jacobian_;
}

GroupMap GroupMap::project_through(const CentralExtension& ext) const {
  if (*target != *ext.derived)
    throw Error(ErrorCode::AlgebraMismatch,
                "projection is over a different group");
  GroupMap out = *this;
  out.target = ext.base;
  out.components.clear();
  for (std::size_t i = 0; i < ext.projection.rows(); ++i) {
    std::vector<ScalarExpr> terms;
    for (std::size_t j = 0; j < ext.projection.cols(); ++j)
      if (ext.projection(i, j) != 0)
        terms.push_back(ScalarExpr::constant(ext.projection(i, j)) *
                        components[j]);
    out.components.push_back(ScalarExpr::add(std::move(terms)));
  }
  out.jacobian_.reset();
  return out;
}

DMat left_trivialized_differential(const GroupMap& map, const DVec& u) {
  auto geo_t = group_cache(map.target);
  auto geo_s = group_cache(map.source);
  DVec y = map.eval(u);
  DMat theta_t = geo_t->coframe_at(y);
  const auto& jac = map.jacobian();
  DMat jg(jac.rows(), jac.cols());
  for (std::size_t i = 0; i < jac.rows(); ++i)
    for (std::size_t j = 0; j < jac.cols(); ++j) jg(i, j) = jac(i, j).eval(u);
  DVec x = map.chart->to_group(u);
  DMat frame_s = geo_s->frame_at(x);
  if (map.chart->trivial()) return theta_t * jg * frame_s;
  const auto& cj = map.chart->jacobian();
  DMat jpsi(cj.rows(), cj.cols());
  for (std::size_t i = 0; i < cj.rows(); ++i)
    for (std::size_t j = 0; j < cj.cols(); ++j) jpsi(i, j) = cj(i, j).eval(u);
  auto inv = jpsi.inverse();
  if (!inv)
    throw Error(ErrorCode::SingularPoint, "chart jacobian is singular here");
  return theta_t * jg * *inv * frame_s;
}

ScaledDifferential scaled_left_trivialized_differential(const GroupMap& map) {
  auto geo_t = group_cache(map.target);
  auto geo_s = group_cache(map.source);
  // Theta_T(f(u)) and A_S(chart(u)) composed symbolically.
  Matrix<ScalarExpr> theta_t =
      substitute_matrix(geo_t->coframe_matrix(), map.components);
  Matrix<ScalarExpr> frame_s = substitute_matrix(
      geo_s->frame_matrix(), map.chart->into_group());
  ScaledDifferential out;
  if (map.chart->trivial()) {
    out.scaled = sym_mat_mul(sym_mat_mul(theta_t, map.jacobian()), frame_s);
    out.det = ScalarExpr::constant(Rational(1));
    return out;
  }
  const auto& jpsi = map.chart->jacobian();
  out.det = sym_det(jpsi);
  out.scaled = sym_mat_mul(
      sym_mat_mul(sym_mat_mul(theta_t, map.jacobian()), sym_adjugate(jpsi)),
      frame_s);
  return out;
}

ContactResult is_contact(const GroupMap& map, unsigned long long seed,
                         int samples, double tol) {
  ScaledDifferential sd = scaled_left_trivialized_differential(map);
  ContactResult out;
  out.verdict = ContactVerdict::Contact;
  out.exact = true;
  const SampleBox& box = map.chart->domain();
  for (int b = 0; b < map.target->dim(); ++b) {
    if (map.target->layer_of(b) == 1) continue;
    for (int a = 0; a < map.source->dim(); ++a) {
      if (map.source->layer_of(a) != 1) continue;
      auto res = expr_is_zero(sd.scaled(b, a), box, seed, samples, tol);
      if (res.verdict == TestVerdict::NotEqual) {
        out.verdict = ContactVerdict::NotContact;
        out.exact = res.exact;
        out.witness = res.witness;
        return out;
      }
      if (res.verdict == TestVerdict::Unknown || !res.exact) {
        out.exact = false;
        out.verdict = ContactVerdict::ProbablyContact;
      }
    }
  }
  return out;
}

PansuDifferential pansu_differential(const GroupMap& map, const DVec& u,
                                     double tol) {
  DMat b = left_trivialized_differential(map, u);
  PansuDifferential out;
  out.matrix = DMat(map.target->dim(), map.source->dim());
  // Contact check at the point: vertical rows against horizontal columns.
  for (int row = 0; row < map.target->dim(); ++row)
    for (int col = 0; col < map.source->dim(); ++col) {
      if (map.source->layer_of(col) != 1) continue;
      if (map.target->layer_of(row) == 1) {
        out.matrix(row, col) = b(row, col);
      } else if (std::abs(b(row, col)) > tol) {
        out.consistent = false;
        out.max_residual = std::max(out.max_residual, std::abs(b(row, col)));
      }
    }
  if (!out.consistent) return out;
  // Extend to higher layers by bracket presentations.
  auto pres = map.source->bracket_presentations();
  if (!pres)
    throw Error(ErrorCode::NotStratified,
                "source algebra is not stratified-onto");
  for (int layer = 2; layer <= map.source->step(); ++layer)
    for (int c = 0; c < map.source->dim(); ++c) {
      if (map.source->layer_of(c) != layer) continue;
      DVec value(map.target->dim(), 0.0);
      for (const auto& term : (*pres)[c].terms) {
        DVec bracket = map.target->bracket_d(out.matrix.col(term.a),
                                             out.matrix.col(term.b));
        for (int i = 0; i < map.target->dim(); ++i)
          value[i] += to_double(term.coeff) * bracket[i];
      }
      for (int i = 0; i < map.target->dim(); ++i) out.matrix(i, c) = value[i];
    }
  // Verify the homomorphism property on all basis pairs.
  for (int j = 0; j < map.source->dim(); ++j)
    for (int k = j + 1; k < map.source->dim(); ++k) {
      const QVec& br = map.source->basis_bracket(j, k);
      DVec lhs(map.target->dim(), 0.0);
      for (int i = 0; i < map.source->dim(); ++i)
        if (br[i] != 0)
          for (int t = 0; t < map.target->dim(); ++t)
            lhs[t] += to_double(br[i]) * out.matrix(t, i);
      DVec rhs =
          map.target->bracket_d(out.matrix.col(j), out.matrix.col(k));
      for (int t = 0; t < map.target->dim(); ++t)
        out.max_residual =
            std::max(out.max_residual, std::abs(lhs[t] - rhs[t]));
    }
  double scale = 1.0;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      scale = std::max(scale, std::abs(b(i, j)));
  if (out.max_residual > tol * scale * scale) out.consistent = false;
  return out;
}

DVec pansu_differential_limit(const GroupMap& map, const DVec& u,
                              const DVec& v, double lambda) {
  if (!map.chart->trivial())
    throw Error(ErrorCode::InvalidArgument,
                "the dilation-limit oracle needs a trivial chart");
  auto geo_s = group_cache(map.source);
  auto geo_t = group_cache(map.target);
  DVec moved = geo_s->bch(u, dilate_point(*map.source, lambda, v));
  DVec fu = map.eval(u), fm = map.eval(moved);
  DVec diff = geo_t->bch(geo_t->inverse(fu), fm);
  return dilate_point(*map.target, 1.0 / lambda, diff);
}

Matrix<ScalarExpr> pansu_differential_symbolic(const GroupMap& map) {
  ScaledDifferential sd = scaled_left_trivialized_differential(map);
  ScalarExpr det_inv = ScalarExpr::pow(sd.det, -1);
  const int nt = map.target->dim(), ns = map.source->dim();
  Matrix<ScalarExpr> out(nt, ns);
  // Horizontal block (the map must be contact for this to be the Pansu
  // differential: vertical rows over horizontal columns vanish).
  for (int col = 0; col < ns; ++col) {
    if (map.source->layer_of(col) != 1) continue;
    for (int row = 0; row < nt; ++row) {
      if (map.target->layer_of(row) != 1) continue;
      out(row, col) = (det_inv * sd.scaled(row, col));
      if (map.chart->trivial()) out(row, col) = out(row, col).simplified();
    }
  }
  auto pres = map.source->bracket_presentations();
  if (!pres)
    throw Error(ErrorCode::NotStratified,
                "source algebra is not stratified-onto");
  for (int layer = 2; layer <= map.source->step(); ++layer)
    for (int c = 0; c < ns; ++c) {
      if (map.source->layer_of(c) != layer) continue;
      std::vector<ScalarExpr> value(nt, ScalarExpr::constant(Rational(0)));
      for (const auto& term : (*pres)[c].terms) {
        std::vector<ScalarExpr> va(nt), vb(nt);
        for (int i = 0; i < nt; ++i) {
          va[i] = out(i, term.a);
          vb[i] = out(i, term.b);
        }
        auto bracket = bracket_expr(*map.target, va, vb);
        for (int i = 0; i < nt; ++i)
          value[i] =
              value[i] + ScalarExpr::constant(term.coeff) * bracket[i];
      }
      for (int i = 0; i < nt; ++i) out(i, c) = value[i].simplified();
    }
  return out;
}

namespace {
// Coefficients on du^I of sum_J b_J(u) * minor(C; J, I) for symbolic C.
FieldForm assemble_pullback(const ChartPtr& chart, const AlgebraPtr& target,
                            const Matrix<ScalarExpr>& c, int degree,
                            const GradedVectorSpace& values,
                            const std::vector<std::vector<ScalarExpr>>& b) {
  auto rc_s = rumin_cache(chart->group());
  auto rc_t = rumin_cache(target);
  const auto& table_s = rc_s->combs(degree);
  const auto& table_t = rc_t->combs(degree);
  FieldForm out(chart, degree, values, FormBasis::Coordinate);
  for (int ri = 0; ri < table_s.size(); ++ri) {
    const auto& icombo = table_s.combo(ri);
    for (int rj = 0; rj < table_t.size(); ++rj) {
      bool any = false;
      for (int v = 0; v < values.dim; ++v)
        if (!b[rj][v].is_zero_constant()) any = true;
      if (!any) continue;
      // minor of C with rows = target combo, cols = source combo
      Matrix<ScalarExpr> sub(degree, degree);
      const auto& jcombo = table_t.combo(rj);
      for (int a = 0; a < degree; ++a)
        for (int bb = 0; bb < degree; ++bb)
          sub(a, bb) = c(jcombo[a], icombo[bb]);
      ScalarExpr minor =
          degree == 0 ? ScalarExpr::constant(Rational(1)) : [&] {
            std::vector<int> idx(degree);
            for (int i = 0; i < degree; ++i) idx[i] = i;
            return sym_det_cols(sub, idx, idx);
          }();
      if (minor.is_zero_constant()) continue;
      for (int v = 0; v < values.dim; ++v)
        if (!b[rj][v].is_zero_constant())
          out.coeffs(ri, v) = out.coeffs(ri, v) + b[rj][v] * minor;
    }
  }
  for (std::size_t r = 0; r < out.coeffs.rows(); ++r)
    for (std::size_t v = 0; v < out.coeffs.cols(); ++v)
      out.coeffs(r, v) = out.coeffs(r, v).simplified();
  return out;
}
}  // namespace

FieldForm pansu_pullback(const GroupMap& map, const AlgebraForm& tau) {
  if (*tau.alg != *map.target)
    throw Error(ErrorCode::AlgebraMismatch, "form is not on the target group");
  Matrix<ScalarExpr> dp = pansu_differential_symbolic(map);
  // C = D_P * M_S: target frame components of D_P(chart frame vectors).
  Matrix<ScalarExpr> c = sym_mat_mul(dp, map.chart->invariant_in_coords());
  std::vector<std::vector<ScalarExpr>> b;
  auto rc_t = rumin_cache(map.target);
  const auto& table_t = rc_t->combs(tau.degree);
  for (int rj = 0; rj < table_t.size(); ++rj) {
    std::vector<ScalarExpr> row;
    for (int v = 0; v < tau.values.dim; ++v)
      row.push_back(ScalarExpr::constant(tau.coeffs(rj, v)));
    b.push_back(std::move(row));
  }
  return assemble_pullback(map.chart, map.target, c, tau.degree, tau.values, b);
}

FieldForm pullback(const GroupMap& map, const FieldForm& omega) {
  if (*omega.chart->group() != *map.target)
    throw Error(ErrorCode::AlgebraMismatch, "form is not on the target group");
  if (!omega.chart->trivial())
    throw Error(ErrorCode::InvalidArgument,
                "pullback source forms must live on the trivial target chart");
  FieldForm inv = omega.basis == FormBasis::Invariant
                      ? omega
                      : to_basis(omega, FormBasis::Invariant);
  // M_pull = Theta_T(f(u)) * J_f(u): rows = f^* theta_T^j in du.
  auto geo_t = group_cache(map.target);
  Matrix<ScalarExpr> theta_t =
      substitute_matrix(geo_t->coframe_matrix(), map.components);
  Matrix<ScalarExpr> m_pull = sym_mat_mul(theta_t, map.jacobian());
  std::vector<std::vector<ScalarExpr>> b;
  auto rc_t = rumin_cache(map.target);
  const auto& table_t = rc_t->combs(omega.degree);
  for (int rj = 0; rj < table_t.size(); ++rj) {
    std::vector<ScalarExpr> row;
    for (int v = 0; v < omega.values.dim; ++v)
      row.push_back(
          inv.coeffs(rj, v).substitute(map.components).simplified());
    b.push_back(std::move(row));
  }
  return assemble_pullback(map.chart, map.target, m_pull, omega.degree,
                           omega.values, b);
}

FieldForm pullback(const GroupMap& map, const AlgebraForm& omega) {
  auto chart = Chart::exponential(map.target, SampleBox{});
  return pullback(map, from_algebra_form(omega, chart));
}

}  // namespace carnot


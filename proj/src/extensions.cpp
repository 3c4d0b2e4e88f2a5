#include "carnot/extensions.hpp"

#include <algorithm>

namespace carnot {

Cocycle Cocycle::make(AlgebraPtr base_, GradedVectorSpace values_,
                      AlgebraForm form_) {
  if (*form_.alg != *base_)
    throw Error(ErrorCode::AlgebraMismatch, "cocycle form is not over the base");
  if (form_.degree != 2)
    throw Error(ErrorCode::InvalidArgument, "cocycles have degree 2");
  if (!(form_.values == values_))
    throw Error(ErrorCode::AlgebraMismatch,
                "cocycle values do not match the declared space");
  return Cocycle{std::move(base_), std::move(values_), std::move(form_)};
}

QVec CentralExtension::v_part(const QVec& g) const {
  QVec out(dim_v(), Rational(0));
  for (int v = 0; v < dim_v(); ++v)
    for (std::size_t i = 0; i < inclusion.rows(); ++i)
      if (inclusion(i, v) != 0) out[v] += inclusion(i, v) * g[i];
  return out;
}

DVec CentralExtension::v_part(const DVec& g) const {
  DVec out(dim_v(), 0.0);
  for (int v = 0; v < dim_v(); ++v)
    for (std::size_t i = 0; i < inclusion.rows(); ++i)
      if (inclusion(i, v) != 0) out[v] += to_double(inclusion(i, v)) * g[i];
  return out;
}

QVec CentralExtension::h_part(const QVec& g) const { return projection * g; }

DVec CentralExtension::h_part(const DVec& g) const {
  DVec out(projection.rows(), 0.0);
  for (std::size_t i = 0; i < projection.rows(); ++i)
    for (std::size_t j = 0; j < projection.cols(); ++j)
      if (projection(i, j) != 0) out[i] += to_double(projection(i, j)) * g[j];
  return out;
}

QVec CentralExtension::assemble(const QVec& h, const QVec& v) const {
  QVec out(derived->dim(), Rational(0));
  for (std::size_t j = 0; j < section.cols(); ++j)
    for (std::size_t i = 0; i < section.rows(); ++i)
      if (section(i, j) != 0) out[i] += section(i, j) * h[j];
  for (std::size_t j = 0; j < inclusion.cols(); ++j)
    for (std::size_t i = 0; i < inclusion.rows(); ++i)
      if (inclusion(i, j) != 0) out[i] += inclusion(i, j) * v[j];
  return out;
}

DVec CentralExtension::assemble(const DVec& h, const DVec& v) const {
  DVec out(derived->dim(), 0.0);
  for (std::size_t j = 0; j < section.cols(); ++j)
    for (std::size_t i = 0; i < section.rows(); ++i)
      if (section(i, j) != 0) out[i] += to_double(section(i, j)) * h[j];
  for (std::size_t j = 0; j < inclusion.cols(); ++j)
    for (std::size_t i = 0; i < inclusion.rows(); ++i)
      if (inclusion(i, j) != 0) out[i] += to_double(inclusion(i, j)) * v[j];
  return out;
}

CentralExtension extend(const AlgebraPtr& base, const Cocycle& rho) {
  if (!validate_stratified(*base).ok())
    throw Error(ErrorCode::NotStratified, "base algebra is not stratified");
  if (!cocycle_check(rho.form))
    throw Error(ErrorCode::NotClosed, "d0 rho != 0: not a cocycle");
  auto rc = rumin_cache(base);
  const auto& pairs = rc->combs(2);
  // Grading compatibility: rho(h^[i], h^[j]) subset V^[i+j].
  for (int r = 0; r < pairs.size(); ++r) {
    const auto& combo = pairs.combo(r);
    const int w = base->layer_of(combo[0]) + base->layer_of(combo[1]);
    for (int v = 0; v < rho.values.dim; ++v)
      if (rho.form.coeffs(r, v) != 0 && rho.values.layers[v] != w)
        throw Error(ErrorCode::GradingIncompatible,
                    "cocycle is not compatible with the gradings");
  }

  const int nh = base->dim(), nv = rho.values.dim;
  const int ng = nh + nv;
  const int step =
      std::max(base->step(), rho.values.dim ? rho.values.max_layer() : 1);
  // Interleave layer-major: H layer k vectors first, then V layer k vectors.
  std::vector<int> h_to_g(nh, -1), v_to_g(nv, -1);
  std::vector<std::string> names;
  std::vector<int> layers;
  for (int k = 1; k <= step; ++k) {
    for (int i = 0; i < nh; ++i)
      if (base->layer_of(i) == k) {
        h_to_g[i] = static_cast<int>(names.size());
        names.push_back(base->names()[i]);
        layers.push_back(k);
      }
    for (int v = 0; v < nv; ++v)
      if (rho.values.layers[v] == k) {
        v_to_g[v] = static_cast<int>(names.size());
        names.push_back(rho.values.names[v]);
        layers.push_back(k);
      }
  }
  // Brackets: [X+A, Y+B] = [X,Y]_H + rho(X,Y).
  std::vector<StratifiedAlgebra::BracketEntry> brackets;
  for (int j = 0; j < nh; ++j)
    for (int k = j + 1; k < nh; ++k) {
      std::map<int, Rational> coeffs;
      const QVec& br = base->basis_bracket(j, k);
      for (int i = 0; i < nh; ++i)
        if (br[i] != 0) coeffs[h_to_g[i]] = br[i];
      const int pr = pairs.rank({j, k});
      for (int v = 0; v < nv; ++v)
        if (rho.form.coeffs(pr, v) != 0)
          coeffs[v_to_g[v]] = rho.form.coeffs(pr, v);
      if (!coeffs.empty()) {
        int gj = h_to_g[j], gk = h_to_g[k];
        if (gj < gk) {
          brackets.push_back({gj, gk, coeffs});
        } else {
          for (auto& [i, c] : coeffs) c = -c;
          brackets.push_back({gk, gj, coeffs});
        }
      }
    }
  // Gram: direct sum.
  QMat gram(ng, ng);
  for (int i = 0; i < nh; ++i)
    for (int j = 0; j < nh; ++j) gram(h_to_g[i], h_to_g[j]) = base->gram()(i, j);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      gram(v_to_g[i], v_to_g[j]) = rho.values.gram(i, j);

  CentralExtension ext;
  ext.cocycle = rho;
  ext.base = base;
  ext.derived =
      std::make_shared<StratifiedAlgebra>(names, layers, brackets, gram);
  ext.inclusion = QMat(ng, nv);
  for (int v = 0; v < nv; ++v) ext.inclusion(v_to_g[v], v) = 1;
  ext.projection = QMat(nh, ng);
  for (int i = 0; i < nh; ++i) ext.projection(i, h_to_g[i]) = 1;
  ext.section = QMat(ng, nh);
  for (int i = 0; i < nh; ++i) ext.section(h_to_g[i], i) = 1;

  ext.report = validate_stratified(*ext.derived);
  ext.carnot = true;
  for (const auto& issue : ext.report.issues)
    if (issue.clause == "stratification") ext.carnot = false;
  // Any non-stratification issue in the derived algebra is a real error.
  for (const auto& issue : ext.report.issues)
    if (issue.clause != "stratification")
      throw Error(ErrorCode::InvalidArgument,
                  "derived algebra invalid: " + issue.message);
  return ext;
}

CentralExtension extend_scalar(const AlgebraPtr& base, const AlgebraForm& rho,
                               int value_layer, const std::string& name) {
  GradedVectorSpace v({name}, {value_layer});
  AlgebraForm vform(base, 2, v);
  for (std::size_t r = 0; r < rho.coeffs.rows(); ++r)
    vform.coeffs(r, 0) = rho.coeffs(r, 0);
  return extend(base, Cocycle::make(base, v, vform));
}

namespace {
// Pullback of a V-valued left-invariant 2-form along a linear map given by
// the matrix l (columns = images of the source basis).
AlgebraForm linear_pullback_2form(const AlgebraPtr& source, const QMat& l,
                                  const AlgebraForm& rho) {
  AlgebraForm out(source, 2, rho.values);
  auto rc = rumin_cache(source);
  const auto& pairs = rc->combs(2);
  for (int r = 0; r < pairs.size(); ++r) {
    const auto& combo = pairs.combo(r);
    QVec values = rho.evaluate({l.col(combo[0]), l.col(combo[1])});
    for (int v = 0; v < rho.values.dim; ++v) out.coeffs(r, v) = values[v];
  }
  return out;
}

bool is_bracket_homomorphism(const StratifiedAlgebra& src,
                             const StratifiedAlgebra& dst, const QMat& m) {
  for (int j = 0; j < src.dim(); ++j)
    for (int k = j + 1; k < src.dim(); ++k) {
      QVec lhs = m * src.basis_bracket(j, k);
      QVec rhs = dst.bracket(m.col(j), m.col(k));
      if (!(lhs == rhs)) return false;
    }
  return true;
}
}  // namespace

std::optional<HomLift> homomorphism_lift(const CentralExtension& ext1,
                                         const CentralExtension& ext2,
                                         const QMat& l, const QMat& phi) {
  const auto& h1 = ext1.base;
  const auto& h2 = ext2.base;
  if (!is_bracket_homomorphism(*h1, *h2, l))
    throw Error(ErrorCode::NotHomomorphism,
                "L is not a Lie algebra homomorphism");
  const int nv1 = ext1.dim_v(), nv2 = ext2.dim_v();
  if (static_cast<int>(phi.rows()) != nv2 ||
      static_cast<int>(phi.cols()) != nv1)
    throw Error(ErrorCode::DimensionMismatch, "phi has wrong dimensions");

  // rhs = phi o rho1 - L^* rho2, componentwise over V2.
  AlgebraForm pullback2 = linear_pullback_2form(h1, l, ext2.cocycle.form);
  auto rc = rumin_cache(h1);
  const int npairs = rc->combs(2).size();
  QMat mu(nv2, h1->dim());
  for (int b = 0; b < nv2; ++b) {
    AlgebraForm rhs(h1, 2);
    for (int r = 0; r < npairs; ++r) {
      Rational acc(0);
      for (int j = 0; j < nv1; ++j)
        if (phi(b, j) != 0) acc += phi(b, j) * ext1.cocycle.form.coeffs(r, j);
      rhs.coeffs(r, 0) = acc - pullback2.coeffs(r, b);
    }
    AlgebraForm mu_b = d0_pseudoinverse(rhs);
    if (!(d0(mu_b) == rhs)) return std::nullopt;  // cohomology obstruction
    for (int i = 0; i < h1->dim(); ++i) mu(b, i) = mu_b.coeffs(i, 0);
  }

  HomLift lift;
  lift.mu = mu;
  // psi = sigma2 L pi1 + iota2 (mu pi1 + phi iota1^T)
  QMat iota1_t = ext1.inclusion.transposed();
  lift.psi = ext2.section * l * ext1.projection +
             ext2.inclusion * (mu * ext1.projection + phi * iota1_t);
  if (!is_bracket_homomorphism(*ext1.derived, *ext2.derived, lift.psi))
    throw Error(ErrorCode::InvalidArgument,
                "internal error: assembled lift is not a homomorphism");
  int v2_horizontal = 0;
  for (int v = 0; v < nv2; ++v)
    if (ext2.cocycle.values.layers[v] == 1) ++v2_horizontal;
  lift.graded_ambiguity_dim = h1->rank() * v2_horizontal;
  return lift;
}

NormalizedCocycle normalize_cocycle(const CentralExtension& ext) {
  const auto& rho = ext.cocycle.form;
  const int m = ext.dim_v();
  const auto& base = ext.base;
  // q^j = pi_E0 rho^j, mu^j = d0^{-1} rho^j, so rho^j = q^j + d0 mu^j.
  std::vector<AlgebraForm> q, mu;
  for (int j = 0; j < m; ++j) {
    AlgebraForm comp = rho.component(j);
    q.push_back(project_E0(comp));
    mu.push_back(d0_pseudoinverse(comp));
  }
  // Layer-blocked Gram-Schmidt without normalization. T is unit
  // triangular within each value layer, hence invertible and graded.
  QMat t = QMat::identity(m);
  std::vector<AlgebraForm> tilde = q;
  for (int j = 0; j < m; ++j) {
    for (int a = 0; a < j; ++a) {
      if (ext.cocycle.values.layers[a] != ext.cocycle.values.layers[j])
        continue;
      Rational den = form_inner(tilde[a], tilde[a]);
      if (den == 0) continue;
      Rational num = form_inner(q[j], tilde[a]);
      if (num == 0) continue;
      const Rational f = num / den;
      tilde[j] = tilde[j] - tilde[a] * f;
      for (int c = 0; c < m; ++c) t(j, c) -= f * t(a, c);
    }
  }
  // Certificate: rho~^j = sum_a T_{ja} q^a = sum_a T_{ja} rho^a - d0 omega^j
  // with omega^j = sum_a T_{ja} mu^a.
  AlgebraForm tilde_form(base, 2, ext.cocycle.values);
  AlgebraForm omega(base, 1, ext.cocycle.values);
  for (int j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < tilde_form.coeffs.rows(); ++r)
      tilde_form.coeffs(r, j) = tilde[j].coeffs(r, 0);
    AlgebraForm omega_j(base, 1);
    for (int a = 0; a < m; ++a)
      if (t(j, a) != 0) omega_j = omega_j + mu[a] * t(j, a);
    for (int i = 0; i < base->dim(); ++i)
      omega.coeffs(i, j) = omega_j.coeffs(i, 0);
  }
  NormalizedCocycle out{
      extend(base, Cocycle::make(base, ext.cocycle.values, tilde_form)), t,
      omega};
  return out;
}

PushforwardExtension pushforward_extension(const CentralExtension& ext,
                                           const QMat& phi,
                                           const GradedVectorSpace& target) {
  const int nv1 = ext.dim_v();
  if (static_cast<int>(phi.cols()) != nv1 ||
      static_cast<int>(phi.rows()) != target.dim)
    throw Error(ErrorCode::DimensionMismatch, "phi has wrong dimensions");
  // Graded check.
  for (std::size_t i = 0; i < phi.rows(); ++i)
    for (std::size_t j = 0; j < phi.cols(); ++j)
      if (phi(i, j) != 0 &&
          target.layers[i] != ext.cocycle.values.layers[j])
        throw Error(ErrorCode::GradingIncompatible, "phi is not graded");

  // Basis of im(phi): pivot columns of phi.
  std::vector<std::size_t> pivots;
  {
    QMat copy = phi;
    pivots = copy.rref();
  }
  QMat image_basis = phi.columns(pivots);
  const int k = static_cast<int>(pivots.size());
  std::vector<std::string> names;
  std::vector<int> layers;
  for (int c = 0; c < k; ++c) {
    names.push_back("W" + std::to_string(c + 1));
    layers.push_back(ext.cocycle.values.layers[pivots[c]]);
  }
  // Gram restricted from the target space.
  QMat gram(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      gram(a, b) = inner(image_basis.col(a), image_basis.col(b), target.gram);
  GradedVectorSpace image_space(names, layers, gram);

  // Express phi o rho in the image basis: solve B c = phi * rho pointwise.
  auto rc = rumin_cache(ext.base);
  const int npairs = rc->combs(2).size();
  AlgebraForm hat_rho(ext.base, 2, image_space);
  for (int r = 0; r < npairs; ++r) {
    QVec rhs(target.dim, Rational(0));
    for (int i = 0; i < target.dim; ++i)
      for (int j = 0; j < nv1; ++j)
        rhs[i] += phi(i, j) * ext.cocycle.form.coeffs(r, j);
    auto sol = image_basis.solve(rhs);
    if (!sol)
      throw Error(ErrorCode::NoSolution, "internal: image basis solve failed");
    for (int c = 0; c < k; ++c) hat_rho.coeffs(r, c) = (*sol)[c];
  }
  PushforwardExtension out{
      extend(ext.base, Cocycle::make(ext.base, image_space, hat_rho)), QMat(),
      image_basis};
  // psi(X + Y) = X + phi(Y): the new V-part is the image-basis coordinate
  // vector of phi(Y), solved columnwise.
  QMat phi_in_basis(k, nv1);
  for (int j = 0; j < nv1; ++j) {
    auto sol = image_basis.solve(phi.col(j));
    if (!sol)
      throw Error(ErrorCode::NoSolution, "internal: image basis solve failed");
    for (int c = 0; c < k; ++c) phi_in_basis(c, j) = (*sol)[c];
  }
  out.psi = out.extension.section * ext.projection +
            out.extension.inclusion *
                (phi_in_basis * ext.inclusion.transposed());
  if (!is_bracket_homomorphism(*ext.derived, *out.extension.derived, out.psi))
    throw Error(ErrorCode::InvalidArgument,
                "internal error: pushforward psi is not a homomorphism");
  return out;
}

AbelianSplit abelian_factor_split(const CentralExtension& ext) {
  const auto& values = ext.cocycle.values;
  std::vector<int> kept, dropped;
  for (int v = 0; v < values.dim; ++v)
    (values.layers[v] == 1 ? dropped : kept).push_back(v);
  // The cocycle must have no horizontal value components.
  for (std::size_t r = 0; r < ext.cocycle.form.coeffs.rows(); ++r)
    for (int v : dropped)
      if (ext.cocycle.form.coeffs(r, v) != 0)
        throw Error(ErrorCode::GradingIncompatible,
                    "cocycle has a horizontal value component");

  auto subspace = [&](const std::vector<int>& idx) {
    std::vector<std::string> names;
    std::vector<int> layers;
    QMat gram(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      names.push_back(values.names[idx[a]]);
      layers.push_back(values.layers[idx[a]]);
      for (std::size_t b = 0; b < idx.size(); ++b)
        gram(a, b) = values.gram(idx[a], idx[b]);
    }
    return GradedVectorSpace(names, layers, gram);
  };
  GradedVectorSpace reduced_values = subspace(kept);
  GradedVectorSpace w = subspace(dropped);

  AlgebraForm reduced_form(ext.base, 2, reduced_values);
  for (std::size_t r = 0; r < reduced_form.coeffs.rows(); ++r)
    for (std::size_t a = 0; a < kept.size(); ++a)
      reduced_form.coeffs(r, a) = ext.cocycle.form.coeffs(r, kept[a]);

  AbelianSplit out{
      extend(ext.base,
             Cocycle::make(ext.base, reduced_values, reduced_form)),
      w, kept};
  return out;
}

FieldForm alpha_potential(const CentralExtension& ext) {
  return cocycle_potential(ext.base, ext.cocycle.form);
}

}  // namespace carnot


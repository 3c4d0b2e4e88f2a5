#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "carnot/forms.hpp"

using namespace carnot;

namespace {
AlgebraForm random_form(const AlgebraPtr& alg, int degree, std::mt19937_64& rng) {
  AlgebraForm f(alg, degree);
  for (std::size_t r = 0; r < f.coeffs.rows(); ++r)
    f.coeffs(r, 0) = Rational(static_cast<long long>(rng() % 21) - 10,
                              1 + static_cast<long long>(rng() % 3));
  return f;
}
}  // namespace

TEST_CASE("d0 on filiform(2): dual of the bracket") {
  auto f2 = make_filiform(2);
  auto z2s = AlgebraForm::coframe_element(f2, 2);
  auto d = d0(z2s);
  // d0(Z2*) = -X* ^ Y*
  auto expected = AlgebraForm::monomial(f2, {0, 1}, rat(-1));
  CHECK(d == expected);

  CHECK(d0(AlgebraForm::coframe_element(f2, 0)).is_zero());  // d0 X* = 0
  CHECK(d0(AlgebraForm::coframe_element(f2, 1)).is_zero());
}

TEST_CASE("d0 vanishes identically on abelian algebras") {
  auto r4 = make_euclidean(4);
  std::mt19937_64 rng(7);
  for (int k = 0; k <= 3; ++k)
    CHECK(d0(random_form(r4, k, rng)).is_zero());
}

TEST_CASE("d0 o d0 = 0 exhaustively on basis monomials, dim <= 6") {
  for (auto alg : {make_filiform(3), make_filiform(5), make_heisenberg(2),
                   direct_product(make_heisenberg(1), make_euclidean(1))}) {
    auto rc = rumin_cache(alg);
    for (int k = 0; k + 2 <= alg->dim(); ++k) {
      const auto& table = rc->combs(k);
      for (int r = 0; r < table.size(); ++r) {
        AlgebraForm f(alg, k);
        f.coeffs(r, 0) = 1;
        CHECK(d0(d0(f)).is_zero());
      }
    }
  }
}

TEST_CASE("d0 is weight preserving on pure-weight forms") {
  auto f4 = make_filiform(4);
  std::mt19937_64 rng(99);
  for (int k = 1; k <= 3; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      auto f = random_form(f4, k, rng);
      for (const auto& [w, part] : pure_weight_split(f)) {
        auto df = d0(part);
        if (df.is_zero()) continue;
        auto dw = weight(df);
        REQUIRE(dw.has_value());
        CHECK(*dw == w);
      }
    }
}

TEST_CASE("d0 pseudo-inverse on filiform(2)") {
  auto f2 = make_filiform(2);
  // d0^{-1}(-X*^Y*) = Z2*
  auto k = AlgebraForm::monomial(f2, {0, 1}, rat(-1));
  CHECK(d0_pseudoinverse(k) == AlgebraForm::coframe_element(f2, 2));
  // d0_pseudoinverse(d0(Z2*)) = Z2* since Z2* is orthogonal to ker d0
  auto z2s = AlgebraForm::coframe_element(f2, 2);
  CHECK(d0_pseudoinverse(d0(z2s)) == z2s);
  // kappa orthogonal to im(d0) maps to 0
  auto perp = AlgebraForm::monomial(f2, {0, 2});  // X*^Z2* _|_ im d0
  CHECK(d0_pseudoinverse(perp).is_zero());
}

TEST_CASE("Moore-Penrose style identity for d0^{-1}") {
  for (auto alg : {make_filiform(3), make_heisenberg(2)}) {
    std::mt19937_64 rng(3);
    for (int k = 1; k <= 3; ++k)
      for (int trial = 0; trial < 6; ++trial) {
        auto f = random_form(alg, k, rng);
        auto once = d0_pseudoinverse(f);
        auto thrice = d0_pseudoinverse(d0(once));
        CHECK(once == thrice);
      }
  }
}

TEST_CASE("e0 basis: abelian gives the whole exterior power") {
  auto r3 = make_euclidean(3);
  auto rc = rumin_cache(r3);
  for (int k = 0; k <= 3; ++k)
    CHECK(static_cast<int>(e0_basis(r3, k).size()) == rc->combs(k).size());
}

TEST_CASE("e0 basis of filiform(2) in degrees 1 and 2") {
  auto f2 = make_filiform(2);
  auto deg1 = e0_basis(f2, 1);
  REQUIRE(deg1.size() == 2);
  // span {X*, Y*}: no Z2* component
  for (const auto& f : deg1) CHECK(f.coeffs(2, 0) == 0);

  auto deg2 = e0_basis(f2, 2);
  REQUIRE(deg2.size() == 2);
  // spanned by X*^Z2*, Y*^Z2*: every element orthogonal to X*^Y*
  auto xy = AlgebraForm::monomial(f2, {0, 1});
  for (const auto& f : deg2) CHECK(form_inner(f, xy) == 0);
}

TEST_CASE("e0 basis elements are pure weight and orthogonal") {
  for (auto alg : {make_filiform(4), make_heisenberg(2),
                   direct_product(make_heisenberg(1), make_euclidean(1))}) {
    for (int k = 1; k <= 3; ++k) {
      auto basis = e0_basis(alg, k);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(pure_weight_split(basis[i]).size() == 1);
        for (std::size_t j = i + 1; j < basis.size(); ++j)
          CHECK(form_inner(basis[i], basis[j]) == 0);
      }
    }
  }
}

TEST_CASE("project_E0 is an exact orthogonal projection") {
  auto f3 = make_filiform(3);
  std::mt19937_64 rng(17);
  for (int k = 1; k <= 2; ++k)
    for (int trial = 0; trial < 8; ++trial) {
      auto f = random_form(f3, k, rng);
      auto p = project_E0(f);
      CHECK(project_E0(p) == p);  // idempotent
      // image in E0: d0 p = 0 and p _|_ im d0
      CHECK(d0(p).is_zero());
      auto g = random_form(f3, k - 1, rng);
      CHECK(form_inner(p, d0(g)) == 0);
      // self-adjoint
      auto h = random_form(f3, k, rng);
      CHECK(form_inner(project_E0(f), h) == form_inner(f, project_E0(h)));
    }
}

TEST_CASE("project_E0 examples") {
  auto f2 = make_filiform(2);
  // omega in E0 is fixed
  auto xz = AlgebraForm::monomial(f2, {0, 2});
  CHECK(project_E0(xz) == xz);
  // im(d0) is killed
  CHECK(project_E0(d0(AlgebraForm::coframe_element(f2, 2))).is_zero());

  auto f3 = make_filiform(3);
  auto rho = AlgebraForm::monomial(f3, {0, 2});  // X*^Z2*
  auto p = project_E0(rho);
  // p is the E0 part; difference lies in im(d0)
  auto diff = rho - p;
  CHECK(d0(p).is_zero());
  if (!diff.is_zero()) {
    // diff must be a d0-image: solve d0 mu = diff via the pseudo-inverse
    auto mu = d0_pseudoinverse(diff);
    CHECK(d0(mu) == diff);
  }
}

TEST_CASE("weights: paper values") {
  // filiform rho_s = X* ^ Zs* has weight s+1
  for (int s = 2; s <= 5; ++s) {
    auto fs = make_filiform(s);
    auto rho = AlgebraForm::monomial(fs, {0, fs->dim() - 1});
    auto w = weight(rho);
    REQUIRE(w.has_value());
    CHECK(*w == s + 1);
  }
  // horizontal 1-form has weight 1
  auto f3 = make_filiform(3);
  CHECK(*weight(AlgebraForm::coframe_element(f3, 0)) == 1);
  // mixed weights split: X*^Y* + X*^Z2* has weight 2, split {2, 3}
  auto mixed = AlgebraForm::monomial(f3, {0, 1}) + AlgebraForm::monomial(f3, {0, 2});
  CHECK(*weight(mixed) == 2);
  auto split = pure_weight_split(mixed);
  REQUIRE(split.size() == 2);
  CHECK(split.count(2) == 1);
  CHECK(split.count(3) == 1);
  CHECK(split.at(2) + split.at(3) == mixed);
  // zero form: weight undefined
  AlgebraForm zero(f3, 2);
  CHECK(!weight(zero).has_value());
}

TEST_CASE("max nontrivial E0 weight in degree 2") {
  for (int s = 2; s <= 5; ++s)
    CHECK(max_nontrivial_E0_weight_2(make_filiform(s)) == s + 1);
  CHECK(max_nontrivial_E0_weight_2(make_euclidean(2)) == 2);
  CHECK(max_nontrivial_E0_weight_2(make_euclidean(4)) == 2);
  // step-s bound: result <= s+1
  for (auto alg : {make_heisenberg(2), direct_product(make_filiform(3), make_euclidean(1))})
    CHECK(max_nontrivial_E0_weight_2(alg) <= alg->step() + 1);
}

TEST_CASE("cocycle check and decomposition") {
  auto f3 = make_filiform(3);
  // Y* ^ Z3* is not a cocycle
  auto bad = AlgebraForm::monomial(f3, {1, 3});
  CHECK(!cocycle_check(bad));
  CHECK_THROWS_AS(cohomology_decompose(bad), Error);

  // rho_s is a cocycle with mu = 0 when it lies in E0
  auto f4 = make_filiform(4);
  auto rho = AlgebraForm::monomial(f4, {0, f4->dim() - 1});
  CHECK(cocycle_check(rho));
  auto dec = cohomology_decompose(rho);
  CHECK(dec.e0_part == rho);
  CHECK(dec.mu.is_zero());

  // any d0(eta) is a cocycle with vanishing E0 part
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    auto eta = random_form(f4, 1, rng);
    auto ex = d0(eta);
    CHECK(cocycle_check(ex));
    auto dec2 = cohomology_decompose(ex);
    CHECK(dec2.e0_part.is_zero());
    CHECK(d0(dec2.mu) == ex);
  }
}

TEST_CASE("im(d0) is orthogonal to E0 in every degree") {
  auto f4 = make_filiform(4);
  std::mt19937_64 rng(11);
  for (int k = 1; k <= 3; ++k) {
    auto basis = e0_basis(f4, k);
    for (int trial = 0; trial < 5; ++trial) {
      auto eta = random_form(f4, k - 1, rng);
      for (const auto& e : basis) CHECK(form_inner(d0(eta), e) == 0);
    }
  }
}

TEST_CASE("degree-1 E0 equals the horizontal coframe span") {
  for (auto alg : {make_filiform(4), make_heisenberg(2),
                   direct_product(make_heisenberg(1), make_euclidean(1))}) {
    auto basis = e0_basis(alg, 1);
    CHECK(static_cast<int>(basis.size()) == alg->rank());
    for (const auto& f : basis)
      for (int i = 0; i < alg->dim(); ++i)
        if (alg->layer_of(i) >= 2) CHECK(f.coeffs(i, 0) == 0);
  }
}

TEST_CASE("hodge star and weight duality") {
  for (auto alg : {make_heisenberg(1), make_filiform(3), make_filiform(4)}) {
    const int n = alg->dim();
    const int q = alg->homogeneous_dimension();
    // E0^{n-1} has pure weight Q-1; E0^1 has weight 1
    for (const auto& f : e0_basis(alg, 1)) CHECK(*weight(f) == 1);
    for (const auto& f : e0_basis(alg, n - 1)) CHECK(*weight(f) == q - 1);
    // star maps pure weight w to pure weight Q - w
    std::mt19937_64 rng(23);
    for (int k = 1; k < n; ++k) {
      auto f = random_form(alg, k, rng);
      for (const auto& [w, part] : pure_weight_split(f)) {
        auto s = hodge_star(part);
        if (s.is_zero()) continue;
        CHECK(*weight(s) == q - w);
        CHECK(pure_weight_split(s).size() == 1);
      }
    }
    // E0 is invariant under the star: star of the E0^1 basis lies in E0^{n-1}
    for (const auto& f : e0_basis(alg, 1)) {
      auto s = hodge_star(f);
      CHECK(project_E0(s) == s);
    }
  }
}

TEST_CASE("vector-valued forms: componentwise weight") {
  auto f3 = make_filiform(3);
  GradedVectorSpace v({"v1", "v2"}, {2, 3});
  auto f = AlgebraForm::monomial(f3, {0, 1}, rat(1), 0, v);  // X*^Y* (x) v1
  auto g = AlgebraForm::monomial(f3, {0, 2}, rat(1), 1, v);  // X*^Z2* (x) v2
  auto fg = f + g;
  CHECK(*weight(fg) == 2);  // min of the componentwise weights 2 and 3
  // d0 acts componentwise
  auto d = d0(fg);
  CHECK(d.component(0) == d0(f.component(0)));
  CHECK(d.component(1) == d0(g.component(1)));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "carnot/algebra.hpp"

using namespace carnot;

namespace {
QVec basis_vec(int dim, int i) {
  QVec v(dim, Rational(0));
  v[i] = 1;
  return v;
}
}  // namespace

TEST_CASE("filiform(2): valid, step 2, [X,Y] = Z2") {
  auto f2 = make_filiform(2);
  CHECK(validate_stratified(*f2).ok());
  CHECK(f2->step() == 2);
  CHECK(f2->rank() == 2);
  QVec br = f2->bracket(basis_vec(3, 0), basis_vec(3, 1));
  CHECK(br == basis_vec(3, 2));
}

TEST_CASE("abelian R^n is valid with step 1") {
  auto r3 = make_euclidean(3);
  CHECK(validate_stratified(*r3).ok());
  CHECK(r3->step() == 1);
  CHECK(r3->bracket(basis_vec(3, 0), basis_vec(3, 1)) == QVec(3, Rational(0)));
}

TEST_CASE("grading violation is reported: [X,Y] = X with layers 1,1,2") {
  StratifiedAlgebra bad({"X", "Y", "Z"}, {1, 1, 2},
                        {{0, 1, {{0, rat(1)}}}});
  auto report = validate_stratified(bad);
  CHECK(!report.ok());
  bool found = false;
  for (const auto& issue : report.issues)
    if (issue.clause == "grading") found = true;
  CHECK(found);
}

TEST_CASE("jacobi violation is reported") {
  // [X,Y]=Z1, [X,T]=Z2, [Y,Z2]=W. The cyclic sum on (X,Y,T) equals W != 0.
  StratifiedAlgebra bad({"X", "Y", "T", "Z1", "Z2", "W"}, {1, 1, 1, 2, 2, 3},
                        {{0, 1, {{3, rat(1)}}},
                         {0, 2, {{4, rat(1)}}},
                         {1, 4, {{5, rat(1)}}}});
  auto report = validate_stratified(bad);
  CHECK(!report.ok());
  bool found = false;
  for (const auto& issue : report.issues)
    if (issue.clause == "jacobi") found = true;
  CHECK(found);
}

TEST_CASE("bracket is antisymmetric and bilinear") {
  auto f3 = make_filiform(3);
  std::mt19937_64 rng(12345);
  auto random_vec = [&] {
    QVec v(f3->dim());
    for (auto& x : v)
      x = Rational(static_cast<long long>(rng() % 19) - 9,
                   1 + static_cast<long long>(rng() % 4));
    return v;
  };
  for (int trial = 0; trial < 20; ++trial) {
    QVec v = random_vec(), w = random_vec(), u = random_vec();
    CHECK(is_zero(f3->bracket(v, v)));
    CHECK(f3->bracket(v, w) + f3->bracket(w, v) == QVec(f3->dim(), Rational(0)));
    // bilinearity over rationals
    Rational s = rat(3, 2);
    QVec lhs = f3->bracket(s * v + u, w);
    QVec rhs = s * f3->bracket(v, w) + f3->bracket(u, w);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("filiform(3): bracket(X, Z2) = Z3") {
  auto f3 = make_filiform(3);
  CHECK(f3->bracket(basis_vec(4, 0), basis_vec(4, 2)) == basis_vec(4, 3));
}

TEST_CASE("dilation: identity at 1, layer exponents, automorphism") {
  auto f2 = make_filiform(2);
  CHECK(dilation(*f2, rat(1)).matrix == QMat::identity(3));
  auto d2 = dilation(*f2, rat(2));
  CHECK(d2.matrix(0, 0) == rat(2));
  CHECK(d2.matrix(1, 1) == rat(2));
  CHECK(d2.matrix(2, 2) == rat(4));
  CHECK(d2.is_graded());

  auto f3 = make_filiform(3);
  auto d3 = dilation(*f3, rat(3));
  QVec x = basis_vec(4, 0), z2 = basis_vec(4, 2);
  QVec lhs = d3.matrix * f3->bracket(x, z2);
  QVec rhs = f3->bracket(d3.matrix * x, d3.matrix * z2);
  CHECK(lhs == rhs);
  CHECK(lhs == rat(27) * basis_vec(4, 3));

  CHECK_THROWS_AS(dilation(*f2, rat(0)), Error);

  // dilation(l) o dilation(m) = dilation(l m)
  auto dl = dilation(*f3, rat(2)), dm = dilation(*f3, rat(5, 2));
  CHECK(dl.compose(dm).matrix == dilation(*f3, rat(5)).matrix);
}

TEST_CASE("make_standard families and errors") {
  auto h1 = make_standard("heisenberg", {1});
  CHECK(h1->dim() == 3);
  CHECK(h1->step() == 2);
  CHECK(validate_stratified(*h1).ok());
  // heisenberg(1) bracket [X,Y] = Z
  CHECK(h1->bracket(basis_vec(3, 0), basis_vec(3, 1)) == basis_vec(3, 2));

  // filiform(2) is isomorphic to heisenberg(1): same dims and layer counts
  auto f2 = make_standard("filiform", {2});
  CHECK(f2->dim() == h1->dim());
  CHECK(f2->layers() == h1->layers());

  auto f1 = make_standard("filiform", {1});
  CHECK(f1->dim() == 2);
  CHECK(f1->step() == 1);

  CHECK_THROWS_AS(make_standard("unknown", {}), Error);
  CHECK_THROWS_AS(make_standard("jet", {1, 2}), Error);
  CHECK_THROWS_AS(make_standard("filiform", {0}), Error);
}

TEST_CASE("heisenberg(2) is valid with rank 4") {
  auto h2 = make_heisenberg(2);
  CHECK(h2->dim() == 5);
  CHECK(h2->rank() == 4);
  CHECK(validate_stratified(*h2).ok());
}

TEST_CASE("direct products") {
  auto r1 = make_euclidean(1);
  auto r2 = direct_product(r1, r1);
  CHECK(r2->dim() == 2);
  CHECK(r2->step() == 1);
  CHECK(validate_stratified(*r2).ok());

  auto f2 = make_filiform(2);
  auto prod = direct_product(f2, r1);
  CHECK(prod->rank() == 3);
  CHECK(prod->step() == 2);
  CHECK(validate_stratified(*prod).ok());
  // layer-major: the R factor's generator sits among layer-1 vectors
  CHECK(prod->layer_of(2) == 1);

  auto h1xh1 = direct_product(make_heisenberg(1), make_heisenberg(1));
  CHECK(validate_stratified(*h1xh1).ok());
  CHECK(h1xh1->rank() == 4);
}

TEST_CASE("homogeneous dimension of filiform(s) is 2 + sum k") {
  for (int s = 2; s <= 5; ++s) {
    auto fs = make_filiform(s);
    int expected = 2;
    for (int k = 2; k <= s; ++k) expected += k;
    CHECK(fs->homogeneous_dimension() == expected);
  }
}

TEST_CASE("bracket presentations express higher layers") {
  auto f4 = make_filiform(4);
  auto pres = f4->bracket_presentations();
  REQUIRE(pres.has_value());
  // Z2 = [X, Y]
  const auto& p2 = (*pres)[2];
  REQUIRE(p2.terms.size() == 1);
  CHECK(p2.terms[0].a == 0);
  CHECK(p2.terms[0].b == 1);
  CHECK(p2.terms[0].coeff == rat(1));
  // reconstruct every higher basis vector
  for (int c = 0; c < f4->dim(); ++c) {
    if (f4->layer_of(c) == 1) continue;
    QVec acc(f4->dim(), Rational(0));
    for (const auto& t : (*pres)[c].terms) {
      QVec ea(f4->dim(), Rational(0)), eb(f4->dim(), Rational(0));
      ea[t.a] = 1;
      eb[t.b] = 1;
      acc = acc + t.coeff * f4->bracket(ea, eb);
    }
    CHECK(acc == basis_vec(f4->dim(), c));
  }
}

TEST_CASE("custom gram must be layer-block-diagonal") {
  QMat g = QMat::identity(3);
  g(0, 2) = rat(1, 2);
  g(2, 0) = rat(1, 2);
  StratifiedAlgebra alg({"X", "Y", "Z"}, {1, 1, 2}, {{0, 1, {{2, rat(1)}}}}, g);
  auto report = validate_stratified(alg);
  CHECK(!report.ok());
}

TEST_CASE("every constructed algebra validates") {
  for (auto alg : {make_heisenberg(1), make_heisenberg(3), make_filiform(5),
                   make_euclidean(4),
                   direct_product(make_heisenberg(2), make_euclidean(2))})
    CHECK(validate_stratified(*alg).ok());
}

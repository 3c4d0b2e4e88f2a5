#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "carnot/group.hpp"

using namespace carnot;

namespace {
QVec random_point(const AlgebraPtr& alg, std::mt19937_64& rng) {
  QVec v(alg->dim());
  for (auto& x : v)
    x = Rational(static_cast<long long>(rng() % 13) - 6,
                 1 + static_cast<long long>(rng() % 5));
  return v;
}
}  // namespace

TEST_CASE("heisenberg group law matches the closed form") {
  auto h1 = make_heisenberg(1);
  GroupGeometry geo(h1);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    QVec p = random_point(h1, rng), q = random_point(h1, rng);
    QVec r = geo.bch(p, q);
    CHECK(r[0] == p[0] + q[0]);
    CHECK(r[1] == p[1] + q[1]);
    CHECK(r[2] == p[2] + q[2] + (p[0] * q[1] - p[1] * q[0]) / 2);
  }
}

TEST_CASE("abelian group law is vector addition") {
  auto r3 = make_euclidean(3);
  GroupGeometry geo(r3);
  QVec p = {rat(1), rat(2), rat(-1)}, q = {rat(3), rat(-5, 2), rat(4)};
  CHECK(geo.bch(p, q) == p + q);
}

TEST_CASE("group axioms hold exactly in filiform(3) and filiform(5)") {
  std::mt19937_64 rng(2);
  for (int s : {3, 5}) {
    auto fs = make_filiform(s);
    GroupGeometry geo(fs);
    QVec zero(fs->dim(), Rational(0));
    for (int trial = 0; trial < 8; ++trial) {
      QVec p = random_point(fs, rng), q = random_point(fs, rng),
           r = random_point(fs, rng);
      CHECK(geo.bch(p, geo.inverse(p)) == zero);
      CHECK(geo.bch(p, zero) == p);
      CHECK(geo.bch(zero, p) == p);
      CHECK(geo.bch(geo.bch(p, q), r) == geo.bch(p, geo.bch(q, r)));
    }
  }
}

TEST_CASE("group law is dilation equivariant") {
  auto f4 = make_filiform(4);
  GroupGeometry geo(f4);
  std::mt19937_64 rng(3);
  for (const Rational& lambda : {rat(2), rat(1, 2), rat(3)}) {
    QVec p = random_point(f4, rng), q = random_point(f4, rng);
    QVec lhs = dilate_point(*f4, lambda, geo.bch(p, q));
    QVec rhs =
        geo.bch(dilate_point(*f4, lambda, p), dilate_point(*f4, lambda, q));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("heisenberg frame matches the standard one") {
  auto h1 = make_heisenberg(1);
  GroupGeometry geo(h1);
  const auto& a = geo.frame_matrix();
  // X = d/dx - (y/2) d/dz, Y = d/dy + (x/2) d/dz, Z = d/dz
  SampleBox box{{{-2, 2}, {-2, 2}, {-2, 2}}};
  auto x = ScalarExpr::variable(0), y = ScalarExpr::variable(1);
  auto check0 = [&](const ScalarExpr& e) {
    auto r = expr_is_zero(e, box);
    CHECK(r.verdict == TestVerdict::Equal);
    CHECK(r.exact);
  };
  check0(a(0, 0) - ScalarExpr::constant(1));
  check0(a(1, 0));
  check0(a(2, 0) + rat(1, 2) * y);
  check0(a(0, 1));
  check0(a(1, 1) - ScalarExpr::constant(1));
  check0(a(2, 1) - rat(1, 2) * x);
  check0(a(2, 2) - ScalarExpr::constant(1));
}

TEST_CASE("heisenberg coframe: Z2* = dz - (x dy - y dx)/2") {
  auto h1 = make_heisenberg(1);
  GroupGeometry geo(h1);
  const auto& theta = geo.coframe_matrix();
  SampleBox box{{{-2, 2}, {-2, 2}, {-2, 2}}};
  auto x = ScalarExpr::variable(0), y = ScalarExpr::variable(1);
  auto check0 = [&](const ScalarExpr& e) {
    auto r = expr_is_zero(e, box);
    CHECK(r.verdict == TestVerdict::Equal);
    CHECK(r.exact);
  };
  // rows: X* = dx, Y* = dy, Z2* = dz - x/2 dy + y/2 dx
  check0(theta(0, 0) - ScalarExpr::constant(1));
  check0(theta(0, 1));
  check0(theta(0, 2));
  check0(theta(1, 1) - ScalarExpr::constant(1));
  check0(theta(2, 0) - rat(1, 2) * y);
  check0(theta(2, 1) + rat(1, 2) * x);
  check0(theta(2, 2) - ScalarExpr::constant(1));
}

TEST_CASE("frame at the origin is the identity; duality is exact") {
  for (auto alg : {make_filiform(3), make_heisenberg(2), make_filiform(5)}) {
    GroupGeometry geo(alg);
    const auto& a = geo.frame_matrix();
    const auto& theta = geo.coframe_matrix();
    const int n = alg->dim();
    SampleBox box{{}};
    for (int i = 0; i < n; ++i) box.ranges.push_back({-2.0, 2.0});
    // Theta * A = I as exact polynomials
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<ScalarExpr> terms;
        for (int l = 0; l < n; ++l) terms.push_back(theta(i, l) * a(l, j));
        auto entry = ScalarExpr::add(std::move(terms)) -
                     ScalarExpr::constant(Rational(i == j ? 1 : 0));
        auto r = expr_is_zero(entry, box);
        CHECK(r.verdict == TestVerdict::Equal);
        CHECK(r.exact);
      }
    DVec origin(n, 0.0);
    DMat a0 = geo.frame_at(origin);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(a0(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("frame coefficients have dilation-compatible weights") {
  auto f3 = make_filiform(3);
  GroupGeometry geo(f3);
  const auto& a = geo.frame_matrix();
  const int n = f3->dim();
  std::mt19937_64 rng(9);
  DVec x(n);
  for (auto& v : x) v = 0.3 + 0.1 * static_cast<double>(rng() % 7);
  const double lambda = 1.7;
  DVec lx = dilate_point(*f3, lambda, x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double lhs = a(j, i).eval(lx);
      double rhs = std::pow(lambda, f3->layer_of(j) - f3->layer_of(i)) *
                   a(j, i).eval(x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("left trivialization of horizontal exponential segments") {
  auto f3 = make_filiform(3);
  GroupGeometry geo(f3);
  // Curve t -> p * exp(t X): left-trivialized derivative must be X.
  QVec p = {rat(1, 2), rat(-1), rat(2), rat(1, 3)};
  DVec pd(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) pd[i] = to_double(p[i]);
  const double h = 1e-6;
  auto at = [&](double t) {
    DVec q(f3->dim(), 0.0);
    q[0] = t;
    return geo.bch(pd, q);
  };
  DVec plus = at(0.35 + h), minus = at(0.35 - h);
  DVec mid = at(0.35);
  DVec vel(f3->dim());
  for (int i = 0; i < f3->dim(); ++i) vel[i] = (plus[i] - minus[i]) / (2 * h);
  DVec triv = geo.left_trivialize(mid, vel);
  CHECK(triv[0] == doctest::Approx(1.0).epsilon(1e-5));
  for (int i = 1; i < f3->dim(); ++i)
    CHECK(triv[i] == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("step above 6 is rejected") {
  auto f7 = make_filiform(7);
  CHECK_THROWS_AS(GroupGeometry{f7}, Error);
}

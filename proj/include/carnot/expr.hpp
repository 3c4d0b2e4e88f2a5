#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// Laurent monomial exponents: variable index -> integer power (no zeros).
using ExpVec = std::map<int, int>;
// Laurent polynomial with rational coefficients (no zero coefficients).
using LaurentPoly = std::map<ExpVec, Rational>;
// Rational linear form in the variables, zero constant term.
using LinForm = std::map<int, Rational>;

// Exact normal form for the expression subclass generated by Laurent
// monomials and sin/cos of rational linear forms: sums
//   p0 + sum_L ( cos(L) * p_L + sin(L) * q_L )
// with pairwise distinct canonical frequencies L. Distinct frequencies are
// linearly independent over polynomials, so zero-testing is exact.
class TrigPoly {
 public:
  TrigPoly() = default;
  static TrigPoly constant(const Rational& c);
  static TrigPoly variable(int v);
  static TrigPoly wave(bool is_sin, const LinForm& freq);

  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator-(const TrigPoly& o) const;
  TrigPoly operator*(const TrigPoly& o) const;
  TrigPoly diff(int var) const;
  std::optional<TrigPoly> pow(int e) const;  // fails for negative non-monomial

  bool is_zero() const { return base_.empty() && waves_.empty(); }
  std::optional<Rational> as_constant() const;
  // The polynomial part if there are no waves.
  std::optional<LaurentPoly> as_poly() const;
  // Linear form with zero constant term, if the whole value is one.
  std::optional<LinForm> as_linear_form() const;

  bool operator==(const TrigPoly& o) const {
    return base_ == o.base_ && waves_ == o.waves_;
  }

  // Rebuild a compact expression (expanded monomials) from the normal form.
  class ScalarExpr to_expr() const;

 private:
  void add_base(const LaurentPoly& p);
  void add_wave(const LinForm& freq, const LaurentPoly& cos_part,
                const LaurentPoly& sin_part);
  LaurentPoly base_;
  std::map<LinForm, std::pair<LaurentPoly, LaurentPoly>> waves_;
};

// Immutable symbolic expression over chart coordinates: rational constants,
// variables, +, *, integer powers, sin, cos, exp. Exact differentiation,
// double evaluation, s-expression serialization.
class ScalarExpr {
 public:
  enum class Kind { Constant, Variable, Add, Mul, Pow, Sin, Cos, Exp };

  ScalarExpr() : ScalarExpr(constant(Rational(0))) {}

  static ScalarExpr constant(const Rational& c);
  static ScalarExpr constant(long long n) { return constant(Rational(n)); }
  static ScalarExpr variable(int index);
  static ScalarExpr add(std::vector<ScalarExpr> terms);
  static ScalarExpr mul(std::vector<ScalarExpr> factors);
  static ScalarExpr pow(const ScalarExpr& base, int exponent);
  static ScalarExpr sin(const ScalarExpr& a);
  static ScalarExpr cos(const ScalarExpr& a);
  static ScalarExpr exp(const ScalarExpr& a);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero_constant() const;
  std::optional<Rational> constant_value() const;

  ScalarExpr diff(int var) const;
  double eval(std::span<const double> xs) const;
  // Substitute Var(i) -> args[i]; used for composition/pullback.
  ScalarExpr substitute(const std::vector<ScalarExpr>& args) const;
  int max_variable() const;  // -1 when constant

  // Exact normal form; nullopt outside the trig-polynomial class.
  std::optional<TrigPoly> normal_form() const;
  // Replace by the re-expanded normal form when one exists; keeps expression
  // growth bounded through long operator pipelines.
  ScalarExpr simplified() const;

  std::string to_sexpr(const std::vector<std::string>& names = {}) const;
  static ScalarExpr parse_sexpr(const std::string& text,
                                const std::vector<std::string>& names = {});

  ScalarExpr operator+(const ScalarExpr& o) const { return add({*this, o}); }
  ScalarExpr operator-(const ScalarExpr& o) const;
  ScalarExpr operator-() const;
  ScalarExpr operator*(const ScalarExpr& o) const { return mul({*this, o}); }

 private:
  struct Node;
  explicit ScalarExpr(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline ScalarExpr operator*(const Rational& s, const ScalarExpr& e) {
  return ScalarExpr::constant(s) * e;
}

// Exactness-aware zero/equality decisions.
enum class TestVerdict { Equal, NotEqual, Unknown };
struct IdentityResult {
  TestVerdict verdict = TestVerdict::Unknown;
  bool exact = false;              // decided by normal form, not sampling
  std::vector<double> witness;     // sample point for NotEqual
  double max_abs = 0.0;            // largest |difference| seen while sampling
};

// Deterministic sampling in a box; excluded predicate may reject points.
struct SampleBox {
  std::vector<std::pair<double, double>> ranges;
};

class Sampler {
 public:
  Sampler(SampleBox box, unsigned long long seed);
  std::vector<double> next();
  unsigned long long seed() const { return seed_; }
  const SampleBox& box() const { return box_; }

 private:
  SampleBox box_;
  unsigned long long seed_;
  unsigned long long state_;
};

// Is the expression identically zero on the box? Exact when the normal form
// exists; otherwise sampled at `samples` points with relative tolerance tol.
IdentityResult expr_is_zero(const ScalarExpr& e, const SampleBox& box,
                            unsigned long long seed = 12345,
                            int samples = 32, double tol = 1e-9);

}  // namespace carnot

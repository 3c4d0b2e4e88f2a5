#include "carnot/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace carnot {

namespace {

void poly_add_term(LaurentPoly& p, const ExpVec& e, const Rational& c) {
  if (c == 0) return;
  auto it = p.find(e);
  if (it == p.end()) {
    p.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

LaurentPoly poly_add(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly out = a;
  for (const auto& [e, c] : b) poly_add_term(out, e, c);
  return out;
}

LaurentPoly poly_neg(const LaurentPoly& a) {
  LaurentPoly out;
  for (const auto& [e, c] : a) out.emplace(e, -c);
  return out;
}

LaurentPoly poly_scale(const LaurentPoly& a, const Rational& s) {
  LaurentPoly out;
  if (s == 0) return out;
  for (const auto& [e, c] : a) out.emplace(e, c * s);
  return out;
}

LaurentPoly poly_mul(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      ExpVec e = ea;
      for (const auto& [v, k] : eb) {
        e[v] += k;
        if (e[v] == 0) e.erase(v);
      }
      poly_add_term(out, e, ca * cb);
    }
  return out;
}

LaurentPoly poly_diff(const LaurentPoly& a, int var) {
  LaurentPoly out;
  for (const auto& [e, c] : a) {
    auto it = e.find(var);
    if (it == e.end()) continue;
    ExpVec de = e;
    if (it->second == 1)
      de.erase(var);
    else
      de[var] = it->second - 1;
    poly_add_term(out, de, c * it->second);
  }
  return out;
}

LinForm lin_add(const LinForm& a, const LinForm& b, bool subtract) {
  LinForm out = a;
  for (const auto& [v, c] : b) {
    out[v] += subtract ? -c : c;
    if (out[v] == 0) out.erase(v);
  }
  return out;
}

// Canonical wave direction: first variable coefficient positive.
int lin_canonical_sign(const LinForm& freq) {
  if (freq.empty()) return 1;
  return freq.begin()->second > 0 ? 1 : -1;
}

LinForm lin_negate(const LinForm& freq) {
  LinForm out;
  for (const auto& [v, c] : freq) out.emplace(v, -c);
  return out;
}

}  // namespace

TrigPoly TrigPoly::constant(const Rational& c) {
  TrigPoly t;
  poly_add_term(t.base_, {}, c);
  return t;
}

TrigPoly TrigPoly::variable(int v) {
  TrigPoly t;
  poly_add_term(t.base_, {{v, 1}}, Rational(1));
  return t;
}

TrigPoly TrigPoly::wave(bool is_sin, const LinForm& freq) {
  TrigPoly t;
  LaurentPoly one;
  poly_add_term(one, {}, Rational(1));
  if (is_sin)
    t.add_wave(freq, {}, one);
  else
    t.add_wave(freq, one, {});
  return t;
}

void TrigPoly::add_base(const LaurentPoly& p) {
  for (const auto& [e, c] : p) poly_add_term(base_, e, c);
}

void TrigPoly::add_wave(const LinForm& freq, const LaurentPoly& cos_part,
                        const LaurentPoly& sin_part) {
  if (freq.empty()) {
    // cos(0) = 1, sin(0) = 0
    add_base(cos_part);
    return;
  }
  LinForm key = freq;
  LaurentPoly sp = sin_part;
  if (lin_canonical_sign(freq) < 0) {
    key = lin_negate(freq);
    sp = poly_neg(sp);
  }
  auto& slot = waves_[key];
  slot.first = poly_add(slot.first, cos_part);
  slot.second = poly_add(slot.second, sp);
  if (slot.first.empty() && slot.second.empty()) waves_.erase(key);
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  TrigPoly out = *this;
  out.add_base(o.base_);
  for (const auto& [freq, parts] : o.waves_)
    out.add_wave(freq, parts.first, parts.second);
  return out;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
  TrigPoly out = *this;
  out.add_base(poly_neg(o.base_));
  for (const auto& [freq, parts] : o.waves_)
    out.add_wave(freq, poly_neg(parts.first), poly_neg(parts.second));
  return out;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
  TrigPoly out;
  const Rational half(1, 2);
  out.add_base(poly_mul(base_, o.base_));
  for (const auto& [freq, parts] : o.waves_)
    out.add_wave(freq, poly_mul(base_, parts.first),
                 poly_mul(base_, parts.second));
  for (const auto& [freq, parts] : waves_)
    out.add_wave(freq, poly_mul(o.base_, parts.first),
                 poly_mul(o.base_, parts.second));
  // waves x waves: product-to-sum identities
  for (const auto& [fa, pa] : waves_)
    for (const auto& [fb, pb] : o.waves_) {
      const LinForm sum = lin_add(fa, fb, false);
      const LinForm dif = lin_add(fa, fb, true);
      // cos A cos B = (cos(A-B) + cos(A+B)) / 2
      LaurentPoly cc = poly_scale(poly_mul(pa.first, pb.first), half);
      if (!cc.empty()) {
        out.add_wave(dif, cc, {});
        out.add_wave(sum, cc, {});
      }
      // sin A sin B = (cos(A-B) - cos(A+B)) / 2
      LaurentPoly ss = poly_scale(poly_mul(pa.second, pb.second), half);
      if (!ss.empty()) {
        out.add_wave(dif, ss, {});
        out.add_wave(sum, poly_neg(ss), {});
      }
      // cos A sin B = (sin(A+B) - sin(A-B)) / 2
      LaurentPoly cs = poly_scale(poly_mul(pa.first, pb.second), half);
      if (!cs.empty()) {
        out.add_wave(sum, {}, cs);
        out.add_wave(dif, {}, poly_neg(cs));
      }
      // sin A cos B = (sin(A+B) + sin(A-B)) / 2
      LaurentPoly sc = poly_scale(poly_mul(pa.second, pb.first), half);
      if (!sc.empty()) {
        out.add_wave(sum, {}, sc);
        out.add_wave(dif, {}, sc);
      }
    }
  return out;
}

TrigPoly TrigPoly::diff(int var) const {
  TrigPoly out;
  out.add_base(poly_diff(base_, var));
  for (const auto& [freq, parts] : waves_) {
    // d(cos L p + sin L q) = cos L (p' + aL q) + sin L (q' - aL p),
    // where aL = dL/dvar.
    Rational a(0);
    auto it = freq.find(var);
    if (it != freq.end()) a = it->second;
    LaurentPoly cosp = poly_diff(parts.first, var);
    LaurentPoly sinp = poly_diff(parts.second, var);
    if (a != 0) {
      cosp = poly_add(cosp, poly_scale(parts.second, a));
      sinp = poly_add(sinp, poly_scale(parts.first, -a));
    }
    out.add_wave(freq, cosp, sinp);
  }
  return out;
}

std::optional<TrigPoly> TrigPoly::pow(int e) const {
  if (e == 0) return TrigPoly::constant(Rational(1));
  if (e > 0) {
    TrigPoly acc = TrigPoly::constant(Rational(1));
    for (int i = 0; i < e; ++i) acc = acc * *this;
    return acc;
  }
  if (!waves_.empty() || base_.size() != 1) return std::nullopt;
  const auto& [exps, coeff] = *base_.begin();
  TrigPoly inv;
  ExpVec ie;
  for (const auto& [v, k] : exps) ie.emplace(v, -k);
  poly_add_term(inv.base_, ie, Rational(1) / coeff);
  TrigPoly acc = TrigPoly::constant(Rational(1));
  for (int i = 0; i < -e; ++i) acc = acc * inv;
  return acc;
}

std::optional<Rational> TrigPoly::as_constant() const {
  if (!waves_.empty()) return std::nullopt;
  if (base_.empty()) return Rational(0);
  if (base_.size() == 1 && base_.begin()->first.empty())
    return base_.begin()->second;
  return std::nullopt;
}

std::optional<LaurentPoly> TrigPoly::as_poly() const {
  if (!waves_.empty()) return std::nullopt;
  return base_;
}

std::optional<LinForm> TrigPoly::as_linear_form() const {
  if (!waves_.empty()) return std::nullopt;
  LinForm lin;
  for (const auto& [e, c] : base_) {
    if (e.size() != 1 || e.begin()->second != 1) return std::nullopt;
    lin[e.begin()->first] = c;
  }
  return lin;
}

namespace {

ScalarExpr poly_to_expr(const LaurentPoly& p) {
  std::vector<ScalarExpr> terms;
  for (const auto& [e, c] : p) {
    std::vector<ScalarExpr> factors = {ScalarExpr::constant(c)};
    for (const auto& [v, k] : e)
      factors.push_back(ScalarExpr::pow(ScalarExpr::variable(v), k));
    terms.push_back(ScalarExpr::mul(std::move(factors)));
  }
  return ScalarExpr::add(std::move(terms));
}

ScalarExpr lin_to_expr(const LinForm& l) {
  std::vector<ScalarExpr> terms;
  for (const auto& [v, c] : l)
    terms.push_back(ScalarExpr::constant(c) * ScalarExpr::variable(v));
  return ScalarExpr::add(std::move(terms));
}

}  // namespace

ScalarExpr TrigPoly::to_expr() const {
  std::vector<ScalarExpr> terms = {poly_to_expr(base_)};
  for (const auto& [freq, parts] : waves_) {
    ScalarExpr arg = lin_to_expr(freq);
    if (!parts.first.empty())
      terms.push_back(poly_to_expr(parts.first) * ScalarExpr::cos(arg));
    if (!parts.second.empty())
      terms.push_back(poly_to_expr(parts.second) * ScalarExpr::sin(arg));
  }
  return ScalarExpr::add(std::move(terms));
}

ScalarExpr ScalarExpr::simplified() const {
  if (auto nf = normal_form()) return nf->to_expr();
  return *this;
}

struct ScalarExpr::Node {
  Kind kind;
  Rational value;                // Constant
  int var = -1;                  // Variable
  int exponent = 0;              // Pow
  std::vector<ScalarExpr> args;  // Add, Mul, Pow(1), Sin/Cos/Exp(1)
};

ScalarExpr::Kind ScalarExpr::kind() const { return node_->kind; }

bool ScalarExpr::is_zero_constant() const {
  return node_->kind == Kind::Constant && node_->value == 0;
}

std::optional<Rational> ScalarExpr::constant_value() const {
  if (node_->kind == Kind::Constant) return node_->value;
  return std::nullopt;
}

ScalarExpr ScalarExpr::constant(const Rational& c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = c;
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = index;
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::add(std::vector<ScalarExpr> terms) {
  std::vector<ScalarExpr> flat;
  Rational c(0);
  for (auto& t : terms) {
    if (t.node_->kind == Kind::Add) {
      for (const auto& a : t.node_->args) {
        if (a.node_->kind == Kind::Constant)
          c += a.node_->value;
        else
          flat.push_back(a);
      }
    } else if (t.node_->kind == Kind::Constant) {
      c += t.node_->value;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c != 0) flat.push_back(constant(c));
  if (flat.empty()) return constant(Rational(0));
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Add;
  n->args = std::move(flat);
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::mul(std::vector<ScalarExpr> factors) {
  std::vector<ScalarExpr> flat;
  Rational c(1);
  for (auto& t : factors) {
    if (t.node_->kind == Kind::Mul) {
      for (const auto& a : t.node_->args) {
        if (a.node_->kind == Kind::Constant)
          c *= a.node_->value;
        else
          flat.push_back(a);
      }
    } else if (t.node_->kind == Kind::Constant) {
      c *= t.node_->value;
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c == 0) return constant(Rational(0));
  if (c != 1) flat.insert(flat.begin(), constant(c));
  if (flat.empty()) return constant(Rational(1));
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Mul;
  n->args = std::move(flat);
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::pow(const ScalarExpr& base, int exponent) {
  if (exponent == 0) return constant(Rational(1));
  if (exponent == 1) return base;
  if (auto c = base.constant_value()) {
    if (exponent > 0) {
      Rational r(1);
      for (int i = 0; i < exponent; ++i) r *= *c;
      return constant(r);
    }
    if (*c != 0) {
      Rational r(1);
      for (int i = 0; i < -exponent; ++i) r *= *c;
      return constant(Rational(1) / r);
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->exponent = exponent;
  n->args = {base};
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::sin(const ScalarExpr& a) {
  if (a.is_zero_constant()) return constant(Rational(0));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sin;
  n->args = {a};
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::cos(const ScalarExpr& a) {
  if (a.is_zero_constant()) return constant(Rational(1));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cos;
  n->args = {a};
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::exp(const ScalarExpr& a) {
  if (a.is_zero_constant()) return constant(Rational(1));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->args = {a};
  return ScalarExpr(std::move(n));
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const {
  return add({*this, constant(Rational(-1)) * o});
}

ScalarExpr ScalarExpr::operator-() const {
  return constant(Rational(-1)) * *this;
}

ScalarExpr ScalarExpr::diff(int var) const {
  switch (node_->kind) {
    case Kind::Constant:
      return constant(Rational(0));
    case Kind::Variable:
      return constant(Rational(node_->var == var ? 1 : 0));
    case Kind::Add: {
      std::vector<ScalarExpr> terms;
      for (const auto& a : node_->args) terms.push_back(a.diff(var));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      std::vector<ScalarExpr> terms;
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        std::vector<ScalarExpr> factors = node_->args;
        factors[i] = node_->args[i].diff(var);
        terms.push_back(mul(std::move(factors)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      const auto& b = node_->args[0];
      return constant(Rational(node_->exponent)) *
             pow(b, node_->exponent - 1) * b.diff(var);
    }
    case Kind::Sin:
      return cos(node_->args[0]) * node_->args[0].diff(var);
    case Kind::Cos:
      return constant(Rational(-1)) * sin(node_->args[0]) *
             node_->args[0].diff(var);
    case Kind::Exp:
      return exp(node_->args[0]) * node_->args[0].diff(var);
  }
  throw Error(ErrorCode::UnsupportedExpression, "unreachable");
}

double ScalarExpr::eval(std::span<const double> xs) const {
  switch (node_->kind) {
    case Kind::Constant:
      return to_double(node_->value);
    case Kind::Variable:
      if (node_->var < 0 || node_->var >= static_cast<int>(xs.size()))
        throw Error(ErrorCode::DimensionMismatch,
                    "variable index out of range");
      return xs[node_->var];
    case Kind::Add: {
      double s = 0;
      for (const auto& a : node_->args) s += a.eval(xs);
      return s;
    }
    case Kind::Mul: {
      double s = 1;
      for (const auto& a : node_->args) s *= a.eval(xs);
      return s;
    }
    case Kind::Pow:
      return std::pow(node_->args[0].eval(xs), node_->exponent);
    case Kind::Sin:
      return std::sin(node_->args[0].eval(xs));
    case Kind::Cos:
      return std::cos(node_->args[0].eval(xs));
    case Kind::Exp:
      return std::exp(node_->args[0].eval(xs));
  }
  throw Error(ErrorCode::UnsupportedExpression, "unreachable");
}

ScalarExpr ScalarExpr::substitute(const std::vector<ScalarExpr>& args) const {
  switch (node_->kind) {
    case Kind::Constant:
      return *this;
    case Kind::Variable:
      if (node_->var < 0 || node_->var >= static_cast<int>(args.size()))
        throw Error(ErrorCode::DimensionMismatch,
                    "substitution index out of range");
      return args[node_->var];
    case Kind::Add: {
      std::vector<ScalarExpr> terms;
      for (const auto& a : node_->args) terms.push_back(a.substitute(args));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      std::vector<ScalarExpr> factors;
      for (const auto& a : node_->args) factors.push_back(a.substitute(args));
      return mul(std::move(factors));
    }
    case Kind::Pow:
      return pow(node_->args[0].substitute(args), node_->exponent);
    case Kind::Sin:
      return sin(node_->args[0].substitute(args));
    case Kind::Cos:
      return cos(node_->args[0].substitute(args));
    case Kind::Exp:
      return exp(node_->args[0].substitute(args));
  }
  throw Error(ErrorCode::UnsupportedExpression, "unreachable");
}

int ScalarExpr::max_variable() const {
  switch (node_->kind) {
    case Kind::Constant:
      return -1;
    case Kind::Variable:
      return node_->var;
    default: {
      int m = -1;
      for (const auto& a : node_->args) m = std::max(m, a.max_variable());
      return m;
    }
  }
}

std::optional<TrigPoly> ScalarExpr::normal_form() const {
  switch (node_->kind) {
    case Kind::Constant:
      return TrigPoly::constant(node_->value);
    case Kind::Variable:
      return TrigPoly::variable(node_->var);
    case Kind::Add: {
      TrigPoly acc;
      for (const auto& a : node_->args) {
        auto t = a.normal_form();
        if (!t) return std::nullopt;
        acc = acc + *t;
      }
      return acc;
    }
    case Kind::Mul: {
      TrigPoly acc = TrigPoly::constant(Rational(1));
      for (const auto& a : node_->args) {
        auto t = a.normal_form();
        if (!t) return std::nullopt;
        acc = acc * *t;
      }
      return acc;
    }
    case Kind::Pow: {
      auto t = node_->args[0].normal_form();
      if (!t) return std::nullopt;
      return t->pow(node_->exponent);
    }
    case Kind::Sin:
    case Kind::Cos: {
      auto t = node_->args[0].normal_form();
      if (!t) return std::nullopt;
      auto lin = t->as_linear_form();
      if (!lin) return std::nullopt;
      return TrigPoly::wave(node_->kind == Kind::Sin, *lin);
    }
    case Kind::Exp:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {
std::string var_name(int i, const std::vector<std::string>& names) {
  if (i >= 0 && i < static_cast<int>(names.size())) return names[i];
  return "x" + std::to_string(i);
}
}  // namespace

std::string ScalarExpr::to_sexpr(const std::vector<std::string>& names) const {
  switch (node_->kind) {
    case Kind::Constant:
      return rational_to_string(node_->value);
    case Kind::Variable:
      return var_name(node_->var, names);
    case Kind::Add:
    case Kind::Mul: {
      std::ostringstream os;
      os << (node_->kind == Kind::Add ? "(+" : "(*");
      for (const auto& a : node_->args) os << " " << a.to_sexpr(names);
      os << ")";
      return os.str();
    }
    case Kind::Pow:
      return "(pow " + node_->args[0].to_sexpr(names) + " " +
             std::to_string(node_->exponent) + ")";
    case Kind::Sin:
      return "(sin " + node_->args[0].to_sexpr(names) + ")";
    case Kind::Cos:
      return "(cos " + node_->args[0].to_sexpr(names) + ")";
    case Kind::Exp:
      return "(exp " + node_->args[0].to_sexpr(names) + ")";
  }
  return "?";
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  const std::vector<std::string>& names;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  std::string token() {
    skip_ws();
    if (pos >= text.size())
      throw Error(ErrorCode::ParseError, "unexpected end of expression");
    if (text[pos] == '(' || text[pos] == ')')
      return std::string(1, text[pos++]);
    std::size_t start = pos;
    while (pos < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return text.substr(start, pos - start);
  }
  std::string peek() {
    std::size_t save = pos;
    std::string t = token();
    pos = save;
    return t;
  }

  ScalarExpr atom(const std::string& t) {
    if (auto q = rational_from_string(t)) return ScalarExpr::constant(*q);
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == t) return ScalarExpr::variable(static_cast<int>(i));
    if (t.size() >= 2 && t[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) digits = false;
      if (digits) return ScalarExpr::variable(std::stoi(t.substr(1)));
    }
    throw Error(ErrorCode::ParseError, "unknown symbol: " + t);
  }

  ScalarExpr expr() {
    std::string t = token();
    if (t != "(") return atom(t);
    std::string op = token();
    std::vector<ScalarExpr> args;
    while (peek() != ")") args.push_back(expr());
    token();  // consume ')'
    if (op == "+") return ScalarExpr::add(std::move(args));
    if (op == "*") return ScalarExpr::mul(std::move(args));
    if (op == "-") {
      if (args.size() == 1) return -args[0];
      if (args.size() == 2) return args[0] - args[1];
      throw Error(ErrorCode::ParseError, "(-) takes 1 or 2 arguments");
    }
    if (op == "/") {
      if (args.size() != 2)
        throw Error(ErrorCode::ParseError, "(/) takes 2 arguments");
      return args[0] * ScalarExpr::pow(args[1], -1);
    }
    if (op == "pow") {
      if (args.size() != 2)
        throw Error(ErrorCode::ParseError, "(pow base exponent)");
      auto e = args[1].constant_value();
      if (!e || boost::multiprecision::denominator(*e) != 1)
        throw Error(ErrorCode::ParseError, "pow exponent must be an integer");
      return ScalarExpr::pow(
          args[0], boost::multiprecision::numerator(*e).convert_to<int>());
    }
    if (op == "sin") {
      if (args.size() != 1) throw Error(ErrorCode::ParseError, "(sin x)");
      return ScalarExpr::sin(args[0]);
    }
    if (op == "cos") {
      if (args.size() != 1) throw Error(ErrorCode::ParseError, "(cos x)");
      return ScalarExpr::cos(args[0]);
    }
    if (op == "exp") {
      if (args.size() != 1) throw Error(ErrorCode::ParseError, "(exp x)");
      return ScalarExpr::exp(args[0]);
    }
    throw Error(ErrorCode::ParseError, "unknown operator: " + op);
  }
};

}  // namespace

ScalarExpr ScalarExpr::parse_sexpr(const std::string& text,
                                   const std::vector<std::string>& names) {
  Parser p{text, 0, names};
  ScalarExpr e = p.expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw Error(ErrorCode::ParseError, "trailing characters in expression");
  return e;
}

Sampler::Sampler(SampleBox box, unsigned long long seed)
    : box_(std::move(box)), seed_(seed), state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

std::vector<double> Sampler::next() {
  std::vector<double> out(box_.ranges.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    double u = static_cast<double>(z >> 11) / 9007199254740992.0;  // [0,1)
    out[i] = box_.ranges[i].first +
             u * (box_.ranges[i].second - box_.ranges[i].first);
  }
  return out;
}

IdentityResult expr_is_zero(const ScalarExpr& e, const SampleBox& box,
                            unsigned long long seed, int samples, double tol) {
  IdentityResult result;
  if (auto nf = e.normal_form()) {
    result.exact = true;
    if (nf->is_zero()) {
      result.verdict = TestVerdict::Equal;
      return result;
    }
    result.verdict = TestVerdict::NotEqual;
    // Find a concrete witness by sampling (the normal form is nonzero, so
    // one exists almost everywhere).
    Sampler sampler(box, seed);
    for (int i = 0; i < std::max(samples, 64); ++i) {
      auto p = sampler.next();
      double v = e.eval(p);
      if (std::isfinite(v) && std::abs(v) > tol) {
        result.witness = p;
        result.max_abs = std::abs(v);
        return result;
      }
    }
    return result;  // exact NotEqual even without a numeric witness
  }
  // Probabilistic route.
  Sampler sampler(box, seed);
  int valid = 0;
  for (int i = 0; i < samples; ++i) {
    auto p = sampler.next();
    double v = e.eval(p);
    if (!std::isfinite(v)) continue;
    ++valid;
    result.max_abs = std::max(result.max_abs, std::abs(v));
    if (std::abs(v) > tol * (1.0 + std::abs(v))) {
      result.verdict = TestVerdict::NotEqual;
      result.witness = p;
      return result;
    }
  }
  result.verdict =
      valid >= samples / 2 ? TestVerdict::Equal : TestVerdict::Unknown;
  return result;
}

}  // namespace carnot


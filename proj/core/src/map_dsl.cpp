#include "orbitlab/map_dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "orbitlab/errors.hpp"

namespace orbitlab {

namespace {

constexpr Complex kI{0.0, 1.0};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
  Parser(std::string_view text, const Bindings& params) : text_(text), params_(params) {}

  MapDef map() {
    MapDef m;
    m.domain = domain_header();
    m.params = params_;
    expect(':');
    num_vars_ = m.domain.dim;
    m.components = tuple(m.domain.dim);
    skip_ws();
    if (keyword("inverse")) m.inverse = tuple(m.domain.dim);
    end();
    return m;
  }

  Embedding embedding() {
    Embedding e;
    e.source = domain_header();
    e.params = params_;
    expect('-');
    expect('>');
    e.target = domain_header();
    expect(':');
    num_vars_ = e.source.dim;
    e.components = tuple(e.target.dim);
    end();
    return e;
  }

  Expr single(int num_vars) {
    num_vars_ = num_vars;
    Expr e = expr();
    end();
    return e;
  }

  std::vector<Expr> constant_tuple() {
    num_vars_ = 0;
    skip_ws();
    std::vector<Expr> out;
    if (peek() == '(') {
      // "(a, b)" is a tuple; "(a)" and "(a) + b" are single expressions
      const std::size_t start = pos_;
      ++pos_;
      out.push_back(expr());
      skip_ws();
      if (peek() == ',') {
        while (accept(',')) out.push_back(expr());
        expect(')');
        end();
        return out;
      }
      pos_ = start;
      out.clear();
    }
    out.push_back(expr());
    end();
    return out;
  }

private:
  [[noreturn]] void fail(ParseErrorKind kind, std::size_t at, const std::string& msg) const {
    throw ParseError(kind, at, msg);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      fail(ParseErrorKind::syntax, pos_,
           pos_ >= text_.size() ? std::string("unexpected end of input, expected '") + c + "'"
                                : std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void end() {
    skip_ws();
    if (pos_ != text_.size()) fail(ParseErrorKind::syntax, pos_, "unexpected trailing input");
  }

  std::string_view identifier() {
    skip_ws();
    const std::size_t start = pos_;
    if (!ident_start(peek())) return {};
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool keyword(std::string_view word) {
    skip_ws();
    const std::size_t start = pos_;
    if (identifier() == word) return true;
    pos_ = start;
    return false;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == text_.data() + pos_) {
      fail(ParseErrorKind::syntax, start, "expected an integer");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  Domain domain_header() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string_view kind_name = identifier();
    const auto kind = domain_kind_from_string(kind_name);
    if (!kind) fail(ParseErrorKind::invalid_domain, at, "unknown domain kind");
    skip_ws();
    const std::size_t dim_at = pos_;
    const int q = integer();
    try {
      return Domain::make(*kind, q);
    } catch (const DomainError& e) {
      fail(ParseErrorKind::invalid_domain, dim_at, e.what());
    }
  }

  std::vector<Expr> tuple(int expected) {
    skip_ws();
    const std::size_t at = pos_;
    expect('(');
    std::vector<Expr> out;
    out.push_back(expr());
    while (accept(',')) out.push_back(expr());
    expect(')');
    if (static_cast<int>(out.size()) != expected) {
      fail(ParseErrorKind::arity_mismatch, at,
           "expected " + std::to_string(expected) + " components, found " +
               std::to_string(out.size()));
    }
    return out;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = binary(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary_expr();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::mul, lhs, unary_expr());
      } else if (accept('/')) {
        lhs = binary(Op::div, lhs, unary_expr());
      } else {
        return lhs;
      }
    }
  }

  Expr unary_expr() {
    if (accept('-')) return unary(Op::neg, unary_expr());
    return power_expr();
  }

  Expr power_expr() {
    Expr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      ++pos_;
      skip_ws();
    }
    const std::size_t digits_at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    const bool fractional = end < text_.size() && (text_[end] == '.' || text_[end] == 'e' ||
                                                   text_[end] == 'E' || text_[end] == 'i');
    if (end == digits_at || fractional) {
      fail(ParseErrorKind::non_integer_exponent, at, "exponent must be an integer literal");
    }
    const int n = integer();
    return power(base, negative ? -n : n);
  }

  Expr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail(ParseErrorKind::syntax, start, "malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (peek() == 'i' && !(pos_ + 1 < text_.size() && ident_char(text_[pos_ + 1]))) {
      ++pos_;
      return literal(Complex(0.0, v));
    }
    return literal(Complex(v, 0.0));
  }

  Expr primary() {
    skip_ws();
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '\0') fail(ParseErrorKind::syntax, at, "unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (!ident_start(c)) fail(ParseErrorKind::syntax, at, std::string("unexpected '") + c + "'");

    const std::string_view name = identifier();
    if (name == "i") return literal(kI);
    if (name == "sqrt" || name == "exp" || name == "log") {
      const Op op = name == "sqrt" ? Op::sqrt : name == "exp" ? Op::exp : Op::log;
      expect('(');
      Expr arg = expr();
      skip_ws();
      if (peek() == ',') fail(ParseErrorKind::arity_mismatch, pos_, std::string(name) + " takes one argument");
      expect(')');
      return unary(op, arg);
    }
    if (auto it = params_.find(name); it != params_.end()) return param(std::string(name), it->second);
    if (name.size() >= 2 && name[0] == 'z') {
      int k = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (ec == std::errc() && ptr == name.data() + name.size() && name[1] != '0') {
        if (k < 1 || k > num_vars_) {
          fail(ParseErrorKind::unknown_identifier, at,
               "variable " + std::string(name) + " exceeds the dimension " + std::to_string(num_vars_));
        }
        return variable(k - 1);
      }
    }
    fail(ParseErrorKind::unknown_identifier, at, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  const Bindings& params_;
  std::size_t pos_ = 0;
  int num_vars_ = 0;
};

// ---------------------------------------------------------------- printing

int precedence(const Expr& e) {
  switch (e->op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::literal:
      if (e->value.real() != 0.0 && e->value.imag() != 0.0) return 1;
      if (e->value.real() < 0.0 || e->value.imag() < 0.0) return 3;
      return 5;
    default: return 5;
  }
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_literal(Complex v) {
  const double re = v.real(), im = v.imag();
  auto imag_part = [](double x) {
    if (x == 1.0) return std::string("i");
    if (x == -1.0) return std::string("-i");
    return format_real(x) + "i";
  };
  if (im == 0.0) return format_real(re);
  if (re == 0.0) return imag_part(im);
  std::string s = format_real(re);
  s += im < 0.0 ? " - " : " + ";
  s += imag_part(std::abs(im));
  return s;
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  const int p = precedence(e);
  switch (e->op) {
    case Op::literal: out += format_literal(e->value); return;
    case Op::param: out += e->name; return;
    case Op::variable: out += "z" + std::to_string(e->index + 1); return;
    case Op::neg:
      out += '-';
      print_wrapped(e->lhs, precedence(e->lhs) < 3, out);
      return;
    case Op::pow:
      print_wrapped(e->lhs, precedence(e->lhs) < 5, out);
      out += '^';
      out += std::to_string(e->index);
      return;
    case Op::sqrt:
    case Op::exp:
    case Op::log:
      out += e->op == Op::sqrt ? "sqrt(" : e->op == Op::exp ? "exp(" : "log(";
      print(e->lhs, out);
      out += ')';
      return;
    default: {
      const char* sym = e->op == Op::add ? " + " : e->op == Op::sub ? " - " : e->op == Op::mul ? "*" : "/";
      print_wrapped(e->lhs, precedence(e->lhs) < p, out);
      out += sym;
      print_wrapped(e->rhs, precedence(e->rhs) <= p, out);
      return;
    }
  }
}

std::string print_tuple(const std::vector<Expr>& es) {
  std::string s = "(";
  for (std::size_t k = 0; k < es.size(); ++k) {
    if (k) s += ", ";
    print(es[k], s);
  }
  return s + ")";
}

// -------------------------------------------------------------- evaluation

struct Dual {
  Complex v;
  Point d;
};

bool on_cut(Complex z) { return z.imag() == 0.0 && z.real() <= 0.0; }

Complex ipow(Complex base, int n) {
  if (n < 0) {
    if (base == 0.0) throw EvalError(EvalErrorKind::division_by_zero, "negative power of zero");
    return 1.0 / ipow(base, -n);
  }
  Complex result = 1.0;
  while (n) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

struct ValueOps {
  const Point& p;
  Complex constant(Complex c) const { return c; }
  Complex var(int k) const { return p[k]; }
  static Complex value(Complex x) { return x; }
  static Complex neg(Complex a) { return -a; }
  static Complex add(Complex a, Complex b) { return a + b; }
  static Complex sub(Complex a, Complex b) { return a - b; }
  static Complex mul(Complex a, Complex b) { return a * b; }
  static Complex div(Complex a, Complex b) { return a / b; }
  static Complex pow(Complex a, int n) { return ipow(a, n); }
  static Complex sqrt(Complex a) { return std::sqrt(a); }
  static Complex exp(Complex a) { return std::exp(a); }
  static Complex log(Complex a) { return std::log(a); }
};

struct DualOps {
  const Point& p;
  Dual constant(Complex c) const { return {c, Point::Zero(p.size())}; }
  Dual var(int k) const {
    Dual d{p[k], Point::Zero(p.size())};
    d.d[k] = 1.0;
    return d;
  }
  static Complex value(const Dual& x) { return x.v; }
  static Dual neg(const Dual& a) { return {-a.v, -a.d}; }
  static Dual add(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  static Dual sub(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  static Dual mul(const Dual& a, const Dual& b) { return {a.v * b.v, b.v * a.d + a.v * b.d}; }
  static Dual div(const Dual& a, const Dual& b) {
    const Complex q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  static Dual pow(const Dual& a, int n) {
    if (n == 0) return {1.0, Point::Zero(a.d.size())};
    return {ipow(a.v, n), (static_cast<double>(n) * ipow(a.v, n - 1)) * a.d};
  }
  static Dual sqrt(const Dual& a) {
    const Complex s = std::sqrt(a.v);
    return {s, a.d / (2.0 * s)};
  }
  static Dual exp(const Dual& a) {
    const Complex e = std::exp(a.v);
    return {e, e * a.d};
  }
  static Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
};

template <class Ops>
auto eval_node(const Expr& e, const Ops& ops) -> decltype(ops.constant(Complex{})) {
  switch (e->op) {
    case Op::literal:
    case Op::param: return ops.constant(e->value);
    case Op::variable: return ops.var(e->index);
    case Op::neg: return Ops::neg(eval_node(e->lhs, ops));
    case Op::add: return Ops::add(eval_node(e->lhs, ops), eval_node(e->rhs, ops));
    case Op::sub: return Ops::sub(eval_node(e->lhs, ops), eval_node(e->rhs, ops));
    case Op::mul: return Ops::mul(eval_node(e->lhs, ops), eval_node(e->rhs, ops));
    case Op::div: {
      auto num = eval_node(e->lhs, ops);
      auto den = eval_node(e->rhs, ops);
      if (Ops::value(den) == 0.0) throw EvalError(EvalErrorKind::division_by_zero, "division by zero");
      return Ops::div(num, den);
    }
    case Op::pow: {
      auto base = eval_node(e->lhs, ops);
      if (e->index < 0 && Ops::value(base) == 0.0) {
        throw EvalError(EvalErrorKind::division_by_zero, "negative power of zero");
      }
      return Ops::pow(base, e->index);
    }
    case Op::sqrt:
    case Op::log: {
      auto arg = eval_node(e->lhs, ops);
      if (on_cut(Ops::value(arg))) {
        throw EvalError(EvalErrorKind::branch_cut,
                        std::string(e->op == Op::sqrt ? "sqrt" : "log") + " evaluated on the branch cut");
      }
      return e->op == Op::sqrt ? Ops::sqrt(arg) : Ops::log(arg);
    }
    case Op::exp: return Ops::exp(eval_node(e->lhs, ops));
  }
  throw EvalError(EvalErrorKind::non_finite, "corrupt expression");
}

void check_arity(std::span<const Expr> exprs, const Point& p, int expected_vars) {
  if (p.size() != expected_vars) {
    throw DomainError("point has " + std::to_string(p.size()) + " coordinates, map expects " +
                      std::to_string(expected_vars));
  }
  (void)exprs;
}

}  // namespace

Expr literal(Complex v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::literal;
  n->value = v;
  return n;
}

Expr variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::variable;
  n->index = index;
  return n;
}

Expr param(std::string name, Complex value) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::param;
  n->name = std::move(name);
  n->value = value;
  return n;
}

Expr unary(Op op, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

Expr binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

Expr power(Expr base, int exponent) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::pow;
  n->lhs = std::move(base);
  n->index = exponent;
  return n;
}

MapDef parse_map(std::string_view text, const Bindings& params) {
  return Parser(text, params).map();
}

Embedding parse_embedding(std::string_view text, const Bindings& params) {
  return Parser(text, params).embedding();
}

Expr parse_expr(std::string_view text, int num_vars, const Bindings& params) {
  return Parser(text, params).single(num_vars);
}

Point parse_point(std::string_view text, const Bindings& params) {
  const auto exprs = Parser(text, params).constant_tuple();
  Point empty(0);
  Point out(static_cast<Eigen::Index>(exprs.size()));
  for (std::size_t k = 0; k < exprs.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = eval_node(exprs[k], ValueOps{empty});
  }
  return out;
}

std::string to_string(const Expr& e) {
  std::string s;
  print(e, s);
  return s;
}

std::string to_string(const MapDef& m) {
  std::string s = to_string(m.domain) + " : " + print_tuple(m.components);
  if (m.inverse) s += " inverse " + print_tuple(*m.inverse);
  return s;
}

std::string to_string(const Embedding& e) {
  return to_string(e.source) + " -> " + to_string(e.target) + " : " + print_tuple(e.components);
}

Point evaluate(std::span<const Expr> exprs, const Point& p) {
  Point out(static_cast<Eigen::Index>(exprs.size()));
  const ValueOps ops{p};
  for (std::size_t k = 0; k < exprs.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = eval_node(exprs[k], ops);
  }
  if (!out.allFinite()) throw EvalError(EvalErrorKind::non_finite, "non-finite map value");
  return out;
}

Jet evaluate_jet(std::span<const Expr> exprs, const Point& p) {
  const auto rows = static_cast<Eigen::Index>(exprs.size());
  Jet jet{Point(rows), Matrix(rows, p.size())};
  const DualOps ops{p};
  for (Eigen::Index k = 0; k < rows; ++k) {
    const Dual d = eval_node(exprs[static_cast<std::size_t>(k)], ops);
    jet.value[k] = d.v;
    jet.jacobian.row(k) = d.d.transpose();
  }
  if (!jet.value.allFinite() || !jet.jacobian.allFinite()) {
    throw EvalError(EvalErrorKind::non_finite, "non-finite map value or derivative");
  }
  return jet;
}

Point apply(const MapDef& m, const Point& p) {
  check_arity(m.components, p, m.domain.dim);
  return evaluate(m.components, p);
}

Jet eval_jet(const MapDef& m, const Point& p) {
  check_arity(m.components, p, m.domain.dim);
  return evaluate_jet(m.components, p);
}

Point apply_inverse(const MapDef& m, const Point& p) {
  if (!m.inverse) throw Error("map has no exact inverse");
  check_arity(*m.inverse, p, m.domain.dim);
  return evaluate(*m.inverse, p);
}

Jet eval_inverse_jet(const MapDef& m, const Point& p) {
  if (!m.inverse) throw Error("map has no exact inverse");
  check_arity(*m.inverse, p, m.domain.dim);
  return evaluate_jet(*m.inverse, p);
}

Point apply(const Embedding& g, const Point& p) {
  check_arity(g.components, p, g.source.dim);
  return evaluate(g.components, p);
}

}  // namespace orbitlab

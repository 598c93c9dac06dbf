#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orbitlab/geometry.hpp"

namespace orbitlab {

// Map grammar, version 1:
//
//   map       := kind dim ':' tuple [ 'inverse' tuple ]
//   embedding := kind dim '->' kind dim ':' tuple
//   tuple     := '(' expr { ',' expr } ')'
//   expr      := term { ('+' | '-') term }
//   term      := unary { ('*' | '/') unary }
//   unary     := '-' unary | power
//   power     := primary [ '^' ['-'] integer ]
//   primary   := number ['i'] | 'i' | 'z'k | name | fn '(' expr ')' | '(' expr ')'
//   fn        := 'sqrt' | 'exp' | 'log'          (principal branches)
//
// `kind` is one of disc, ball, polydisc, siegel, slitplane. Variables are
// z1..z<dim>; any other name must be supplied as a parameter binding.

inline constexpr int kGrammarVersion = 1;

enum class Op { literal, param, variable, neg, add, sub, mul, div, pow, sqrt, exp, log };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::literal;
  Complex value{};    // literal value, or the bound value of a parameter
  std::string name;   // parameter name
  int index = 0;      // variable index (0-based) or integer exponent
  Expr lhs;
  Expr rhs;
};

using Bindings = std::map<std::string, Complex, std::less<>>;

/// A holomorphic self-map given by one expression per coordinate, with an
/// optional exact inverse. Immutable once built.
struct MapDef {
  Domain domain;
  std::vector<Expr> components;
  std::optional<std::vector<Expr>> inverse;
  std::string name;
  Bindings params;
};

/// A holomorphic map between two (possibly different) domains.
struct Embedding {
  Domain source;
  Domain target;
  std::vector<Expr> components;
  Bindings params;
};

MapDef parse_map(std::string_view text, const Bindings& params = {});
Embedding parse_embedding(std::string_view text, const Bindings& params = {});
Expr parse_expr(std::string_view text, int num_vars, const Bindings& params = {});
/// A constant tuple "(e1, ..., eq)" or a single constant expression.
Point parse_point(std::string_view text, const Bindings& params = {});

std::string to_string(const Expr& e);
std::string to_string(const MapDef& m);
std::string to_string(const Embedding& e);

struct Jet {
  Point value;
  Matrix jacobian;  // jacobian(i, j) = d f_i / d z_j
};

Point evaluate(std::span<const Expr> exprs, const Point& p);
Jet evaluate_jet(std::span<const Expr> exprs, const Point& p);

Point apply(const MapDef& m, const Point& p);
Jet eval_jet(const MapDef& m, const Point& p);
Point apply_inverse(const MapDef& m, const Point& p);
Jet eval_inverse_jet(const MapDef& m, const Point& p);

Point apply(const Embedding& g, const Point& p);

// Builders for programmatic construction.
Expr literal(Complex v);
Expr variable(int index);
Expr param(std::string name, Complex value);
Expr unary(Op op, Expr a);
Expr binary(Op op, Expr a, Expr b);
Expr power(Expr base, int exponent);

}  // namespace orbitlab

#pragma once

// A small expression language for metric functions, vector fields and domain
// guards over the chart variables x1..xn, y1..yn.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' literal)?
//   literal := ['-'] number | '(' ['-'] number ')'
//   primary := number | x<k> | y<k> | 'sqrt' '(' expr ')' | '(' expr ')'
//
// Evaluation is generic over the scalar: plain doubles give values, jets give
// derivatives.

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler::expr {

enum class Op { Literal, Variable, Neg, Add, Sub, Mul, Div, Pow, Sqrt };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double value = 0.0;  // literal value, or the exponent of Pow
  int variable = -1;   // 0-based chart slot: x_k -> k-1, y_k -> n+k-1
  int dimension = 0;
  Ast lhs;
  Ast rhs;
  std::size_t offset = 0;
};

/// Parses `text` for a chart of the given dimension.
Ast parse(std::string_view text, int dimension);

/// Canonical text form; parse(to_string(a)) is structurally equal to a.
std::string to_string(const Ast& ast);

bool structurally_equal(const Ast& a, const Ast& b);

/// True if any y-variable occurs in `ast`.
bool depends_on_direction(const Ast& ast);

namespace detail {
std::string annotate(const std::string& message, const Node& node);
}

/// Structural evaluation. `env` holds the 2n chart variables, x first.
template <class Scalar>
Scalar eval(const Ast& ast, std::span<const Scalar> env) {
  const Node& node = *ast;
  switch (node.op) {
    case Op::Literal:
      return constant_like(env[0], node.value);
    case Op::Variable:
      return env[node.variable];
    case Op::Neg:
      return -eval(node.lhs, env);
    case Op::Add:
      return eval(node.lhs, env) + eval(node.rhs, env);
    case Op::Sub:
      return eval(node.lhs, env) - eval(node.rhs, env);
    case Op::Mul:
      return eval(node.lhs, env) * eval(node.rhs, env);
    default:
      break;
  }
  Scalar lhs = eval(node.lhs, env);
  try {
    switch (node.op) {
      case Op::Div: {
        Scalar rhs = eval(node.rhs, env);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (rhs == 0.0) throw DivisionBySingularJet("division by zero");
        }
        return lhs / rhs;
      }
      case Op::Sqrt:
        if constexpr (std::is_same_v<Scalar, double>) {
          if (!(lhs > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(lhs));
          return std::sqrt(lhs);
        } else {
          return sqrt(lhs);
        }
      case Op::Pow:
        if constexpr (std::is_same_v<Scalar, double>) {
          const bool integral = std::floor(node.value) == node.value;
          if (lhs < 0.0 && !integral)
            throw DomainError("fractional power of negative value " + std::to_string(lhs));
          if (lhs == 0.0 && !(integral && node.value >= 0)) {
            if (integral) throw DivisionBySingularJet("negative power of zero");
            throw DomainError("fractional power of zero");
          }
          return std::pow(lhs, node.value);
        } else {
          return pow(lhs, node.value);
        }
      default:
        break;
    }
  } catch (const DivisionBySingularJet& e) {
    throw DivisionBySingularJet(detail::annotate(e.what(), node));
  } catch (const DomainError& e) {
    throw DomainError(detail::annotate(e.what(), node));
  }
  throw Error("corrupt expression node");
}

template <class Scalar>
Scalar eval(const Ast& ast, const std::vector<Scalar>& env) {
  return eval(ast, std::span<const Scalar>(env));
}

/// Strict-positivity domain constraint.
struct Guard {
  Ast expr;
  std::string text;
};

Guard parse_guard(std::string_view text, int dimension);

}  // namespace finsler::expr

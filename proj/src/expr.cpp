#include "finsler/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace finsler::expr {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dim_(dimension) {}

  Ast parse_all() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
    Ast e = expression();
    skip_space();
    if (pos_ < text_.size()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw SyntaxError(std::string("expected '") + c + "' before end of input", pos_);
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::shared_ptr<Node> make(Op op, std::size_t offset, Ast lhs = nullptr, Ast rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->offset = offset;
    n->dimension = dim_;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  Ast expression() {
    Ast lhs = term();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('+'))
        lhs = make(Op::Add, at, lhs, term());
      else if (accept('-'))
        lhs = make(Op::Sub, at, lhs, term());
      else
        return lhs;
    }
  }

  Ast term() {
    Ast lhs = unary();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('*'))
        lhs = make(Op::Mul, at, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::Div, at, lhs, unary());
      else
        return lhs;
    }
  }

  Ast unary() {
    skip_space();
    std::size_t at = pos_;
    if (accept('-')) return make(Op::Neg, at, unary());
    return power();
  }

  Ast power() {
    Ast base = primary();
    skip_space();
    std::size_t at = pos_;
    if (!accept('^')) return base;
    auto node = std::make_shared<Node>();
    node->op = Op::Pow;
    node->offset = at;
    node->dimension = dim_;
    node->lhs = base;
    node->value = exponent_literal();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '^')
      throw SyntaxError("chained '^' is ambiguous; parenthesize the base", pos_);
    return node;
  }

  double exponent_literal() {
    skip_space();
    std::size_t start = pos_;
    bool paren = accept('(');
    bool negative = accept('-');
    skip_space();
    if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      if (pos_ >= text_.size()) throw SyntaxError("missing exponent", pos_);
      throw NonLiteralExponent("exponent must be a numeric literal at offset " + std::to_string(start));
    }
    double v = number();
    if (paren) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] != ')')
        throw NonLiteralExponent("exponent must be a numeric literal at offset " + std::to_string(start));
      expect(')');
    }
    return negative ? -v : v;
  }

  double number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw SyntaxError("malformed number", start);
    return v;
  }

  Ast primary() {
    skip_space();
    std::size_t at = pos_;
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = make(Op::Literal, at);
      n->value = number();
      return n;
    }
    if (c == '(') {
      ++pos_;
      Ast inner = expression();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "sqrt") {
        expect('(');
        Ast arg = expression();
        expect(')');
        return make(Op::Sqrt, at, arg);
      }
      return variable(ident, start);
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  Ast variable(std::string_view ident, std::size_t at) {
    auto unknown = [&] {
      return UnknownIdentifier("unknown identifier '" + std::string(ident) + "' at offset " +
                               std::to_string(at) + " (dimension " + std::to_string(dim_) + ")");
    };
    if (ident.size() < 2 || (ident[0] != 'x' && ident[0] != 'y')) throw unknown();
    int k = 0;
    auto [ptr, ec] = std::from_chars(ident.data() + 1, ident.data() + ident.size(), k);
    if (ec != std::errc() || ptr != ident.data() + ident.size() || ident[1] == '0' || k < 1 || k > dim_)
      throw unknown();
    auto n = make(Op::Variable, at);
    n->variable = (ident[0] == 'x' ? 0 : dim_) + k - 1;
    return n;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
  const int p = precedence(n.op);
  switch (n.op) {
    case Op::Literal:
      out += format_number(n.value);
      return;
    case Op::Variable:
      out += n.variable < n.dimension ? 'x' : 'y';
      out += std::to_string(n.variable % n.dimension + 1);
      return;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, precedence(n.lhs->op) < p, out);
      return;
    case Op::Sqrt:
      out += "sqrt(";
      print(*n.lhs, out);
      out += ')';
      return;
    case Op::Pow:
      print_child(*n.lhs, precedence(n.lhs->op) <= p, out);
      out += '^';
      if (n.value < 0)
        out += "(" + format_number(n.value) + ")";
      else
        out += format_number(n.value);
      return;
    default: {
      const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      print_child(*n.lhs, precedence(n.lhs->op) < p, out);
      out += sym;
      print_child(*n.rhs, precedence(n.rhs->op) <= p, out);
      return;
    }
  }
}

}  // namespace

Ast parse(std::string_view text, int dimension) {
  if (dimension < 1) throw UnknownIdentifier("dimension must be positive");
  return Parser(text, dimension).parse_all();
}

std::string to_string(const Ast& ast) {
  std::string out;
  print(*ast, out);
  return out;
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Literal:
      return a->value == b->value;
    case Op::Variable:
      return a->variable == b->variable && a->dimension == b->dimension;
    case Op::Pow:
      return a->value == b->value && structurally_equal(a->lhs, b->lhs);
    default:
      return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

bool depends_on_direction(const Ast& ast) {
  if (!ast) return false;
  if (ast->op == Op::Variable) return ast->variable >= ast->dimension;
  return depends_on_direction(ast->lhs) || depends_on_direction(ast->rhs);
}

namespace detail {
std::string annotate(const std::string& message, const Node& node) {
  std::string sub;
  print(node, sub);
  return message + " in '" + sub + "'";
}
}  // namespace detail

Guard parse_guard(std::string_view text, int dimension) {
  return Guard{parse(text, dimension), std::string(text)};
}

}  // namespace finsler::expr

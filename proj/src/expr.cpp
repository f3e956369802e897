#include "logds/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace logds {

namespace {

struct Token {
  enum class Type { Number, Ident, Op, LParen, RParen, Comma, End };
  Type type = Type::End;
  double number = 0.0;
  std::string ident;
  char op = 0;
  std::size_t offset = 0;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::End;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      const char* end = src_.data() + src_.size();
      double value = 0.0;
      auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc()) throw ExprError(pos_, "invalid number");
      tok_.type = Token::Type::Number;
      tok_.number = value;
      pos_ += static_cast<std::size_t>(res.ptr - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.type = Token::Type::Ident;
      tok_.ident = src_.substr(start, pos_ - start);
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        tok_.type = Token::Type::Op;
        tok_.op = c;
        break;
      case '(':
        tok_.type = Token::Type::LParen;
        break;
      case ')':
        tok_.type = Token::Type::RParen;
        break;
      case ',':
        tok_.type = Token::Type::Comma;
        break;
      default:
        throw ExprError(pos_, std::string("unexpected character '") + c + "'");
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token tok_;
};

ExprPtr make_node(ExprNode::Kind kind) {
  auto n = std::make_unique<ExprNode>();
  n->kind = kind;
  return n;
}

ExprPtr make_binary(ExprNode::Kind kind, ExprPtr lhs, ExprPtr rhs) {
  auto n = make_node(kind);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// Grammar:
//   expr  := term  (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?          (right-associative)
//   atom  := number | ident | ident '(' args ')' | '(' expr ')'
class Parser {
public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End)
      throw ExprError(t.offset, "unexpected trailing input");
    return e;
  }

private:
  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    while (lex_.peek().type == Token::Type::Op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      char op = lex_.take().op;
      ExprPtr rhs = parse_term();
      lhs = make_binary(op == '+' ? ExprNode::Kind::Add : ExprNode::Kind::Sub,
                        std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (lex_.peek().type == Token::Type::Op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      char op = lex_.take().op;
      ExprPtr rhs = parse_unary();
      lhs = make_binary(op == '*' ? ExprNode::Kind::Mul : ExprNode::Kind::Div,
                        std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (lex_.peek().type == Token::Type::Op && lex_.peek().op == '-') {
      lex_.take();
      auto n = make_node(ExprNode::Kind::Neg);
      n->lhs = parse_unary();
      return n;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (lex_.peek().type == Token::Type::Op && lex_.peek().op == '^') {
      lex_.take();
      ExprPtr exponent = parse_unary();  // right-assoc, allows x^-2
      return make_binary(ExprNode::Kind::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  ExprPtr parse_atom() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::Type::Number: {
        auto n = make_node(ExprNode::Kind::Constant);
        n->value = t.number;
        return n;
      }
      case Token::Type::Ident:
        return parse_ident(t);
      case Token::Type::LParen: {
        ExprPtr e = parse_sum();
        expect_rparen(t.offset);
        return e;
      }
      default:
        throw ExprError(t.offset, "expected number, identifier, or '('");
    }
  }

  ExprPtr parse_ident(const Token& t) {
    static const std::map<std::string, ExprNode::Kind> unary_fns = {
        {"sin", ExprNode::Kind::Sin}, {"cos", ExprNode::Kind::Cos},
        {"exp", ExprNode::Kind::Exp}, {"log", ExprNode::Kind::Log},
        {"abs", ExprNode::Kind::Abs}};
    static const std::map<std::string, ExprNode::Kind> binary_fns = {
        {"max", ExprNode::Kind::Max}, {"min", ExprNode::Kind::Min}};

    if (auto it = unary_fns.find(t.ident); it != unary_fns.end()) {
      expect_lparen(t.offset, t.ident);
      auto n = make_node(it->second);
      n->lhs = parse_sum();
      expect_rparen(t.offset);
      return n;
    }
    if (auto it = binary_fns.find(t.ident); it != binary_fns.end()) {
      expect_lparen(t.offset, t.ident);
      auto n = make_node(it->second);
      n->lhs = parse_sum();
      if (lex_.peek().type != Token::Type::Comma)
        throw ExprError(lex_.peek().offset, t.ident + " expects two arguments");
      lex_.take();
      n->rhs = parse_sum();
      expect_rparen(t.offset);
      return n;
    }
    // Variable: x<k> with k >= 1.
    if (t.ident.size() >= 2 && t.ident[0] == 'x') {
      int idx = 0;
      auto res = std::from_chars(t.ident.data() + 1, t.ident.data() + t.ident.size(), idx);
      if (res.ec == std::errc() && res.ptr == t.ident.data() + t.ident.size() && idx >= 1) {
        auto n = make_node(ExprNode::Kind::Variable);
        n->var_index = idx;
        return n;
      }
    }
    throw ExprError(t.offset, "unknown identifier '" + t.ident + "'");
  }

  void expect_lparen(std::size_t at, const std::string& fn) {
    if (lex_.peek().type != Token::Type::LParen)
      throw ExprError(at, "function '" + fn + "' requires '('");
    lex_.take();
  }

  void expect_rparen(std::size_t opened_at) {
    if (lex_.peek().type != Token::Type::RParen)
      throw ExprError(lex_.peek().offset,
                      "expected ')' for group opened at offset " + std::to_string(opened_at));
    lex_.take();
  }

  Lexer lex_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExprPtr parse_expr(const std::string& src) { return Parser(src).parse(); }

double eval_expr(const ExprNode& ast, const Eigen::VectorXd& x) {
  switch (ast.kind) {
    case ExprNode::Kind::Constant:
      return ast.value;
    case ExprNode::Kind::Variable: {
      if (ast.var_index < 1 || ast.var_index > x.size())
        throw std::out_of_range("variable x" + std::to_string(ast.var_index) +
                                " out of range for dimension " + std::to_string(x.size()));
      return x[ast.var_index - 1];
    }
    case ExprNode::Kind::Add:
      return eval_expr(*ast.lhs, x) + eval_expr(*ast.rhs, x);
    case ExprNode::Kind::Sub:
      return eval_expr(*ast.lhs, x) - eval_expr(*ast.rhs, x);
    case ExprNode::Kind::Mul:
      return eval_expr(*ast.lhs, x) * eval_expr(*ast.rhs, x);
    case ExprNode::Kind::Div:
      return eval_expr(*ast.lhs, x) / eval_expr(*ast.rhs, x);
    case ExprNode::Kind::Pow:
      return std::pow(eval_expr(*ast.lhs, x), eval_expr(*ast.rhs, x));
    case ExprNode::Kind::Neg:
      return -eval_expr(*ast.lhs, x);
    case ExprNode::Kind::Sin:
      return std::sin(eval_expr(*ast.lhs, x));
    case ExprNode::Kind::Cos:
      return std::cos(eval_expr(*ast.lhs, x));
    case ExprNode::Kind::Exp:
      return std::exp(eval_expr(*ast.lhs, x));
    case ExprNode::Kind::Log: {
      double v = eval_expr(*ast.lhs, x);
      // Nonpositive arguments map to NaN (the merit layer turns NaN into +inf).
      return v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
    }
    case ExprNode::Kind::Abs:
      return std::fabs(eval_expr(*ast.lhs, x));
    case ExprNode::Kind::Max:
      return std::fmax(eval_expr(*ast.lhs, x), eval_expr(*ast.rhs, x));
    case ExprNode::Kind::Min:
      return std::fmin(eval_expr(*ast.lhs, x), eval_expr(*ast.rhs, x));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string pretty_print(const ExprNode& ast) {
  switch (ast.kind) {
    case ExprNode::Kind::Constant:
      return format_double(ast.value);
    case ExprNode::Kind::Variable:
      return "x" + std::to_string(ast.var_index);
    case ExprNode::Kind::Add:
      return "(" + pretty_print(*ast.lhs) + " + " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Sub:
      return "(" + pretty_print(*ast.lhs) + " - " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Mul:
      return "(" + pretty_print(*ast.lhs) + " * " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Div:
      return "(" + pretty_print(*ast.lhs) + " / " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Pow:
      return "(" + pretty_print(*ast.lhs) + " ^ " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Neg:
      return "(-" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Sin:
      return "sin(" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Cos:
      return "cos(" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Exp:
      return "exp(" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Log:
      return "log(" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Abs:
      return "abs(" + pretty_print(*ast.lhs) + ")";
    case ExprNode::Kind::Max:
      return "max(" + pretty_print(*ast.lhs) + ", " + pretty_print(*ast.rhs) + ")";
    case ExprNode::Kind::Min:
      return "min(" + pretty_print(*ast.lhs) + ", " + pretty_print(*ast.rhs) + ")";
  }
  return "";
}

bool expr_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::Constant:
      // Exact bit-level comparison; pretty_print round-trips doubles.
      return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case ExprNode::Kind::Variable:
      return a.var_index == b.var_index;
    default:
      break;
  }
  if ((a.lhs == nullptr) != (b.lhs == nullptr)) return false;
  if ((a.rhs == nullptr) != (b.rhs == nullptr)) return false;
  if (a.lhs && !expr_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !expr_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

int max_var_index(const ExprNode& ast) {
  int idx = ast.kind == ExprNode::Kind::Variable ? ast.var_index : 0;
  if (ast.lhs) idx = std::max(idx, max_var_index(*ast.lhs));
  if (ast.rhs) idx = std::max(idx, max_var_index(*ast.rhs));
  return idx;
}

ExprPtr clone_expr(const ExprNode& ast) {
  auto n = std::make_unique<ExprNode>();
  n->kind = ast.kind;
  n->value = ast.value;
  n->var_index = ast.var_index;
  if (ast.lhs) n->lhs = clone_expr(*ast.lhs);
  if (ast.rhs) n->rhs = clone_expr(*ast.rhs);
  return n;
}

}  // namespace logds

#include "avglab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace avglab {

std::string_view to_string(ExprFunc f) {
  switch (f) {
    case ExprFunc::Sin: return "sin";
    case ExprFunc::Cos: return "cos";
    case ExprFunc::Exp: return "exp";
    case ExprFunc::Log: return "log";
    case ExprFunc::Sqrt: return "sqrt";
    case ExprFunc::Abs: return "abs";
  }
  return "?";
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  double number = 0.0;
  std::string text;
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
      tok_.kind = Tok::End;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.kind = Tok::Plus; ++pos_; return;
      case '-': tok_.kind = Tok::Minus; ++pos_; return;
      case '*': tok_.kind = Tok::Star; ++pos_; return;
      case '/': tok_.kind = Tok::Slash; ++pos_; return;
      case '^': tok_.kind = Tok::Caret; ++pos_; return;
      case '(': tok_.kind = Tok::LParen; ++pos_; return;
      case ')': tok_.kind = Tok::RParen; ++pos_; return;
      case ',': tok_.kind = Tok::Comma; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    throw ParseError(ParseErrorKind::UnexpectedToken, pos_,
                     std::string("unexpected character '") + c + "'");
  }

  void lex_number() {
    std::size_t end = pos_;
    bool saw_digit = false;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
      ++end;
      saw_digit = true;
    }
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
        saw_digit = true;
      }
    }
    if (!saw_digit) throw ParseError(ParseErrorKind::BadNumber, pos_, "malformed number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[e])))
        throw ParseError(ParseErrorKind::BadNumber, pos_, "malformed exponent");
      while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
      end = e;
    }
    const std::string slice = src_.substr(pos_, end - pos_);
    char* endp = nullptr;
    const double v = std::strtod(slice.c_str(), &endp);
    if (endp != slice.c_str() + slice.size())
      throw ParseError(ParseErrorKind::BadNumber, pos_, "malformed number");
    tok_.kind = Tok::Number;
    tok_.number = v;
    pos_ = end;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token tok_;
};

ExprPtr make_node(ExprNodeKind kind) {
  auto n = std::make_unique<ExprNode>();
  n->kind = kind;
  return n;
}

std::optional<ExprFunc> func_from_name(const std::string& s) {
  for (ExprFunc f :
       {ExprFunc::Sin, ExprFunc::Cos, ExprFunc::Exp, ExprFunc::Log, ExprFunc::Sqrt, ExprFunc::Abs})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

/// Strict "x<digits>" / "xd<digits>" component reference, 1-based.
std::optional<int> parse_component_ref(const std::string& s, std::size_t prefix_len) {
  if (s.size() <= prefix_len) return std::nullopt;
  long v = 0;
  for (std::size_t i = prefix_len; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    v = v * 10 + (s[i] - '0');
    if (v > 1'000'000) return std::nullopt;
  }
  return static_cast<int>(v);
}

class Parser {
 public:
  Parser(const std::string& src, int dim, bool allow_delayed, const std::string& time_var)
      : lex_(src), dim_(dim), allow_delayed_(allow_delayed), time_var_(time_var) {}

  ParsedExpr parse() {
    ParsedExpr out;
    out.root = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind == Tok::RParen)
      throw ParseError(ParseErrorKind::UnbalancedParens, t.offset, "unmatched ')'");
    if (t.kind != Tok::End)
      throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "trailing input");
    out.uses_time = uses_time_;
    out.uses_delayed = uses_delayed_;
    return out;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr node = parse_term();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      const Token op = lex_.take();
      auto parent = make_node(op.kind == Tok::Plus ? ExprNodeKind::Add : ExprNodeKind::Sub);
      parent->lhs = std::move(node);
      parent->rhs = parse_term();
      node = std::move(parent);
    }
    return node;
  }

  ExprPtr parse_term() {
    ExprPtr node = parse_unary();
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      const Token op = lex_.take();
      auto parent = make_node(op.kind == Tok::Star ? ExprNodeKind::Mul : ExprNodeKind::Div);
      parent->lhs = std::move(node);
      parent->rhs = parse_unary();
      node = std::move(parent);
    }
    return node;
  }

  ExprPtr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      auto node = make_node(ExprNodeKind::Neg);
      node->lhs = parse_unary();
      return node;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      auto node = make_node(ExprNodeKind::Pow);
      node->lhs = std::move(base);
      node->rhs = parse_unary();  // right-associative; exponent may be signed
      return node;
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number: {
        auto node = make_node(ExprNodeKind::Number);
        node->number = t.number;
        return node;
      }
      case Tok::LParen: {
        ExprPtr inner = parse_expr();
        expect_rparen(t.offset);
        return inner;
      }
      case Tok::Ident:
        return parse_ident(t);
      case Tok::End:
        throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "unexpected end of input");
      case Tok::RParen:
        throw ParseError(ParseErrorKind::UnbalancedParens, t.offset, "unmatched ')'");
      default:
        throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "expected a value here");
    }
  }

  ExprPtr parse_ident(const Token& t) {
    if (t.text == time_var_) {
      uses_time_ = true;
      return make_node(ExprNodeKind::TimeVar);
    }
    if (t.text == "pi") {
      auto node = make_node(ExprNodeKind::Number);
      node->number = std::numbers::pi;
      return node;
    }
    if (auto f = func_from_name(t.text)) {
      const Token open = lex_.take();
      if (open.kind != Tok::LParen)
        throw ParseError(ParseErrorKind::ArityMismatch, open.offset,
                         t.text + " expects exactly one parenthesized argument");
      if (lex_.peek().kind == Tok::RParen)
        throw ParseError(ParseErrorKind::ArityMismatch, lex_.peek().offset,
                         t.text + " expects exactly one argument, got none");
      auto node = make_node(ExprNodeKind::Call);
      node->func = *f;
      node->lhs = parse_expr();
      if (lex_.peek().kind == Tok::Comma)
        throw ParseError(ParseErrorKind::ArityMismatch, lex_.peek().offset,
                         t.text + " expects exactly one argument");
      expect_rparen(open.offset);
      return node;
    }
    if (t.text.size() >= 2 && t.text[0] == 'x' && t.text[1] == 'd') {
      if (auto k = parse_component_ref(t.text, 2)) {
        if (!allow_delayed_)
          throw ParseError(ParseErrorKind::DelayedVarNotAllowed, t.offset,
                           "delayed variable '" + t.text + "' is not allowed in this field");
        if (*k < 1 || *k > dim_)
          throw ParseError(ParseErrorKind::UnknownIdentifier, t.offset,
                           "unknown identifier '" + t.text + "' (d = " + std::to_string(dim_) +
                               ")");
        uses_delayed_ = true;
        auto node = make_node(ExprNodeKind::DelayedVar);
        node->index = *k;
        return node;
      }
    }
    if (!t.text.empty() && t.text[0] == 'x') {
      if (auto k = parse_component_ref(t.text, 1)) {
        if (*k < 1 || *k > dim_)
          throw ParseError(ParseErrorKind::UnknownIdentifier, t.offset,
                           "unknown identifier '" + t.text + "' (d = " + std::to_string(dim_) +
                               ")");
        auto node = make_node(ExprNodeKind::StateVar);
        node->index = *k;
        return node;
      }
    }
    throw ParseError(ParseErrorKind::UnknownIdentifier, t.offset,
                     "unknown identifier '" + t.text + "'");
  }

  void expect_rparen(std::size_t open_offset) {
    const Token& t = lex_.peek();
    if (t.kind == Tok::RParen) {
      lex_.take();
      return;
    }
    if (t.kind == Tok::End)
      throw ParseError(ParseErrorKind::UnbalancedParens, t.offset,
                       "missing ')' for '(' at byte " + std::to_string(open_offset));
    throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "expected ')'");
  }

  Lexer lex_;
  int dim_;
  bool allow_delayed_;
  std::string time_var_;
  bool uses_time_ = false;
  bool uses_delayed_ = false;
};

int precedence(ExprNodeKind k) {
  switch (k) {
    case ExprNodeKind::Add:
    case ExprNodeKind::Sub: return 1;
    case ExprNodeKind::Mul:
    case ExprNodeKind::Div: return 2;
    case ExprNodeKind::Neg: return 3;
    case ExprNodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const ExprNode& e, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out.push_back('(');
  print_node(child, out);
  if (parens) out.push_back(')');
}

void print_node(const ExprNode& e, std::string& out) {
  switch (e.kind) {
    case ExprNodeKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      return;
    }
    case ExprNodeKind::TimeVar: out += "t"; return;
    case ExprNodeKind::StateVar: out += "x" + std::to_string(e.index); return;
    case ExprNodeKind::DelayedVar: out += "xd" + std::to_string(e.index); return;
    case ExprNodeKind::Neg:
      out.push_back('-');
      print_child(*e.lhs, precedence(e.lhs->kind) < 3, out);
      return;
    case ExprNodeKind::Call:
      out += to_string(e.func);
      out.push_back('(');
      print_node(*e.lhs, out);
      out.push_back(')');
      return;
    case ExprNodeKind::Pow:
      print_child(*e.lhs, precedence(e.lhs->kind) <= 4, out);
      out.push_back('^');
      print_child(*e.rhs, precedence(e.rhs->kind) < 3, out);
      return;
    default: break;
  }
  const int p = precedence(e.kind);
  const char op = e.kind == ExprNodeKind::Add   ? '+'
                  : e.kind == ExprNodeKind::Sub ? '-'
                  : e.kind == ExprNodeKind::Mul ? '*'
                                                : '/';
  print_child(*e.lhs, precedence(e.lhs->kind) < p, out);
  out.push_back(' ');
  out.push_back(op);
  out.push_back(' ');
  print_child(*e.rhs, precedence(e.rhs->kind) <= p, out);
}

}  // namespace

ParsedExpr parse_field_expr(const std::string& src, int dim, bool allow_delayed,
                            const std::string& time_var) {
  if (dim < 0) throw ConfigError("expression dimension must be >= 0");
  return Parser(src, dim, allow_delayed, time_var).parse();
}

double eval_expr(const ExprNode& e, double t, const StateVec& x, const StateVec& xd) {
  switch (e.kind) {
    case ExprNodeKind::Number: return e.number;
    case ExprNodeKind::TimeVar: return t;
    case ExprNodeKind::StateVar: return x[e.index - 1];
    case ExprNodeKind::DelayedVar: return xd[e.index - 1];
    case ExprNodeKind::Neg: return -eval_expr(*e.lhs, t, x, xd);
    case ExprNodeKind::Add: return eval_expr(*e.lhs, t, x, xd) + eval_expr(*e.rhs, t, x, xd);
    case ExprNodeKind::Sub: return eval_expr(*e.lhs, t, x, xd) - eval_expr(*e.rhs, t, x, xd);
    case ExprNodeKind::Mul: return eval_expr(*e.lhs, t, x, xd) * eval_expr(*e.rhs, t, x, xd);
    case ExprNodeKind::Div: return eval_expr(*e.lhs, t, x, xd) / eval_expr(*e.rhs, t, x, xd);
    case ExprNodeKind::Pow:
      return std::pow(eval_expr(*e.lhs, t, x, xd), eval_expr(*e.rhs, t, x, xd));
    case ExprNodeKind::Call: {
      const double v = eval_expr(*e.lhs, t, x, xd);
      switch (e.func) {
        case ExprFunc::Sin: return std::sin(v);
        case ExprFunc::Cos: return std::cos(v);
        case ExprFunc::Exp: return std::exp(v);
        case ExprFunc::Log: return std::log(v);
        case ExprFunc::Sqrt: return std::sqrt(v);
        case ExprFunc::Abs: return std::fabs(v);
      }
      break;
    }
  }
  throw InternalError("unknown expression node");
}

std::string pretty_print(const ExprNode& e) {
  std::string out;
  print_node(e, out);
  return out;
}

ExprPtr clone_expr(const ExprNode& e) {
  auto n = std::make_unique<ExprNode>();
  n->kind = e.kind;
  n->number = e.number;
  n->index = e.index;
  n->func = e.func;
  if (e.lhs) n->lhs = clone_expr(*e.lhs);
  if (e.rhs) n->rhs = clone_expr(*e.rhs);
  return n;
}

bool expr_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNodeKind::Number:
      return a.number == b.number || (std::isnan(a.number) && std::isnan(b.number));
    case ExprNodeKind::TimeVar: return true;
    case ExprNodeKind::StateVar:
    case ExprNodeKind::DelayedVar: return a.index == b.index;
    case ExprNodeKind::Call:
      return a.func == b.func && expr_equal(*a.lhs, *b.lhs);
    case ExprNodeKind::Neg: return expr_equal(*a.lhs, *b.lhs);
    default: return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
  }
}

FieldSpec make_expr_field(const std::vector<std::string>& components, double r,
                          std::optional<double> period) {
  if (components.empty()) throw ConfigError("field needs at least one component expression");
  const int dim = static_cast<int>(components.size());
  auto parsed = std::make_shared<std::vector<ParsedExpr>>();
  bool any_delayed = false;
  for (const auto& src : components) {
    parsed->push_back(parse_field_expr(src, dim, /*allow_delayed=*/r > 0.0));
    any_delayed = any_delayed || parsed->back().uses_delayed;
  }
  if (!any_delayed) {
    return FieldSpec::make_pointwise(
        dim,
        [parsed, dim](double t, const StateVec& x) {
          StateVec out(dim);
          const StateVec none;
          for (int i = 0; i < dim; ++i) out[i] = eval_expr(*(*parsed)[i].root, t, x, none);
          return out;
        },
        period);
  }
  return FieldSpec::make_pointwise_delay(
      dim, r, {r},
      [parsed, dim](double t, const StateVec& x, const std::vector<StateVec>& delayed) {
        StateVec out(dim);
        for (int i = 0; i < dim; ++i) out[i] = eval_expr(*(*parsed)[i].root, t, x, delayed[0]);
        return out;
      },
      period);
}

}  // namespace avglab

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avglab/errors.hpp"
#include "avglab/field.hpp"
#include "avglab/types.hpp"

namespace avglab {

enum class ExprNodeKind { Number, TimeVar, StateVar, DelayedVar, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class ExprFunc { Sin, Cos, Exp, Log, Sqrt, Abs };

[[nodiscard]] std::string_view to_string(ExprFunc f);

/// One node of a parsed scalar expression. Binary nodes use lhs/rhs, Neg and
/// Call use lhs only. StateVar/DelayedVar indices are 1-based components.
struct ExprNode {
  ExprNodeKind kind = ExprNodeKind::Number;
  double number = 0.0;
  int index = 0;
  ExprFunc func = ExprFunc::Sin;
  std::unique_ptr<ExprNode> lhs;
  std::unique_ptr<ExprNode> rhs;
};

using ExprPtr = std::unique_ptr<ExprNode>;

enum class ParseErrorKind {
  UnknownIdentifier,
  ArityMismatch,
  UnbalancedParens,
  DelayedVarNotAllowed,
  BadNumber,
  UnexpectedToken,
};

/// Parse failure at a byte offset of the source text.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
      : Error(what + " (byte " + std::to_string(offset) + ")"), kind(kind), offset(offset) {}
  ParseErrorKind kind;
  std::size_t offset;
};

struct ParsedExpr {
  ExprPtr root;
  bool uses_time = false;
  bool uses_delayed = false;
};

/// Recursive-descent parse of one scalar component.
///
/// Grammar (README carries the same EBNF):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          -- right-associative
///   primary := NUMBER | 'pi' | TIME | 'x'K | 'xd'K | FUNC '(' expr ')' | '(' expr ')'
///   FUNC    := sin | cos | exp | log | sqrt | abs
///
/// `dim` bounds the component indices K (0 means no state variables at all,
/// for constants and initial-history text); `allow_delayed` rejects xd* when
/// false; `time_var` names the time symbol ("t" for fields, "theta" for
/// initial histories).
[[nodiscard]] ParsedExpr parse_field_expr(const std::string& src, int dim, bool allow_delayed,
                                          const std::string& time_var = "t");

/// Tree-walk evaluation in doubles, left to right; domain trouble surfaces as
/// NaN/Inf per IEEE, never as an exception.
[[nodiscard]] double eval_expr(const ExprNode& e, double t, const StateVec& x, const StateVec& xd);

/// Minimal-parentheses form that re-parses to the identical tree. The time
/// variable prints as "t".
[[nodiscard]] std::string pretty_print(const ExprNode& e);

[[nodiscard]] ExprPtr clone_expr(const ExprNode& e);
[[nodiscard]] bool expr_equal(const ExprNode& a, const ExprNode& b);

/// Build a field from per-component expression texts (';'-separated splitting
/// is the caller's job). Components using xd* make a PointwiseDelay field
/// reading the single offset r; otherwise a PointwiseOde field.
[[nodiscard]] FieldSpec make_expr_field(const std::vector<std::string>& components, double r,
                                        std::optional<double> period);

}  // namespace avglab

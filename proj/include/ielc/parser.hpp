#pragma once

// Concrete syntax for terms, types, contexts and modal formulas.
//
//   type  := prod ("->" type)? ; prod := modal ("*" modal)*
//   modal := "O" modal | IDENT | "(" type ")"
//   term  := "\" IDENT (":" type)? "." term
//          | "let" "o" binders "=" args "in" term | app
//   app   := atomt+
//   atomt := IDENT | "pure" atomt | "p1" atomt | "p2" atomt
//          | "<" term "," term ">" | "(" term ")"
//   binders := "_" | IDENT ("," IDENT)* ; args := "_" | term ("," term)*
//
// Keywords: let o in pure p1 p2 false. Formulas use `p`, `false`, `~a`,
// `a & b`, `a | b`, `a -> b`, `O a` with precedence ~/O > & > | > ->.
// Printing emits minimal parentheses; parse(print(x)) is alpha-equal
// (terms) / equal (types, formulas) to x.

#include <string>
#include <vector>

#include "ielc/kripke.hpp"
#include "ielc/result.hpp"
#include "ielc/syntax.hpp"

namespace ielc {

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;  // token descriptions
};

Result<TermPtr, ParseError> parse_term(const std::string& text);
Result<TypePtr, ParseError> parse_type(const std::string& text);
Result<FormulaPtr, ParseError> parse_formula(const std::string& text);

// Context files: one `IDENT : type` per line, `#` starts a comment.
Result<Context, ParseError> parse_context(const std::string& text);

std::string print_term(const TermPtr& t);
std::string print_type(const TypePtr& t);
std::string print_formula(const FormulaPtr& f);
std::string print_context(const Context& ctx);

std::string format_error(const ParseError& e);

}  // namespace ielc

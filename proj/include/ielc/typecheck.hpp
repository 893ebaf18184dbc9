#pragma once

// Type synthesis for lambda-IEL. Lam binders must carry annotations
// (Church style); a let-circ body is checked in the context consisting of
// its binders only, the outer context is discarded.

#include <cstddef>
#include <string>

#include "ielc/result.hpp"
#include "ielc/syntax.hpp"

namespace ielc {

enum class TypeErrorKind {
  UnboundVariable,
  Mismatch,
  NotAFunction,
  NotAProduct,
  NotModal,
  ArityMismatch,
  DuplicateBinding,
  MissingAnnotation,
};

struct TypingError {
  TypeErrorKind kind;
  std::string name;         // UnboundVariable / DuplicateBinding
  TypePtr expected, found;  // Mismatch; `found` also for NotA* kinds
  TermPtr at;               // offending subterm
  std::size_t expected_count = 0, found_count = 0;  // ArityMismatch
};

std::string describe(const TypingError& e);

// The unique type with ctx |- t : type, or the failed rule premise.
Result<TypePtr, TypingError> infer(const Context& ctx, const TermPtr& t);

// True iff infer succeeds with a type equal to `ty`; a differing type is
// reported as a Mismatch.
Result<bool, TypingError> check(const Context& ctx, const TermPtr& t,
                                const TypePtr& ty);

// Generation lemma hook for pure: given t = pure M with ctx |- t : O phi,
// asserts ctx |- M : phi. Throws std::invalid_argument if the precondition
// fails.
bool generation_pure(const Context& ctx, const TermPtr& t);

}  // namespace ielc

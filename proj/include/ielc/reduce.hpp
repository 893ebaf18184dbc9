#pragma once

// One-step and multi-step beta reduction for lambda-IEL, normalization with
// fuel, joinability search and reduction equality.
//
// Rules: (1) beta (\x.M)N, (2)/(3) projections of pairs, (4) let-flatten
// (a let argument is itself a let), (5) let-pure (n >= 1, every argument a
// pure term, simultaneous substitution), (6) let-empty (n = 0).

#include <optional>
#include <string>
#include <vector>

#include "ielc/result.hpp"
#include "ielc/syntax.hpp"

namespace ielc {

enum class Rule { Beta, Proj1, Proj2, LetFlatten, LetPure, LetEmpty };

const char* rule_name(Rule r);

struct RedexSite {
  std::vector<int> path;  // child indices from the root to the redex node
  Rule rule;
  // For LetFlatten only: which argument position holds the inner let. A let
  // with several let-arguments has one rule-4 site per such argument.
  int arg = 0;
};

// All matching sites in leftmost-outermost order (pre-order; at a node,
// LetFlatten sites are ordered by argument index).
std::vector<RedexSite> redexes(const TermPtr& t);

// The contractum. In let-flatten the inner binders are freshened against
// the outer binders and the free variables of the body, so flattening can
// capture only the variables it intends to. Throws std::invalid_argument
// when the site does not match.
TermPtr step(const TermPtr& t, const RedexSite& site);

struct TraceStep {
  TermPtr before;  // term the rule was applied to
  RedexSite site;
};
struct Trace {
  std::vector<TraceStep> steps;
  TermPtr result;
};

struct FuelExhausted {
  Trace partial;  // steps done so far; `result` is the last term reached
};

// Repeatedly contracts the first redex in leftmost-outermost order.
Result<Trace, FuelExhausted> normalize(const TermPtr& t, long long fuel);

// Breadth-first search of both reduction graphs, alternating one expansion
// per side, up to `fuel` total expansions; returns the first term (in that
// order) reachable from both sides modulo alpha, or nullopt.
std::optional<TermPtr> joinable(const TermPtr& a, const TermPtr& b,
                                long long fuel);

// Normal forms compared via alpha_eq; sound for typable terms by strong
// normalization plus confluence.
Result<bool, FuelExhausted> reduction_equal(const TermPtr& a, const TermPtr& b,
                                            long long fuel);

// One line per step: `<rule> @ <path>  <printed term>` (the term the rule
// was applied to).
std::string format_trace(const Trace& trace);
std::string format_site(const RedexSite& site);

}  // namespace ielc

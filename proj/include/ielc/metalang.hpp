#pragma once

// Moggi's monadic metalanguage: typing, reduction, and the translation from
// lambda-IEL with its simulation properties. The nabla introduction is
// `val M`; `let val x = M in N` binds one variable whose scope is the body;
// unlike the source calculus the body keeps the outer context.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ielc/result.hpp"
#include "ielc/syntax.hpp"
#include "ielc/typecheck.hpp"

namespace ielc {

// ---------------------------------------------------------------- types

class MLType;
using MLTypePtr = std::shared_ptr<const MLType>;

struct MAtom {
  std::string name;
};
struct MArrow {
  MLTypePtr dom, cod;
};
struct MProduct {
  MLTypePtr left, right;
};
struct MNabla {
  MLTypePtr body;
};

class MLType {
 public:
  std::variant<MAtom, MArrow, MProduct, MNabla> node;
};

MLTypePtr m_atom(std::string name);
MLTypePtr m_arrow(MLTypePtr dom, MLTypePtr cod);
MLTypePtr m_product(MLTypePtr l, MLTypePtr r);
MLTypePtr nabla(MLTypePtr body);

template <class T>
const T* as(const MLTypePtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

bool ml_type_eq(const MLTypePtr& a, const MLTypePtr& b);

// ---------------------------------------------------------------- terms

class MLTerm;
using MLTermPtr = std::shared_ptr<const MLTerm>;

struct MVar {
  std::string name;
};
struct MLam {
  std::string binder;
  MLTypePtr annot;
  MLTermPtr body;
};
struct MApp {
  MLTermPtr fn, arg;
};
struct MPair {
  MLTermPtr first, second;
};
struct MProj {
  int index;
  MLTermPtr body;
};
struct MVal {
  MLTermPtr body;
};
struct MLetVal {
  std::string binder;
  MLTermPtr bound;
  MLTermPtr body;
};

class MLTerm {
 public:
  std::variant<MVar, MLam, MApp, MPair, MProj, MVal, MLetVal> node;
};

MLTermPtr m_var(std::string name);
MLTermPtr m_lam(std::string binder, MLTypePtr annot, MLTermPtr body);
MLTermPtr m_app(MLTermPtr fn, MLTermPtr arg);
MLTermPtr m_pair(MLTermPtr a, MLTermPtr b);
MLTermPtr m_proj(int index, MLTermPtr body);
MLTermPtr val(MLTermPtr body);
MLTermPtr let_val(std::string binder, MLTermPtr bound, MLTermPtr body);

template <class T>
const T* as(const MLTermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

std::set<std::string> ml_free_vars(const MLTermPtr& t);
MLTermPtr ml_substitute(const MLTermPtr& t, const std::string& x,
                        const MLTermPtr& s);
bool ml_alpha_eq(const MLTermPtr& a, const MLTermPtr& b);
std::string ml_canon_key(const MLTermPtr& t);
std::size_t ml_term_size(const MLTermPtr& t);

// ---------------------------------------------------------------- typing

struct MLContext {
  std::vector<std::pair<std::string, MLTypePtr>> decls;
  const MLTypePtr* lookup(const std::string& name) const;
  bool contains(const std::string& name) const;
};

struct MLTypingError {
  TypeErrorKind kind;
  std::string name;
  MLTypePtr expected, found;
  MLTermPtr at;
};

std::string describe(const MLTypingError& e);

// Simply-typed rules plus: val M : nabla phi when M : phi, and
// let val x = M in N : nabla psi when M : nabla phi and ctx, x:phi |- N :
// nabla psi.
Result<MLTypePtr, MLTypingError> ml_infer(const MLContext& ctx,
                                          const MLTermPtr& t);

// ---------------------------------------------------------------- reduction

enum class MLRule { Beta, Proj1, Proj2, LetValBeta, LetValAssoc, LetValEta };

const char* ml_rule_name(MLRule r);

struct MLRedexSite {
  std::vector<int> path;
  MLRule rule;
};

// Child indexing: MLam/MProj/MVal child 0; MApp/MPair 0,1; MLetVal bound 0,
// body 1.
int child_count(const MLTermPtr& t);
MLTermPtr child(const MLTermPtr& t, int i);
MLTermPtr with_child(const MLTermPtr& t, int i, MLTermPtr c);

// Rules: beta and projections; let val x = val M in N -> N[x := M]; the
// commuting conversion (the inner binder freshened against the outer body);
// let val x = M in val x -> M (eta).
std::vector<MLRedexSite> ml_redexes(const MLTermPtr& t);
MLTermPtr ml_step(const MLTermPtr& t, const MLRedexSite& site);

struct MLFuelExhausted {
  MLTermPtr last;
};
Result<MLTermPtr, MLFuelExhausted> ml_normalize(const MLTermPtr& t,
                                                long long fuel);

// Breadth-first reachability in the reduction graph modulo alpha, up to
// `fuel` node expansions.
bool ml_reachable(const MLTermPtr& from, const MLTermPtr& to, long long fuel);

// ---------------------------------------------------------------- printing

// Surface syntax mirrors the source grammar with `val`, `let val x = M in
// N` and type operator `V`.
std::string print_ml_term(const MLTermPtr& t);
std::string print_ml_type(const MLTypePtr& t);

// ---------------------------------------------------------------- translation

// Homomorphic on atoms, arrows and products; Circle maps to Nabla.
MLTypePtr translate_type(const TypePtr& ty);

// Clause for let: nested let-val chain ending in `val`; binders that occur
// free in the argument list are renamed first (the chain's binders scope
// over the remaining arguments, the source binders do not).
MLTermPtr translate_term(const TermPtr& t);

MLContext translate_context(const Context& ctx);

}  // namespace ielc

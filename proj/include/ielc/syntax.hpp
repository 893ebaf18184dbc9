#pragma once

// Abstract syntax of lambda-IEL terms and types: well-formedness, free
// variables, capture-avoiding and simultaneous substitution, alpha
// equivalence. All values are immutable; shared subtrees are fine.

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace ielc {

struct SourceSpan {
  int start = 0;  // byte offsets, 0-based, start <= end
  int end = 0;
  int line = 1;  // 1-based position of `start`
  int column = 1;
};

// ---------------------------------------------------------------- types

class Type;
using TypePtr = std::shared_ptr<const Type>;

struct TAtom {
  std::string name;
};
struct TArrow {
  TypePtr dom, cod;
};
struct TProduct {
  TypePtr left, right;
};
struct TCircle {
  TypePtr body;
};

class Type {
 public:
  std::variant<TAtom, TArrow, TProduct, TCircle> node;
};

TypePtr atom(std::string name);
TypePtr arrow(TypePtr dom, TypePtr cod);
TypePtr product(TypePtr left, TypePtr right);
TypePtr circle(TypePtr body);

template <class T>
const T* as(const TypePtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

bool type_eq(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------- terms

class Term;
using TermPtr = std::shared_ptr<const Term>;

struct Var {
  std::string name;
};
struct Lam {
  std::string binder;
  TypePtr annot;  // null when unannotated; checked terms require one
  TermPtr body;
};
struct App {
  TermPtr fn, arg;
};
struct Pair {
  TermPtr first, second;
};
struct Proj {
  int index;  // 1 or 2
  TermPtr body;
};
struct Pure {
  TermPtr body;
};
// let o x1,..,xn = M1,..,Mn in N. Binders scope over the body only; the
// argument list lives in the enclosing scope.
struct LetCirc {
  std::vector<std::string> binders;
  std::vector<TermPtr> args;
  TermPtr body;
};

class Term {
 public:
  std::variant<Var, Lam, App, Pair, Proj, Pure, LetCirc> node;
  SourceSpan span{};
};

TermPtr var(std::string name);
TermPtr lam(std::string binder, TypePtr annot, TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr pair(TermPtr first, TermPtr second);
TermPtr proj(int index, TermPtr body);
TermPtr pure(TermPtr body);
TermPtr let_circ(std::vector<std::string> binders, std::vector<TermPtr> args,
                 TermPtr body);
TermPtr with_span(TermPtr t, SourceSpan span);

template <class T>
const T* as(const TermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

// Child indexing, shared with reduction paths: Lam/Proj/Pure have child 0;
// App and Pair have children 0,1; LetCirc has args 0..n-1 and body n.
int child_count(const TermPtr& t);
TermPtr child(const TermPtr& t, int i);
TermPtr with_child(const TermPtr& t, int i, TermPtr c);

// True iff every LetCirc node has equal-length, duplicate-free binder and
// argument lists.
bool well_formed(const TermPtr& t);

// Free variables; LetCirc bodies contribute nothing (their variables are
// consumed by the binders). Throws std::invalid_argument on ill-formed input.
std::set<std::string> free_vars(const TermPtr& t);

// Capture-avoiding substitution t[x := s]. Inside a LetCirc only the
// argument list is substituted, never the body. Lam binders are renamed
// (base name plus numeric suffix) when they would capture a variable of s.
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s);

// Simultaneous substitution: substituted terms are not re-scanned for the
// other names. Throws std::invalid_argument on duplicate names.
TermPtr substitute_sim(const TermPtr& t,
                       const std::vector<std::pair<std::string, TermPtr>>& ps);

// Equality up to consistent renaming of Lam and LetCirc binders.
// Lam annotations must agree (both absent or structurally equal).
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Smallest name of the form `base` or `stem<k>` not in `avoid`, where stem
// is `base` with any numeric suffix stripped.
std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid);

std::size_t term_size(const TermPtr& t);

// Alpha-invariant structural key; equal keys iff alpha_eq. Used for hashing
// terms in reduction-graph searches.
std::string canon_key(const TermPtr& t);
std::string canon_key(const TypePtr& t);

// ---------------------------------------------------------------- contexts

// Ordered list of declarations with distinct names.
struct Context {
  std::vector<std::pair<std::string, TypePtr>> decls;

  const TypePtr* lookup(const std::string& name) const;
  bool contains(const std::string& name) const;
};

}  // namespace ielc

#include "ielc/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ielc {

TypePtr atom(std::string name) {
  return std::make_shared<Type>(Type{TAtom{std::move(name)}});
}
TypePtr arrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<Type>(Type{TArrow{std::move(dom), std::move(cod)}});
}
TypePtr product(TypePtr left, TypePtr right) {
  return std::make_shared<Type>(
      Type{TProduct{std::move(left), std::move(right)}});
}
TypePtr circle(TypePtr body) {
  return std::make_shared<Type>(Type{TCircle{std::move(body)}});
}

bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = as<TAtom>(a)) return x->name == as<TAtom>(b)->name;
  if (auto* x = as<TArrow>(a)) {
    auto* y = as<TArrow>(b);
    return type_eq(x->dom, y->dom) && type_eq(x->cod, y->cod);
  }
  if (auto* x = as<TProduct>(a)) {
    auto* y = as<TProduct>(b);
    return type_eq(x->left, y->left) && type_eq(x->right, y->right);
  }
  return type_eq(as<TCircle>(a)->body, as<TCircle>(b)->body);
}

TermPtr var(std::string name) {
  return std::make_shared<Term>(Term{Var{std::move(name)}, {}});
}
TermPtr lam(std::string binder, TypePtr annot, TermPtr body) {
  return std::make_shared<Term>(
      Term{Lam{std::move(binder), std::move(annot), std::move(body)}, {}});
}
TermPtr app(TermPtr fn, TermPtr arg) {
  return std::make_shared<Term>(Term{App{std::move(fn), std::move(arg)}, {}});
}
TermPtr pair(TermPtr first, TermPtr second) {
  return std::make_shared<Term>(
      Term{Pair{std::move(first), std::move(second)}, {}});
}
TermPtr proj(int index, TermPtr body) {
  if (index != 1 && index != 2)
    throw std::invalid_argument("proj index must be 1 or 2");
  return std::make_shared<Term>(Term{Proj{index, std::move(body)}, {}});
}
TermPtr pure(TermPtr body) {
  return std::make_shared<Term>(Term{Pure{std::move(body)}, {}});
}
TermPtr let_circ(std::vector<std::string> binders, std::vector<TermPtr> args,
                 TermPtr body) {
  return std::make_shared<Term>(
      Term{LetCirc{std::move(binders), std::move(args), std::move(body)}, {}});
}
TermPtr with_span(TermPtr t, SourceSpan span) {
  auto copy = std::make_shared<Term>(*t);
  copy->span = span;
  return copy;
}

int child_count(const TermPtr& t) {
  if (as<Var>(t)) return 0;
  if (as<Lam>(t) || as<Proj>(t) || as<Pure>(t)) return 1;
  if (as<App>(t) || as<Pair>(t)) return 2;
  auto* l = as<LetCirc>(t);
  return static_cast<int>(l->args.size()) + 1;
}

TermPtr child(const TermPtr& t, int i) {
  if (auto* n = as<Lam>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<App>(t)) {
    if (i == 0) return n->fn;
    if (i == 1) return n->arg;
  } else if (auto* n = as<Pair>(t)) {
    if (i == 0) return n->first;
    if (i == 1) return n->second;
  } else if (auto* n = as<Proj>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<Pure>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<LetCirc>(t)) {
    int na = static_cast<int>(n->args.size());
    if (i >= 0 && i < na) return n->args[i];
    if (i == na) return n->body;
  }
  throw std::invalid_argument("child index out of range");
}

TermPtr with_child(const TermPtr& t, int i, TermPtr c) {
  if (auto* n = as<Lam>(t)) {
    if (i == 0) return lam(n->binder, n->annot, std::move(c));
  } else if (auto* n = as<App>(t)) {
    if (i == 0) return app(std::move(c), n->arg);
    if (i == 1) return app(n->fn, std::move(c));
  } else if (auto* n = as<Pair>(t)) {
    if (i == 0) return pair(std::move(c), n->second);
    if (i == 1) return pair(n->first, std::move(c));
  } else if (auto* n = as<Proj>(t)) {
    if (i == 0) return proj(n->index, std::move(c));
  } else if (as<Pure>(t)) {
    if (i == 0) return pure(std::move(c));
  } else if (auto* n = as<LetCirc>(t)) {
    int na = static_cast<int>(n->args.size());
    if (i >= 0 && i < na) {
      auto args = n->args;
      args[i] = std::move(c);
      return let_circ(n->binders, std::move(args), n->body);
    }
    if (i == na) return let_circ(n->binders, n->args, std::move(c));
  }
  throw std::invalid_argument("child index out of range");
}

bool well_formed(const TermPtr& t) {
  if (!t) return false;
  if (auto* n = as<LetCirc>(t)) {
    if (n->binders.size() != n->args.size()) return false;
    std::set<std::string> seen(n->binders.begin(), n->binders.end());
    if (seen.size() != n->binders.size()) return false;
  }
  for (int i = 0; i < child_count(t); ++i)
    if (!well_formed(child(t, i))) return false;
  return true;
}

namespace {

void fv_impl(const TermPtr& t, std::set<std::string>& out) {
  if (auto* n = as<Var>(t)) {
    out.insert(n->name);
  } else if (auto* n = as<Lam>(t)) {
    std::set<std::string> inner;
    fv_impl(n->body, inner);
    inner.erase(n->binder);
    out.insert(inner.begin(), inner.end());
  } else if (auto* n = as<LetCirc>(t)) {
    // Body variables are consumed by the binders and do not contribute.
    for (const auto& a : n->args) fv_impl(a, out);
  } else {
    for (int i = 0; i < child_count(t); ++i) fv_impl(child(t, i), out);
  }
}

void require_well_formed(const TermPtr& t, const char* who) {
  if (!well_formed(t))
    throw std::invalid_argument(std::string(who) + ": ill-formed term");
}

using SubstMap = std::map<std::string, TermPtr>;

TermPtr subst_impl(const TermPtr& t, const SubstMap& m);

// Renames the Lam binder when it would capture a free variable of a
// substituted term that can actually land in the body.
TermPtr subst_lam(const Lam& n, const SubstMap& m) {
  SubstMap live = m;
  live.erase(n.binder);
  if (live.empty()) return lam(n.binder, n.annot, n.body);

  std::set<std::string> body_fv;
  fv_impl(n.body, body_fv);
  for (auto it = live.begin(); it != live.end();)
    it = body_fv.count(it->first) ? ++it : live.erase(it);
  if (live.empty()) return lam(n.binder, n.annot, n.body);

  std::set<std::string> incoming;
  for (const auto& [k, v] : live) {
    std::set<std::string> fv;
    fv_impl(v, fv);
    incoming.insert(fv.begin(), fv.end());
  }
  std::string binder = n.binder;
  TermPtr body = n.body;
  if (incoming.count(binder)) {
    std::set<std::string> avoid = incoming;
    avoid.insert(body_fv.begin(), body_fv.end());
    for (const auto& [k, v] : live) avoid.insert(k);
    avoid.insert(binder);
    std::string fresh = fresh_name(binder, avoid);
    body = subst_impl(body, SubstMap{{binder, var(fresh)}});
    binder = fresh;
  }
  return lam(binder, n.annot, subst_impl(body, live));
}

TermPtr subst_impl(const TermPtr& t, const SubstMap& m) {
  if (m.empty()) return t;
  if (auto* n = as<Var>(t)) {
    auto it = m.find(n->name);
    return it == m.end() ? t : it->second;
  }
  if (auto* n = as<Lam>(t)) return subst_lam(*n, m);
  if (auto* n = as<LetCirc>(t)) {
    // Substitution clause for let: only the argument list is rewritten.
    std::vector<TermPtr> args;
    args.reserve(n->args.size());
    for (const auto& a : n->args) args.push_back(subst_impl(a, m));
    return let_circ(n->binders, std::move(args), n->body);
  }
  TermPtr out = t;
  for (int i = 0; i < child_count(t); ++i)
    out = with_child(out, i, subst_impl(child(t, i), m));
  return out;
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  require_well_formed(t, "free_vars");
  std::set<std::string> out;
  fv_impl(t, out);
  return out;
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s) {
  require_well_formed(t, "substitute");
  require_well_formed(s, "substitute");
  return subst_impl(t, SubstMap{{x, s}});
}

TermPtr substitute_sim(
    const TermPtr& t, const std::vector<std::pair<std::string, TermPtr>>& ps) {
  require_well_formed(t, "substitute_sim");
  SubstMap m;
  for (const auto& [name, s] : ps) {
    require_well_formed(s, "substitute_sim");
    if (!m.emplace(name, s).second)
      throw std::invalid_argument("substitute_sim: duplicate name " + name);
  }
  return subst_impl(t, m);
}

namespace {

struct AlphaEnv {
  // Bound names to binder indices, outermost first.
  std::map<std::string, int> left, right;
  int depth = 0;
};

bool alpha_impl(const TermPtr& a, const TermPtr& b, AlphaEnv env) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = as<Var>(a)) {
    auto* y = as<Var>(b);
    auto il = env.left.find(x->name);
    auto ir = env.right.find(y->name);
    if (il == env.left.end() && ir == env.right.end())
      return x->name == y->name;
    if (il == env.left.end() || ir == env.right.end()) return false;
    return il->second == ir->second;
  }
  if (auto* x = as<Lam>(a)) {
    auto* y = as<Lam>(b);
    if ((x->annot == nullptr) != (y->annot == nullptr)) return false;
    if (x->annot && !type_eq(x->annot, y->annot)) return false;
    AlphaEnv inner = env;
    inner.left[x->binder] = inner.depth;
    inner.right[y->binder] = inner.depth;
    inner.depth++;
    return alpha_impl(x->body, y->body, std::move(inner));
  }
  if (auto* x = as<Proj>(a)) {
    auto* y = as<Proj>(b);
    if (x->index != y->index) return false;
    return alpha_impl(x->body, y->body, std::move(env));
  }
  if (auto* x = as<LetCirc>(a)) {
    auto* y = as<LetCirc>(b);
    if (x->binders.size() != y->binders.size()) return false;
    for (std::size_t i = 0; i < x->args.size(); ++i)
      if (!alpha_impl(x->args[i], y->args[i], env)) return false;
    AlphaEnv inner = env;
    for (std::size_t i = 0; i < x->binders.size(); ++i) {
      inner.left[x->binders[i]] = inner.depth;
      inner.right[y->binders[i]] = inner.depth;
      inner.depth++;
    }
    return alpha_impl(x->body, y->body, std::move(inner));
  }
  for (int i = 0; i < child_count(a); ++i)
    if (!alpha_impl(child(a, i), child(b, i), env)) return false;
  return true;
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (!well_formed(a) || !well_formed(b))
    throw std::invalid_argument("alpha_eq: ill-formed term");
  return alpha_impl(a, b, AlphaEnv{});
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back())))
    stem.pop_back();
  if (stem.empty()) stem = "v";
  for (int k = 1;; ++k) {
    std::string candidate = stem + std::to_string(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

std::size_t term_size(const TermPtr& t) {
  std::size_t n = 1;
  for (int i = 0; i < child_count(t); ++i) n += term_size(child(t, i));
  return n;
}

namespace {

void canon_type(const TypePtr& t, std::string& out) {
  if (auto* x = as<TAtom>(t)) {
    out += 'a';
    out += x->name;
    out += ';';
  } else if (auto* x = as<TArrow>(t)) {
    out += '>';
    canon_type(x->dom, out);
    canon_type(x->cod, out);
  } else if (auto* x = as<TProduct>(t)) {
    out += '*';
    canon_type(x->left, out);
    canon_type(x->right, out);
  } else {
    out += 'O';
    canon_type(as<TCircle>(t)->body, out);
  }
}

void canon_term(const TermPtr& t, std::map<std::string, int>& env, int& depth,
                std::string& out) {
  if (auto* n = as<Var>(t)) {
    auto it = env.find(n->name);
    if (it == env.end()) {
      out += '$';
      out += n->name;
    } else {
      out += '#';
      out += std::to_string(it->second);
    }
    out += ';';
  } else if (auto* n = as<Lam>(t)) {
    out += 'L';
    if (n->annot) canon_type(n->annot, out);
    out += '.';
    auto saved = env;
    env[n->binder] = depth++;
    canon_term(n->body, env, depth, out);
    env = std::move(saved);
    depth--;
  } else if (auto* n = as<App>(t)) {
    out += '(';
    canon_term(n->fn, env, depth, out);
    canon_term(n->arg, env, depth, out);
    out += ')';
  } else if (auto* n = as<Pair>(t)) {
    out += '<';
    canon_term(n->first, env, depth, out);
    canon_term(n->second, env, depth, out);
    out += '>';
  } else if (auto* n = as<Proj>(t)) {
    out += n->index == 1 ? 'p' : 'q';
    canon_term(n->body, env, depth, out);
  } else if (auto* n = as<Pure>(t)) {
    out += '!';
    canon_term(n->body, env, depth, out);
  } else if (auto* n = as<LetCirc>(t)) {
    out += '{';
    out += std::to_string(n->args.size());
    out += ':';
    for (const auto& a : n->args) canon_term(a, env, depth, out);
    out += '|';
    auto saved = env;
    for (const auto& b : n->binders) env[b] = depth++;
    canon_term(n->body, env, depth, out);
    env = std::move(saved);
    depth -= static_cast<int>(n->binders.size());
    out += '}';
  }
}

}  // namespace

std::string canon_key(const TermPtr& t) {
  std::map<std::string, int> env;
  int depth = 0;
  std::string out;
  canon_term(t, env, depth, out);
  return out;
}

std::string canon_key(const TypePtr& t) {
  std::string out;
  canon_type(t, out);
  return out;
}

const TypePtr* Context::lookup(const std::string& name) const {
  for (const auto& [n, ty] : decls)
    if (n == name) return &ty;
  return nullptr;
}

bool Context::contains(const std::string& name) const {
  return lookup(name) != nullptr;
}

}  // namespace ielc

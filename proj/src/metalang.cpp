#include "ielc/metalang.hpp"

#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ielc {

MLTypePtr m_atom(std::string name) {
  return std::make_shared<MLType>(MLType{MAtom{std::move(name)}});
}
MLTypePtr m_arrow(MLTypePtr dom, MLTypePtr cod) {
  return std::make_shared<MLType>(
      MLType{MArrow{std::move(dom), std::move(cod)}});
}
MLTypePtr m_product(MLTypePtr l, MLTypePtr r) {
  return std::make_shared<MLType>(
      MLType{MProduct{std::move(l), std::move(r)}});
}
MLTypePtr nabla(MLTypePtr body) {
  return std::make_shared<MLType>(MLType{MNabla{std::move(body)}});
}

bool ml_type_eq(const MLTypePtr& a, const MLTypePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  if (auto* x = as<MAtom>(a)) return x->name == as<MAtom>(b)->name;
  if (auto* x = as<MArrow>(a)) {
    auto* y = as<MArrow>(b);
    return ml_type_eq(x->dom, y->dom) && ml_type_eq(x->cod, y->cod);
  }
  if (auto* x = as<MProduct>(a)) {
    auto* y = as<MProduct>(b);
    return ml_type_eq(x->left, y->left) && ml_type_eq(x->right, y->right);
  }
  return ml_type_eq(as<MNabla>(a)->body, as<MNabla>(b)->body);
}

MLTermPtr m_var(std::string name) {
  return std::make_shared<MLTerm>(MLTerm{MVar{std::move(name)}});
}
MLTermPtr m_lam(std::string binder, MLTypePtr annot, MLTermPtr body) {
  return std::make_shared<MLTerm>(
      MLTerm{MLam{std::move(binder), std::move(annot), std::move(body)}});
}
MLTermPtr m_app(MLTermPtr fn, MLTermPtr arg) {
  return std::make_shared<MLTerm>(MLTerm{MApp{std::move(fn), std::move(arg)}});
}
MLTermPtr m_pair(MLTermPtr a, MLTermPtr b) {
  return std::make_shared<MLTerm>(MLTerm{MPair{std::move(a), std::move(b)}});
}
MLTermPtr m_proj(int index, MLTermPtr body) {
  if (index != 1 && index != 2)
    throw std::invalid_argument("m_proj index must be 1 or 2");
  return std::make_shared<MLTerm>(MLTerm{MProj{index, std::move(body)}});
}
MLTermPtr val(MLTermPtr body) {
  return std::make_shared<MLTerm>(MLTerm{MVal{std::move(body)}});
}
MLTermPtr let_val(std::string binder, MLTermPtr bound, MLTermPtr body) {
  return std::make_shared<MLTerm>(
      MLTerm{MLetVal{std::move(binder), std::move(bound), std::move(body)}});
}

int child_count(const MLTermPtr& t) {
  if (as<MVar>(t)) return 0;
  if (as<MLam>(t) || as<MProj>(t) || as<MVal>(t)) return 1;
  return 2;
}

MLTermPtr child(const MLTermPtr& t, int i) {
  if (auto* n = as<MLam>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<MApp>(t)) {
    if (i == 0) return n->fn;
    if (i == 1) return n->arg;
  } else if (auto* n = as<MPair>(t)) {
    if (i == 0) return n->first;
    if (i == 1) return n->second;
  } else if (auto* n = as<MProj>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<MVal>(t)) {
    if (i == 0) return n->body;
  } else if (auto* n = as<MLetVal>(t)) {
    if (i == 0) return n->bound;
    if (i == 1) return n->body;
  }
  throw std::invalid_argument("child index out of range");
}

MLTermPtr with_child(const MLTermPtr& t, int i, MLTermPtr c) {
  if (auto* n = as<MLam>(t)) {
    if (i == 0) return m_lam(n->binder, n->annot, std::move(c));
  } else if (auto* n = as<MApp>(t)) {
    if (i == 0) return m_app(std::move(c), n->arg);
    if (i == 1) return m_app(n->fn, std::move(c));
  } else if (auto* n = as<MPair>(t)) {
    if (i == 0) return m_pair(std::move(c), n->second);
    if (i == 1) return m_pair(n->first, std::move(c));
  } else if (auto* n = as<MProj>(t)) {
    if (i == 0) return m_proj(n->index, std::move(c));
  } else if (as<MVal>(t)) {
    if (i == 0) return val(std::move(c));
  } else if (auto* n = as<MLetVal>(t)) {
    if (i == 0) return let_val(n->binder, std::move(c), n->body);
    if (i == 1) return let_val(n->binder, n->bound, std::move(c));
  }
  throw std::invalid_argument("child index out of range");
}

namespace {

void ml_fv(const MLTermPtr& t, std::set<std::string>& out) {
  if (auto* n = as<MVar>(t)) {
    out.insert(n->name);
  } else if (auto* n = as<MLam>(t)) {
    std::set<std::string> inner;
    ml_fv(n->body, inner);
    inner.erase(n->binder);
    out.insert(inner.begin(), inner.end());
  } else if (auto* n = as<MLetVal>(t)) {
    ml_fv(n->bound, out);
    std::set<std::string> inner;
    ml_fv(n->body, inner);
    inner.erase(n->binder);
    out.insert(inner.begin(), inner.end());
  } else {
    for (int i = 0; i < child_count(t); ++i) ml_fv(child(t, i), out);
  }
}

using MSubst = std::map<std::string, MLTermPtr>;

MLTermPtr msub(const MLTermPtr& t, const MSubst& m);

MLTermPtr msub_binding(const std::string& binder, const MLTermPtr& body,
                       const MSubst& m, std::string& out_binder) {
  MSubst live = m;
  live.erase(binder);
  out_binder = binder;
  if (live.empty()) return body;
  std::set<std::string> body_fv;
  ml_fv(body, body_fv);
  for (auto it = live.begin(); it != live.end();)
    it = body_fv.count(it->first) ? ++it : live.erase(it);
  if (live.empty()) return body;
  std::set<std::string> incoming;
  for (const auto& [k, v] : live) {
    std::set<std::string> fv;
    ml_fv(v, fv);
    incoming.insert(fv.begin(), fv.end());
  }
  MLTermPtr b = body;
  if (incoming.count(binder)) {
    std::set<std::string> avoid = incoming;
    avoid.insert(body_fv.begin(), body_fv.end());
    for (const auto& [k, v] : live) avoid.insert(k);
    avoid.insert(binder);
    out_binder = fresh_name(binder, avoid);
    b = msub(b, MSubst{{binder, m_var(out_binder)}});
  }
  return msub(b, live);
}

MLTermPtr msub(const MLTermPtr& t, const MSubst& m) {
  if (m.empty()) return t;
  if (auto* n = as<MVar>(t)) {
    auto it = m.find(n->name);
    return it == m.end() ? t : it->second;
  }
  if (auto* n = as<MLam>(t)) {
    std::string binder;
    MLTermPtr body = msub_binding(n->binder, n->body, m, binder);
    return m_lam(binder, n->annot, body);
  }
  if (auto* n = as<MLetVal>(t)) {
    MLTermPtr bound = msub(n->bound, m);
    std::string binder;
    MLTermPtr body = msub_binding(n->binder, n->body, m, binder);
    return let_val(binder, bound, body);
  }
  MLTermPtr out = t;
  for (int i = 0; i < child_count(t); ++i)
    out = with_child(out, i, msub(child(t, i), m));
  return out;
}

}  // namespace

std::set<std::string> ml_free_vars(const MLTermPtr& t) {
  std::set<std::string> out;
  ml_fv(t, out);
  return out;
}

MLTermPtr ml_substitute(const MLTermPtr& t, const std::string& x,
                        const MLTermPtr& s) {
  return msub(t, MSubst{{x, s}});
}

namespace {

bool ml_alpha(const MLTermPtr& a, const MLTermPtr& b,
              std::map<std::string, int> el, std::map<std::string, int> er,
              int depth) {
  if (a->node.index() != b->node.index()) return false;
  if (auto* x = as<MVar>(a)) {
    auto* y = as<MVar>(b);
    auto il = el.find(x->name);
    auto ir = er.find(y->name);
    if (il == el.end() && ir == er.end()) return x->name == y->name;
    if (il == el.end() || ir == er.end()) return false;
    return il->second == ir->second;
  }
  if (auto* x = as<MLam>(a)) {
    auto* y = as<MLam>(b);
    if ((x->annot == nullptr) != (y->annot == nullptr)) return false;
    if (x->annot && !ml_type_eq(x->annot, y->annot)) return false;
    el[x->binder] = depth;
    er[y->binder] = depth;
    return ml_alpha(x->body, y->body, std::move(el), std::move(er), depth + 1);
  }
  if (auto* x = as<MProj>(a)) {
    if (x->index != as<MProj>(b)->index) return false;
    return ml_alpha(x->body, as<MProj>(b)->body, std::move(el), std::move(er),
                    depth);
  }
  if (auto* x = as<MLetVal>(a)) {
    auto* y = as<MLetVal>(b);
    if (!ml_alpha(x->bound, y->bound, el, er, depth)) return false;
    el[x->binder] = depth;
    er[y->binder] = depth;
    return ml_alpha(x->body, y->body, std::move(el), std::move(er), depth + 1);
  }
  for (int i = 0; i < child_count(a); ++i)
    if (!ml_alpha(child(a, i), child(b, i), el, er, depth)) return false;
  return true;
}

void ml_canon_type(const MLTypePtr& t, std::string& out) {
  if (auto* x = as<MAtom>(t)) {
    out += 'a';
    out += x->name;
    out += ';';
  } else if (auto* x = as<MArrow>(t)) {
    out += '>';
    ml_canon_type(x->dom, out);
    ml_canon_type(x->cod, out);
  } else if (auto* x = as<MProduct>(t)) {
    out += '*';
    ml_canon_type(x->left, out);
    ml_canon_type(x->right, out);
  } else {
    out += 'N';
    ml_canon_type(as<MNabla>(t)->body, out);
  }
}

void ml_canon(const MLTermPtr& t, std::map<std::string, int>& env, int& depth,
              std::string& out) {
  if (auto* n = as<MVar>(t)) {
    auto it = env.find(n->name);
    if (it == env.end()) {
      out += '$';
      out += n->name;
    } else {
      out += '#';
      out += std::to_string(it->second);
    }
    out += ';';
  } else if (auto* n = as<MLam>(t)) {
    out += 'L';
    if (n->annot) ml_canon_type(n->annot, out);
    out += '.';
    auto saved = env;
    env[n->binder] = depth++;
    ml_canon(n->body, env, depth, out);
    env = std::move(saved);
    depth--;
  } else if (auto* n = as<MApp>(t)) {
    out += '(';
    ml_canon(n->fn, env, depth, out);
    ml_canon(n->arg, env, depth, out);
    out += ')';
  } else if (auto* n = as<MPair>(t)) {
    out += '<';
    ml_canon(n->first, env, depth, out);
    ml_canon(n->second, env, depth, out);
    out += '>';
  } else if (auto* n = as<MProj>(t)) {
    out += n->index == 1 ? 'p' : 'q';
    ml_canon(n->body, env, depth, out);
  } else if (auto* n = as<MVal>(t)) {
    out += '!';
    ml_canon(n->body, env, depth, out);
  } else if (auto* n = as<MLetVal>(t)) {
    out += '{';
    ml_canon(n->bound, env, depth, out);
    out += '|';
    auto saved = env;
    env[n->binder] = depth++;
    ml_canon(n->body, env, depth, out);
    env = std::move(saved);
    depth--;
    out += '}';
  }
}

}  // namespace

bool ml_alpha_eq(const MLTermPtr& a, const MLTermPtr& b) {
  return ml_alpha(a, b, {}, {}, 0);
}

std::string ml_canon_key(const MLTermPtr& t) {
  std::map<std::string, int> env;
  int depth = 0;
  std::string out;
  ml_canon(t, env, depth, out);
  return out;
}

std::size_t ml_term_size(const MLTermPtr& t) {
  std::size_t n = 1;
  for (int i = 0; i < child_count(t); ++i) n += ml_term_size(child(t, i));
  return n;
}

// ---------------------------------------------------------------- typing

const MLTypePtr* MLContext::lookup(const std::string& name) const {
  for (const auto& [n, ty] : decls)
    if (n == name) return &ty;
  return nullptr;
}
bool MLContext::contains(const std::string& name) const {
  return lookup(name) != nullptr;
}

Result<MLTypePtr, MLTypingError> ml_infer(const MLContext& ctx,
                                          const MLTermPtr& t) {
  if (auto* n = as<MVar>(t)) {
    if (const MLTypePtr* ty = ctx.lookup(n->name)) return *ty;
    return MLTypingError{TypeErrorKind::UnboundVariable, n->name, nullptr,
                         nullptr, t};
  }
  if (auto* n = as<MLam>(t)) {
    if (!n->annot)
      return MLTypingError{TypeErrorKind::MissingAnnotation, n->binder,
                           nullptr, nullptr, t};
    if (ctx.contains(n->binder))
      return MLTypingError{TypeErrorKind::DuplicateBinding, n->binder, nullptr,
                           nullptr, t};
    MLContext inner = ctx;
    inner.decls.emplace_back(n->binder, n->annot);
    auto body = ml_infer(inner, n->body);
    if (!body) return body;
    return m_arrow(n->annot, body.value());
  }
  if (auto* n = as<MApp>(t)) {
    auto fn = ml_infer(ctx, n->fn);
    if (!fn) return fn;
    auto* arr = as<MArrow>(fn.value());
    if (!arr)
      return MLTypingError{TypeErrorKind::NotAFunction, "", nullptr,
                           fn.value(), n->fn};
    auto arg = ml_infer(ctx, n->arg);
    if (!arg) return arg;
    if (!ml_type_eq(arr->dom, arg.value()))
      return MLTypingError{TypeErrorKind::Mismatch, "", arr->dom, arg.value(),
                           n->arg};
    return arr->cod;
  }
  if (auto* n = as<MPair>(t)) {
    auto a = ml_infer(ctx, n->first);
    if (!a) return a;
    auto b = ml_infer(ctx, n->second);
    if (!b) return b;
    return m_product(a.value(), b.value());
  }
  if (auto* n = as<MProj>(t)) {
    auto a = ml_infer(ctx, n->body);
    if (!a) return a;
    auto* prod = as<MProduct>(a.value());
    if (!prod)
      return MLTypingError{TypeErrorKind::NotAProduct, "", nullptr, a.value(),
                           n->body};
    return n->index == 1 ? prod->left : prod->right;
  }
  if (auto* n = as<MVal>(t)) {
    auto a = ml_infer(ctx, n->body);
    if (!a) return a;
    return nabla(a.value());
  }
  auto* n = as<MLetVal>(t);
  auto bound = ml_infer(ctx, n->bound);
  if (!bound) return bound;
  auto* nb = as<MNabla>(bound.value());
  if (!nb)
    return MLTypingError{TypeErrorKind::NotModal, "", nullptr, bound.value(),
                         n->bound};
  if (ctx.contains(n->binder))
    return MLTypingError{TypeErrorKind::DuplicateBinding, n->binder, nullptr,
                         nullptr, t};
  MLContext inner = ctx;  // let-val keeps the outer context
  inner.decls.emplace_back(n->binder, nb->body);
  auto body = ml_infer(inner, n->body);
  if (!body) return body;
  if (!as<MNabla>(body.value()))
    return MLTypingError{TypeErrorKind::NotModal, "", nullptr, body.value(),
                         n->body};
  return body.value();
}

std::string describe(const MLTypingError& e) {
  std::ostringstream os;
  switch (e.kind) {
    case TypeErrorKind::UnboundVariable:
      os << "unbound variable '" << e.name << "'";
      break;
    case TypeErrorKind::Mismatch:
      os << "expected type " << print_ml_type(e.expected) << " but found "
         << print_ml_type(e.found);
      break;
    case TypeErrorKind::NotAFunction:
      os << "not a function: type " << print_ml_type(e.found);
      break;
    case TypeErrorKind::NotAProduct:
      os << "not a product: type " << print_ml_type(e.found);
      break;
    case TypeErrorKind::NotModal:
      os << "expected a nabla type, found " << print_ml_type(e.found);
      break;
    case TypeErrorKind::DuplicateBinding:
      os << "duplicate binding '" << e.name << "'";
      break;
    case TypeErrorKind::MissingAnnotation:
      os << "lambda binder '" << e.name << "' lacks a type annotation";
      break;
    default:
      os << "type error";
  }
  if (e.at) os << " in `" << print_ml_term(e.at) << "`";
  return os.str();
}

// ---------------------------------------------------------------- reduction

const char* ml_rule_name(MLRule r) {
  switch (r) {
    case MLRule::Beta: return "beta";
    case MLRule::Proj1: return "proj1";
    case MLRule::Proj2: return "proj2";
    case MLRule::LetValBeta: return "letval-beta";
    case MLRule::LetValAssoc: return "letval-assoc";
    case MLRule::LetValEta: return "letval-eta";
  }
  return "?";
}

namespace {

void ml_sites_at(const MLTermPtr& t, const std::vector<int>& path,
                 std::vector<MLRedexSite>& out) {
  if (auto* n = as<MApp>(t)) {
    if (as<MLam>(n->fn)) out.push_back({path, MLRule::Beta});
  } else if (auto* n = as<MProj>(t)) {
    if (as<MPair>(n->body))
      out.push_back({path, n->index == 1 ? MLRule::Proj1 : MLRule::Proj2});
  } else if (auto* n = as<MLetVal>(t)) {
    if (as<MVal>(n->bound)) out.push_back({path, MLRule::LetValBeta});
    if (as<MLetVal>(n->bound)) out.push_back({path, MLRule::LetValAssoc});
    if (auto* v = as<MVal>(n->body))
      if (auto* x = as<MVar>(v->body); x && x->name == n->binder)
        out.push_back({path, MLRule::LetValEta});
  }
}

void ml_collect(const MLTermPtr& t, std::vector<int>& path,
                std::vector<MLRedexSite>& out) {
  ml_sites_at(t, path, out);
  for (int i = 0; i < child_count(t); ++i) {
    path.push_back(i);
    ml_collect(child(t, i), path, out);
    path.pop_back();
  }
}

[[noreturn]] void ml_bad_site(const char* why) {
  throw std::invalid_argument(std::string("ml_step: site does not match: ") +
                              why);
}

MLTermPtr ml_contract(const MLTermPtr& t, MLRule rule) {
  switch (rule) {
    case MLRule::Beta: {
      auto* n = as<MApp>(t);
      if (!n) ml_bad_site("not an application");
      auto* f = as<MLam>(n->fn);
      if (!f) ml_bad_site("head is not a lambda");
      return ml_substitute(f->body, f->binder, n->arg);
    }
    case MLRule::Proj1:
    case MLRule::Proj2: {
      auto* n = as<MProj>(t);
      if (!n) ml_bad_site("not a projection");
      auto* p = as<MPair>(n->body);
      if (!p) ml_bad_site("body is not a pair");
      int want = rule == MLRule::Proj1 ? 1 : 2;
      if (n->index != want) ml_bad_site("projection index differs");
      return n->index == 1 ? p->first : p->second;
    }
    case MLRule::LetValBeta: {
      auto* n = as<MLetVal>(t);
      if (!n) ml_bad_site("not a let-val");
      auto* v = as<MVal>(n->bound);
      if (!v) ml_bad_site("bound term is not val");
      return ml_substitute(n->body, n->binder, v->body);
    }
    case MLRule::LetValAssoc: {
      // let val x = (let val y = N in P) in M
      //   -> let val y = N in (let val x = P in M), y fresh for M and x.
      auto* n = as<MLetVal>(t);
      if (!n) ml_bad_site("not a let-val");
      auto* inner = as<MLetVal>(n->bound);
      if (!inner) ml_bad_site("bound term is not a let-val");
      std::string y = inner->binder;
      MLTermPtr p = inner->body;
      auto m_fv = ml_free_vars(n->body);
      if (y == n->binder || m_fv.count(y)) {
        std::set<std::string> avoid = m_fv;
        auto pfv = ml_free_vars(p);
        avoid.insert(pfv.begin(), pfv.end());
        avoid.insert(n->binder);
        avoid.insert(y);
        std::string y2 = fresh_name(y, avoid);
        p = ml_substitute(p, y, m_var(y2));
        y = y2;
      }
      return let_val(y, inner->bound, let_val(n->binder, p, n->body));
    }
    case MLRule::LetValEta: {
      auto* n = as<MLetVal>(t);
      if (!n) ml_bad_site("not a let-val");
      auto* v = as<MVal>(n->body);
      if (!v) ml_bad_site("body is not val");
      auto* x = as<MVar>(v->body);
      if (!x || x->name != n->binder) ml_bad_site("body is not val of binder");
      return n->bound;
    }
  }
  ml_bad_site("unknown rule");
}

}  // namespace

std::vector<MLRedexSite> ml_redexes(const MLTermPtr& t) {
  std::vector<MLRedexSite> out;
  std::vector<int> path;
  ml_collect(t, path, out);
  return out;
}

MLTermPtr ml_step(const MLTermPtr& t, const MLRedexSite& site) {
  if (site.path.empty()) return ml_contract(t, site.rule);
  MLTermPtr sub = t;
  for (int i : site.path) sub = child(sub, i);
  MLTermPtr replaced = ml_contract(sub, site.rule);
  for (int d = static_cast<int>(site.path.size()) - 1; d >= 0; --d) {
    MLTermPtr parent = t;
    for (int i = 0; i < d; ++i) parent = child(parent, site.path[i]);
    replaced = with_child(parent, site.path[d], replaced);
  }
  return replaced;
}

Result<MLTermPtr, MLFuelExhausted> ml_normalize(const MLTermPtr& t,
                                                long long fuel) {
  MLTermPtr cur = t;
  for (long long used = 0;; ++used) {
    auto sites = ml_redexes(cur);
    if (sites.empty()) return cur;
    if (used >= fuel) return MLFuelExhausted{cur};
    cur = ml_step(cur, sites.front());
  }
}

bool ml_reachable(const MLTermPtr& from, const MLTermPtr& to, long long fuel) {
  std::string target = ml_canon_key(to);
  if (ml_canon_key(from) == target) return true;
  std::unordered_set<std::string> seen{ml_canon_key(from)};
  std::deque<MLTermPtr> queue{from};
  long long expansions = 0;
  while (!queue.empty() && expansions < fuel) {
    MLTermPtr cur = queue.front();
    queue.pop_front();
    ++expansions;
    for (const auto& site : ml_redexes(cur)) {
      MLTermPtr next = ml_step(cur, site);
      std::string key = ml_canon_key(next);
      if (key == target) return true;
      if (seen.insert(key).second) queue.push_back(next);
    }
  }
  return false;
}

// ---------------------------------------------------------------- printing

namespace {

void print_ml_type_at(const MLTypePtr& t, int level, std::string& out) {
  if (auto* x = as<MAtom>(t)) {
    out += x->name;
    return;
  }
  if (auto* x = as<MArrow>(t)) {
    bool parens = level > 0;
    if (parens) out += '(';
    print_ml_type_at(x->dom, 1, out);
    out += " -> ";
    print_ml_type_at(x->cod, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* x = as<MProduct>(t)) {
    bool parens = level > 1;
    if (parens) out += '(';
    print_ml_type_at(x->left, 1, out);
    out += " * ";
    print_ml_type_at(x->right, 2, out);
    if (parens) out += ')';
    return;
  }
  out += "V ";
  print_ml_type_at(as<MNabla>(t)->body, 2, out);
}

void print_ml_at(const MLTermPtr& t, int level, std::string& out) {
  if (auto* n = as<MVar>(t)) {
    out += n->name;
    return;
  }
  if (auto* n = as<MLam>(t)) {
    bool parens = level > 0;
    if (parens) out += '(';
    out += '\\';
    out += n->binder;
    if (n->annot) {
      out += ':';
      print_ml_type_at(n->annot, 0, out);
    }
    out += ". ";
    print_ml_at(n->body, 0, out);
    if (parens) out += ')';
    return;
  }
  if (auto* n = as<MApp>(t)) {
    bool parens = level > 1;
    if (parens) out += '(';
    print_ml_at(n->fn, 1, out);
    out += ' ';
    print_ml_at(n->arg, 2, out);
    if (parens) out += ')';
    return;
  }
  if (auto* n = as<MPair>(t)) {
    out += '<';
    print_ml_at(n->first, 0, out);
    out += ", ";
    print_ml_at(n->second, 0, out);
    out += '>';
    return;
  }
  if (auto* n = as<MProj>(t)) {
    out += n->index == 1 ? "p1 " : "p2 ";
    print_ml_at(n->body, 2, out);
    return;
  }
  if (auto* n = as<MVal>(t)) {
    out += "val ";
    print_ml_at(n->body, 2, out);
    return;
  }
  auto* n = as<MLetVal>(t);
  bool parens = level > 0;
  if (parens) out += '(';
  out += "let val ";
  out += n->binder;
  out += " = ";
  print_ml_at(n->bound, 0, out);
  out += " in ";
  print_ml_at(n->body, 0, out);
  if (parens) out += ')';
}

}  // namespace

std::string print_ml_term(const MLTermPtr& t) {
  std::string out;
  print_ml_at(t, 0, out);
  return out;
}

std::string print_ml_type(const MLTypePtr& t) {
  std::string out;
  print_ml_type_at(t, 0, out);
  return out;
}

// ---------------------------------------------------------------- translation

MLTypePtr translate_type(const TypePtr& ty) {
  if (auto* x = as<TAtom>(ty)) return m_atom(x->name);
  if (auto* x = as<TArrow>(ty))
    return m_arrow(translate_type(x->dom), translate_type(x->cod));
  if (auto* x = as<TProduct>(ty))
    return m_product(translate_type(x->left), translate_type(x->right));
  return nabla(translate_type(as<TCircle>(ty)->body));
}

MLTermPtr translate_term(const TermPtr& t) {
  if (auto* n = as<Var>(t)) return m_var(n->name);
  if (auto* n = as<Lam>(t))
    return m_lam(n->binder, n->annot ? translate_type(n->annot) : nullptr,
                 translate_term(n->body));
  if (auto* n = as<App>(t))
    return m_app(translate_term(n->fn), translate_term(n->arg));
  if (auto* n = as<Pair>(t))
    return m_pair(translate_term(n->first), translate_term(n->second));
  if (auto* n = as<Proj>(t))
    return m_proj(n->index, translate_term(n->body));
  if (auto* n = as<Pure>(t)) return val(translate_term(n->body));

  auto* n = as<LetCirc>(t);
  // Source binders scope over the body only; the let-val chain's binders
  // scope over the remaining arguments too. Rename binders that occur free
  // in any argument so the chain cannot capture them.
  std::set<std::string> arg_fv;
  for (const auto& a : n->args) {
    auto fv = free_vars(a);
    arg_fv.insert(fv.begin(), fv.end());
  }
  std::set<std::string> avoid = arg_fv;
  {
    auto bfv = free_vars(n->body);
    avoid.insert(bfv.begin(), bfv.end());
    for (const auto& b : n->binders) avoid.insert(b);
  }
  std::vector<std::string> binders;
  std::vector<std::pair<std::string, TermPtr>> renames;
  for (const auto& b : n->binders) {
    if (arg_fv.count(b)) {
      std::string b2 = fresh_name(b, avoid);
      avoid.insert(b2);
      binders.push_back(b2);
      renames.emplace_back(b, var(b2));
    } else {
      binders.push_back(b);
    }
  }
  TermPtr body =
      renames.empty() ? n->body : substitute_sim(n->body, renames);

  MLTermPtr acc = val(translate_term(body));
  for (std::size_t i = n->args.size(); i-- > 0;)
    acc = let_val(binders[i], translate_term(n->args[i]), acc);
  return acc;
}

MLContext translate_context(const Context& ctx) {
  MLContext out;
  for (const auto& [name, ty] : ctx.decls)
    out.decls.emplace_back(name, translate_type(ty));
  return out;
}

}  // namespace ielc

#pragma once

// Random well-typed term generation for the property and acceptance suites.
// Terms are generated by walking the typing rules, so every sample carries
// a derivation by construction. The context is seeded with one variable per
// atom, which keeps every type inhabited and generation total. Binder names
// are globally fresh within one sample (x0, x1, ...), keeping samples in
// the variable convention the translation lemmas assume. Elimination rules
// are weighted up so most samples contain redexes.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ielc/syntax.hpp"
#include "ielc/typecheck.hpp"

namespace ielc::testgen {

struct GenConfig {
  int atoms = 4;
  int max_term_size = 30;
  int extra_ctx_vars = 2;  // beyond the per-atom seeds
  int max_let_arity = 3;
  int budget = 14;
};

struct Sample {
  Context ctx;
  TermPtr term;
  TypePtr type;
};

class TermGen {
 public:
  explicit TermGen(std::uint64_t seed, GenConfig cfg = {})
      : rng_(seed), cfg_(cfg) {}

  TypePtr random_type(int depth) {
    int pick = depth <= 0 ? 0 : int_in(0, 9);
    if (pick <= 3) return atom(atom_name(int_in(0, cfg_.atoms - 1)));
    if (pick <= 6)
      return arrow(random_type(depth - 1), random_type(depth - 1));
    if (pick <= 8) return circle(random_type(depth - 1));
    return product(random_type(depth - 1), random_type(depth - 1));
  }

  Sample sample() {
    for (;;) {
      fresh_ = 0;
      calls_ = 0;
      Context ctx;
      for (int i = 0; i < cfg_.atoms; ++i)
        ctx.decls.emplace_back("g" + std::string(1, char('a' + i)),
                               atom(atom_name(i)));
      int extra = int_in(0, cfg_.extra_ctx_vars);
      for (int i = 0; i < extra; ++i)
        ctx.decls.emplace_back("h" + std::to_string(i), random_type(2));
      TypePtr ty = random_type(2);
      if (as<TAtom>(ty)) ty = random_type(2);  // re-roll bare atoms once
      int budget = 3 + int_in(0, cfg_.budget - 3);  // spread of sizes
      TermPtr t = gen(ctx, ty, budget);
      if (t && term_size(t) <= static_cast<std::size_t>(cfg_.max_term_size))
        return {ctx, t, ty};
    }
  }

  // A term of the given type in the given context, or null if this attempt
  // dead-ends (caller retries or falls back).
  TermPtr gen(const Context& ctx, const TypePtr& ty, int budget) {
    if (++calls_ > 4000) return nullptr;  // abort runaway attempts
    std::vector<TermPtr> vars;
    for (const auto& [name, vty] : ctx.decls)
      if (type_eq(vty, ty)) vars.push_back(var(name));

    if (budget <= 0)
      return vars.empty() ? gen_intro(ctx, ty, 0)
                          : vars[int_in(0, vars.size() - 1)];

    // option codes: 0 var, 1 intro, 2 app, 3 proj; while the budget is
    // high, prefer the eliminations so terms grow and contain redexes
    std::vector<int> options;
    if (budget >= 3) {
      options.insert(options.end(), 3, 2);
      options.insert(options.end(), 1, 3);
      if (!as<TAtom>(ty)) options.insert(options.end(), 4, 1);
      if (!vars.empty()) options.push_back(0);
    } else {
      if (!vars.empty()) options.insert(options.end(), 3, 0);
      if (!as<TAtom>(ty)) options.insert(options.end(), 3, 1);
      options.push_back(2);
    }
    shuffle(options);
    options.push_back(0);  // final fallbacks so generation stays total
    options.push_back(1);

    for (int opt : options) {
      TermPtr t = nullptr;
      switch (opt) {
        case 0:
          if (!vars.empty()) t = vars[int_in(0, vars.size() - 1)];
          break;
        case 1:
          t = gen_intro(ctx, ty, budget);
          break;
        case 2: {
          TypePtr arg_ty = small_type(ctx);
          TermPtr f;
          if (flip()) {
            // plant a beta redex
            std::string x = fresh();
            Context inner = ctx;
            inner.decls.emplace_back(x, arg_ty);
            TermPtr body = gen(inner, ty, budget - 2);
            f = body ? lam(x, arg_ty, body) : nullptr;
          } else {
            f = gen(ctx, arrow(arg_ty, ty), budget - 1);
          }
          if (f)
            if (TermPtr x = gen(ctx, arg_ty, budget - 2)) t = app(f, x);
          break;
        }
        case 3: {
          TypePtr other = small_type(ctx);
          bool left = flip();
          TermPtr m;
          if (flip()) {
            // plant a projection redex
            TermPtr a = gen(ctx, ty, budget - 2);
            TermPtr b = a ? gen(ctx, other, budget - 2) : nullptr;
            m = b ? (left ? pair(a, b) : pair(b, a)) : nullptr;
          } else {
            m = gen(ctx, left ? product(ty, other) : product(other, ty),
                    budget - 1);
          }
          if (m) t = proj(left ? 1 : 2, m);
          break;
        }
      }
      if (t) return t;
    }
    return nullptr;
  }

 private:
  TermPtr gen_intro(const Context& ctx, const TypePtr& ty, int budget) {
    if (auto* a = as<TAtom>(ty)) {
      // atoms have no introduction; the seeded context always has one
      for (const auto& [name, vty] : ctx.decls)
        if (type_eq(vty, ty)) return var(name);
      (void)a;
      return nullptr;
    }
    if (auto* arr = as<TArrow>(ty)) {
      std::string x = fresh();
      Context inner = ctx;
      inner.decls.emplace_back(x, arr->dom);
      TermPtr body = gen(inner, arr->cod, budget - 1);
      if (!body) return nullptr;
      return lam(x, arr->dom, body);
    }
    if (auto* prod = as<TProduct>(ty)) {
      TermPtr a = gen(ctx, prod->left, budget - 1);
      if (!a) return nullptr;
      TermPtr b = gen(ctx, prod->right, budget - 1);
      if (!b) return nullptr;
      return pair(a, b);
    }
    auto* circ_ty = as<TCircle>(ty);
    if (budget >= 3 && flip()) {
      // let o x1..xn = M1..Mn in N with the body typed under the binders
      // alone; binder types come from the context so the body can close.
      int n = int_in(0, cfg_.max_let_arity);
      std::vector<std::string> binders;
      std::vector<TermPtr> args;
      Context body_ctx;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        TypePtr bty = small_type(ctx);
        TermPtr arg = gen(ctx, circle(bty), budget - 2);
        if (!arg) {
          ok = false;
          break;
        }
        std::string x = fresh();
        binders.push_back(x);
        args.push_back(arg);
        body_ctx.decls.emplace_back(x, bty);
      }
      if (ok)
        if (TermPtr body = gen(body_ctx, circ_ty->body, budget - n - 1))
          return let_circ(binders, args, body);
      // fall through to pure on failure
    }
    TermPtr body = gen(ctx, circ_ty->body, budget - 1);
    if (!body) return nullptr;
    return pure(body);
  }

  // Prefers types already inhabited by the context so applications close.
  TypePtr small_type(const Context& ctx) {
    if (!ctx.decls.empty() && flip())
      return ctx.decls[int_in(0, ctx.decls.size() - 1)].second;
    if (flip()) return atom(atom_name(int_in(0, cfg_.atoms - 1)));
    return random_type(1);
  }

  std::string fresh() { return "x" + std::to_string(fresh_++); }
  std::string atom_name(int i) { return std::string(1, char('a' + i)); }
  int int_in(int lo, std::size_t hi) {
    return std::uniform_int_distribution<int>(lo, static_cast<int>(hi))(rng_);
  }
  bool flip() { return int_in(0, 1) == 1; }
  void shuffle(std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(int_in(0, i - 1))]);
  }

  std::mt19937_64 rng_;
  GenConfig cfg_;
  int fresh_ = 0;
  long long calls_ = 0;
};

}  // namespace ielc::testgen

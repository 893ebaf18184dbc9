#include "ielc/reduce.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ielc/parser.hpp"

namespace ielc {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Beta: return "beta";
    case Rule::Proj1: return "proj1";
    case Rule::Proj2: return "proj2";
    case Rule::LetFlatten: return "let-flatten";
    case Rule::LetPure: return "let-pure";
    case Rule::LetEmpty: return "let-empty";
  }
  return "?";
}

namespace {

void sites_at(const TermPtr& t, const std::vector<int>& path,
              std::vector<RedexSite>& out) {
  if (auto* n = as<App>(t)) {
    if (as<Lam>(n->fn)) out.push_back({path, Rule::Beta, 0});
  } else if (auto* n = as<Proj>(t)) {
    if (as<Pair>(n->body))
      out.push_back({path, n->index == 1 ? Rule::Proj1 : Rule::Proj2, 0});
  } else if (auto* n = as<LetCirc>(t)) {
    if (n->args.empty()) {
      out.push_back({path, Rule::LetEmpty, 0});
    } else {
      bool all_pure = true;
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        if (as<LetCirc>(n->args[i]))
          out.push_back({path, Rule::LetFlatten, static_cast<int>(i)});
        if (!as<Pure>(n->args[i])) all_pure = false;
      }
      if (all_pure) out.push_back({path, Rule::LetPure, 0});
    }
  }
}

void collect(const TermPtr& t, std::vector<int>& path,
             std::vector<RedexSite>& out) {
  sites_at(t, path, out);
  for (int i = 0; i < child_count(t); ++i) {
    path.push_back(i);
    collect(child(t, i), path, out);
    path.pop_back();
  }
}

[[noreturn]] void bad_site(const char* why) {
  throw std::invalid_argument(std::string("step: site does not match: ") +
                              why);
}

TermPtr contract(const TermPtr& t, const RedexSite& site) {
  switch (site.rule) {
    case Rule::Beta: {
      auto* n = as<App>(t);
      if (!n) bad_site("not an application");
      auto* f = as<Lam>(n->fn);
      if (!f) bad_site("head is not a lambda");
      return substitute(f->body, f->binder, n->arg);
    }
    case Rule::Proj1:
    case Rule::Proj2: {
      auto* n = as<Proj>(t);
      if (!n) bad_site("not a projection");
      auto* p = as<Pair>(n->body);
      if (!p) bad_site("body is not a pair");
      int want = site.rule == Rule::Proj1 ? 1 : 2;
      if (n->index != want) bad_site("projection index differs");
      return n->index == 1 ? p->first : p->second;
    }
    case Rule::LetEmpty: {
      auto* n = as<LetCirc>(t);
      if (!n || !n->args.empty()) bad_site("not an empty let");
      return pure(n->body);
    }
    case Rule::LetPure: {
      auto* n = as<LetCirc>(t);
      if (!n || n->args.empty()) bad_site("not a nonempty let");
      std::vector<std::pair<std::string, TermPtr>> ps;
      ps.reserve(n->args.size());
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        auto* p = as<Pure>(n->args[i]);
        if (!p) bad_site("argument is not pure");
        ps.emplace_back(n->binders[i], p->body);
      }
      return pure(substitute_sim(n->body, ps));
    }
    case Rule::LetFlatten: {
      auto* outer = as<LetCirc>(t);
      if (!outer) bad_site("not a let");
      std::size_t k = static_cast<std::size_t>(site.arg);
      if (k >= outer->args.size()) bad_site("argument index out of range");
      auto* inner = as<LetCirc>(outer->args[k]);
      if (!inner) bad_site("argument is not a let");

      // Freshen the inner binders against the surviving outer binders and
      // the free variables of the outer body.
      std::set<std::string> avoid;
      for (std::size_t i = 0; i < outer->binders.size(); ++i)
        if (i != k) avoid.insert(outer->binders[i]);
      std::set<std::string> keep_clear = avoid;  // names that force a rename
      {
        auto body_fv = free_vars(outer->body);
        keep_clear.insert(body_fv.begin(), body_fv.end());
        avoid.insert(body_fv.begin(), body_fv.end());
      }
      {
        // Renaming inside the inner body must not capture its other
        // variables, and the new names must stay pairwise distinct.
        auto inner_body_fv = free_vars(inner->body);
        avoid.insert(inner_body_fv.begin(), inner_body_fv.end());
        for (const auto& w : inner->binders) avoid.insert(w);
      }
      std::vector<std::string> fresh_ws;
      std::vector<std::pair<std::string, TermPtr>> renames;
      for (const auto& w : inner->binders) {
        if (keep_clear.count(w)) {
          std::string w2 = fresh_name(w, avoid);
          avoid.insert(w2);
          fresh_ws.push_back(w2);
          renames.emplace_back(w, var(w2));
        } else {
          fresh_ws.push_back(w);
        }
      }
      TermPtr inner_body = renames.empty()
                               ? inner->body
                               : substitute_sim(inner->body, renames);

      std::vector<std::string> binders;
      std::vector<TermPtr> args;
      for (std::size_t i = 0; i < outer->binders.size(); ++i) {
        if (i == k) {
          binders.insert(binders.end(), fresh_ws.begin(), fresh_ws.end());
          args.insert(args.end(), inner->args.begin(), inner->args.end());
        } else {
          binders.push_back(outer->binders[i]);
          args.push_back(outer->args[i]);
        }
      }
      TermPtr body = substitute(outer->body, outer->binders[k], inner_body);
      return let_circ(std::move(binders), std::move(args), std::move(body));
    }
  }
  bad_site("unknown rule");
}

}  // namespace

std::vector<RedexSite> redexes(const TermPtr& t) {
  if (!well_formed(t)) throw std::invalid_argument("redexes: ill-formed term");
  std::vector<RedexSite> out;
  std::vector<int> path;
  collect(t, path, out);
  return out;
}

TermPtr step(const TermPtr& t, const RedexSite& site) {
  if (site.path.empty()) return contract(t, site);
  TermPtr sub = t;
  for (int i : site.path) sub = child(sub, i);
  TermPtr replaced = contract(sub, site);
  // rebuild along the path
  for (int d = static_cast<int>(site.path.size()) - 1; d >= 0; --d) {
    TermPtr parent = t;
    for (int i = 0; i < d; ++i) parent = child(parent, site.path[i]);
    replaced = with_child(parent, site.path[d], replaced);
  }
  return replaced;
}

Result<Trace, FuelExhausted> normalize(const TermPtr& t, long long fuel) {
  if (fuel < 0) throw std::invalid_argument("normalize: negative fuel");
  Trace trace;
  TermPtr cur = t;
  for (long long used = 0;; ++used) {
    auto sites = redexes(cur);
    if (sites.empty()) {
      trace.result = cur;
      return trace;
    }
    if (used >= fuel) {
      trace.result = cur;
      return FuelExhausted{std::move(trace)};
    }
    trace.steps.push_back({cur, sites.front()});
    cur = step(cur, sites.front());
  }
}

std::optional<TermPtr> joinable(const TermPtr& a, const TermPtr& b,
                                long long fuel) {
  if (alpha_eq(a, b)) return a;
  std::unordered_map<std::string, TermPtr> seen[2];
  std::deque<TermPtr> queue[2];
  seen[0].emplace(canon_key(a), a);
  seen[1].emplace(canon_key(b), b);
  queue[0].push_back(a);
  queue[1].push_back(b);
  long long expansions = 0;
  while ((!queue[0].empty() || !queue[1].empty()) && expansions < fuel) {
    for (int side = 0; side < 2; ++side) {
      if (queue[side].empty()) continue;
      TermPtr cur = queue[side].front();
      queue[side].pop_front();
      ++expansions;
      for (const auto& site : redexes(cur)) {
        TermPtr next = step(cur, site);
        std::string key = canon_key(next);
        if (seen[side].count(key)) continue;
        seen[side].emplace(key, next);
        queue[side].push_back(next);
        if (seen[1 - side].count(key)) return next;
      }
      if (expansions >= fuel) break;
    }
  }
  return std::nullopt;
}

Result<bool, FuelExhausted> reduction_equal(const TermPtr& a, const TermPtr& b,
                                            long long fuel) {
  auto na = normalize(a, fuel);
  if (!na) return na.error();
  auto nb = normalize(b, fuel);
  if (!nb) return nb.error();
  return alpha_eq(na.value().result, nb.value().result);
}

std::string format_site(const RedexSite& site) {
  std::ostringstream os;
  os << rule_name(site.rule) << " @ [";
  for (std::size_t i = 0; i < site.path.size(); ++i) {
    if (i) os << ',';
    os << site.path[i];
  }
  os << ']';
  if (site.rule == Rule::LetFlatten) os << " arg " << site.arg;
  return os.str();
}

std::string format_trace(const Trace& trace) {
  std::string out;
  for (const auto& s : trace.steps) {
    out += format_site(s.site);
    out += "  ";
    out += print_term(s.before);
    out += '\n';
  }
  return out;
}

}  // namespace ielc

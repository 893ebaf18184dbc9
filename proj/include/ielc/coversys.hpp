#pragma once

// Finite cover systems and their operator theory: the j operator,
// propositions, modal / prenuclear / multiplicative / IEL cover systems,
// finite lattices and locales with monotone operators, the S_L
// representation, Dedekind-MacNeille completion of finite posets, and the
// finite-domain truth-set evaluator. Carriers are indices 0..n-1 and
// subsets are bitmasks; everything is checked by exhaustion, never assumed.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ielc/result.hpp"

namespace ielc {

using Mask = std::uint32_t;

// Thrown when an exhaustive check would exceed its configured size guard.
struct guard_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- posets

struct FinitePoset {
  int n = 0;
  std::vector<Mask> up;  // up[i] = {j : i <= j}
  std::vector<std::string> names;  // optional, size n when present

  Mask all() const { return n >= 32 ? ~Mask(0) : ((Mask(1) << n) - 1); }
  bool leq(int i, int j) const { return up[i] >> j & 1; }
};

std::optional<std::string> validate_poset(const FinitePoset& p);

bool is_up_set(const FinitePoset& p, Mask x);
Mask up_closure(const FinitePoset& p, Mask x);
// {z : for all y >= z, y in a implies y in b} — the up-set Heyting arrow.
Mask heyting_up(const FinitePoset& p, Mask a, Mask b);

// All upward-closed subsets, ascending by mask value.
std::vector<Mask> up_sets(const FinitePoset& p,
                          std::size_t max_count = std::size_t(1) << 20);

// ---------------------------------------------------------------- cover systems

struct CoverSystem {
  FinitePoset poset;
  std::vector<std::pair<int, Mask>> covers;  // x |> C, extensional
  bool has_R = false;
  std::vector<Mask> R;  // R[i] = successors of i

  bool covered_by(int x, Mask c) const;
};

// jX = {x : exists C with x |> C and C included in X}.
Mask j_op(const CoverSystem& s, Mask x);

// Localised up-sets, ascending by mask value.
std::vector<Mask> propositions(const CoverSystem& s,
                               std::size_t max_count = std::size_t(1) << 20);

// <R>A = R^{-1}(A). Throws std::invalid_argument when R is absent.
Mask diamond(const CoverSystem& s, Mask a);

struct CoverFlags {
  bool existence = false;
  bool transitivity = false;
  bool refinement = false;
  bool cover = false;    // existence + transitivity + refinement
  bool localic = false;
  bool strict = false;
  bool modal = false;    // strictly localic + confluence + modal localisation
  bool prenuclear = false;
  // the axiom exactly as printed ("w in up x /\ up y"); equivalent to
  // prenuclear + serial since the printed form never mentions z
  bool mult_prenuclear_printed = false;
  // the "w in up y /\ up z" reading, which is the one that makes <R>
  // multiplicative on propositions; drives the iel flag
  bool mult_prenuclear = false;
  bool iel = false;
  std::vector<std::string> notes;  // witnesses for failed conditions
};

CoverFlags classify_cover_system(const CoverSystem& s);

// ---------------------------------------------------------------- lattices

struct FiniteLocale {
  int n = 0;
  std::vector<Mask> up;  // lattice order
  std::vector<std::vector<int>> meet, join, imp;
  int bot = 0, top = 0;
  std::vector<int> op;  // operator values; empty when absent
  std::vector<std::string> names;

  bool leq(int a, int b) const { return up[a] >> b & 1; }
  bool has_op() const { return !op.empty(); }
};

struct LocaleViolation {
  std::string what;
  std::vector<int> witness;
};

std::string describe(const LocaleViolation& v);

// Builds meet/join/implication tables and bounds from an order. Fails when
// some pair lacks a meet or join; distributivity is NOT required here (the
// completion of a poset need not be distributive) — validate_locale checks
// it.
Result<FiniteLocale, LocaleViolation> make_lattice(
    int n, std::vector<Mask> up, std::vector<int> op = {},
    std::vector<std::string> names = {});

// Lattice laws, bounds, distributivity (witness triple on failure),
// a => b = join{c : a /\ c <= b} with residuation, and monotonicity of the
// operator when present.
std::optional<LocaleViolation> validate_locale(const FiniteLocale& l);

struct OperatorFlags {
  bool monotone = false;
  bool inflationary = false;
  bool prenucleus = false;      // inflationary monotone, ja /\ b <= j(a /\ b)
  bool multiplicative = false;  // preserves finite meets including the top
  bool dense = false;           // j bot = bot
  bool nucleus = false;         // inflationary idempotent meet-preserving
};

// Pointwise classification of the locale's operator.
OperatorFlags classify_operator(const FiniteLocale& l);

// S_L: carrier L, order reversed, x |> C iff C is a subset of the down-set
// of x with join x, and x R_m y iff x <= m y when the operator is present.
Result<CoverSystem, LocaleViolation> build_SL(const FiniteLocale& l);

struct IsoReport {
  bool ok = true;
  std::vector<std::string> failures;
};

// Verifies x -> (x] is a bijection L -> Prop(S_L) preserving meet, join,
// top, bottom and implication, and (m a] = <R_m>(a] when m is present.
IsoReport representation_iso(const FiniteLocale& l);

// ---------------------------------------------------------------- completion

struct Completion {
  FiniteLocale lattice;
  std::vector<int> embedding;  // poset element -> lattice element
};

// Completion by cuts; for a lattice input the embedding is an isomorphism.
Completion dedekind_macneille(const FinitePoset& p,
                              std::size_t max_count = std::size_t(1) << 20);

// f°(a) = join{f(x) : x in sub, x <= a} and f•(a) = meet{f(x) : x in sub,
// a <= x} for f monotone on the embedded subalgebra (throws
// std::invalid_argument otherwise). Values are indexed over the full
// carrier; entries outside `sub` in f are ignored.
std::vector<int> extend_lower(const FiniteLocale& l, Mask sub,
                              const std::vector<int>& f);
std::vector<int> extend_upper(const FiniteLocale& l, Mask sub,
                              const std::vector<int>& f);

// ---------------------------------------------------------------- predicate models

class PredFormula;
using PredFormulaPtr = std::shared_ptr<const PredFormula>;

struct PFPred {
  std::string name;
  std::vector<int> vars;
};
struct PFBottom {};
struct PFAnd {
  PredFormulaPtr left, right;
};
struct PFOr {
  PredFormulaPtr left, right;
};
struct PFImplies {
  PredFormulaPtr left, right;
};
struct PFForall {
  int var;
  PredFormulaPtr body;
};
struct PFExists {
  int var;
  PredFormulaPtr body;
};
struct PFCirc {
  PredFormulaPtr body;
};

class PredFormula {
 public:
  std::variant<PFPred, PFBottom, PFAnd, PFOr, PFImplies, PFForall, PFExists,
               PFCirc>
      node;
};

PredFormulaPtr pf_pred(std::string name, std::vector<int> vars = {});
PredFormulaPtr pf_bottom();
PredFormulaPtr pf_and(PredFormulaPtr l, PredFormulaPtr r);
PredFormulaPtr pf_or(PredFormulaPtr l, PredFormulaPtr r);
PredFormulaPtr pf_implies(PredFormulaPtr l, PredFormulaPtr r);
PredFormulaPtr pf_not(PredFormulaPtr a);
PredFormulaPtr pf_forall(int var, PredFormulaPtr body);
PredFormulaPtr pf_exists(int var, PredFormulaPtr body);
PredFormulaPtr pf_circ(PredFormulaPtr body);

template <class T>
const T* as(const PredFormulaPtr& f) {
  return f ? std::get_if<T>(&f->node) : nullptr;
}

struct PredicateModel {
  CoverSystem system;
  int domain_size = 0;
  std::vector<std::string> domain_names;  // optional
  // predicate name -> argument tuple -> proposition
  std::map<std::string, std::map<std::vector<int>, Mask>> valuation;
};

std::optional<std::string> validate_predicate_model(const PredicateModel& m);

using Assignment = std::map<int, int>;  // variable index -> domain element

// ||phi|| by the truth-set clauses: bottom = j(empty), and = intersection,
// or = j(union), implies = up-set arrow, forall = intersection over D,
// exists = j(union over D), circle = <R>. The result is asserted to be a
// proposition (throws std::logic_error if not — only possible when the
// system is not strictly localic / modal as required).
Mask truth_set(const PredicateModel& m, const PredFormulaPtr& f,
               const Assignment& sigma);

// ---------------------------------------------------------------- catalogues

// All distributive lattices with at most max_size elements, exhaustive up
// to isomorphism (down-set lattices of posets with at most max_size - 1
// points, deduplicated). max_size <= 7.
std::vector<FiniteLocale> distributive_lattice_catalogue(int max_size);

// All monotone self-maps of the lattice, in lexicographic order.
void for_each_monotone_op(const FiniteLocale& l,
                          const std::function<void(const std::vector<int>&)>& fn);

// ---------------------------------------------------------------- file io

// {"elements": [...names or count], "leq": [[i,j],...], "covers":
// [[i,[j,...]],...], "R": [[i,j],...]} — the leq list is taken literally.
Result<CoverSystem, std::string> cover_system_from_json(const std::string& text);

// Raw locale file contents; shape-checked only. make_lattice turns it into
// a FiniteLocale (or a semantic violation report).
struct LocaleFile {
  int n = 0;
  std::vector<Mask> up;
  std::vector<int> op;
  std::vector<std::string> names;
};
Result<FiniteLocale, LocaleViolation> make_lattice(const LocaleFile& raw);

// {"elements": [...], "leq": [[i,j],...], "m": [i,...]}
Result<LocaleFile, std::string> locale_from_json(const std::string& text);

// Cover-system keys plus "domain" (count or names) and "valuation":
// {"P": [{"args": [i,...], "set": [j,...]}, ...], ...}
Result<PredicateModel, std::string> predicate_model_from_json(
    const std::string& text);

enum class StructureKind { CoverSystemFile, LocaleFile, PredicateModelFile };
Result<StructureKind, std::string> structure_kind(const std::string& text);

}  // namespace ielc

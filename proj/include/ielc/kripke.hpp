#pragma once

// Propositional modal formulas and finite Kripke semantics for IEL-/IEL:
// frame validation, forcing, frame enumeration, validity and countermodel
// search. Worlds are indices 0..n-1; relations and up-sets are bitmasks.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ielc/result.hpp"

namespace ielc {

// ---------------------------------------------------------------- formulas

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct FLetter {
  std::string name;
};
struct FBottom {};
struct FAnd {
  FormulaPtr left, right;
};
struct FOr {
  FormulaPtr left, right;
};
struct FImplies {
  FormulaPtr left, right;
};
struct FCirc {
  FormulaPtr body;
};

class Formula {
 public:
  std::variant<FLetter, FBottom, FAnd, FOr, FImplies, FCirc> node;
};

FormulaPtr letter(std::string name);
FormulaPtr bottom();
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr implies(FormulaPtr l, FormulaPtr r);
FormulaPtr f_not(FormulaPtr a);  // sugar for a -> false
FormulaPtr circ(FormulaPtr body);

template <class T>
const T* as(const FormulaPtr& f) {
  return f ? std::get_if<T>(&f->node) : nullptr;
}

std::vector<std::string> letters_of(const FormulaPtr& f);

// ---------------------------------------------------------------- frames

using Mask = std::uint32_t;

enum class Logic { IELMinus, IEL };

// <W, leq, E>; row masks: leq[w] = {u : w <= u}, E[w] = {u : w E u}.
struct Frame {
  int n = 0;
  std::vector<Mask> leq;
  std::vector<Mask> E;

  Mask all() const { return n >= 32 ? ~Mask(0) : ((Mask(1) << n) - 1); }
};

struct Model {
  Frame frame;
  std::map<std::string, Mask> valuation;  // letter -> up-set
};

struct FrameViolation {
  std::string condition;      // e.g. "reflexivity", "E-condition-1"
  std::vector<int> witness;   // offending worlds
};

// Order axioms, E(w) <= upset(w), antitonicity of E, and seriality for IEL.
std::optional<FrameViolation> validate_frame(const Frame& f, Logic logic);

// Up-closed valuation check; used by model loaders.
bool valuation_up_closed(const Frame& f, Mask v);

// All up-sets of the frame order, ascending by mask.
std::vector<Mask> frame_up_sets(const Frame& f);

// Worlds forcing the formula, as a mask. Throws std::invalid_argument on an
// unknown letter. With up-closed valuations the result is up-closed.
Mask eval_mask(const Model& m, const FormulaPtr& f);
bool forces(const Model& m, int world, const FormulaPtr& f);

struct ResourceGuard {
  // Admissible (valuation, world) evaluations per query.
  long long max_evaluations = 10'000'000;
};
struct GuardExceeded {
  long long needed;
};

// Truth under all up-set valuations of the formula's letters at all worlds.
Result<bool, GuardExceeded> valid_on_frame(const Frame& f,
                                           const FormulaPtr& formula,
                                           const ResourceGuard& g = {});

// Enumerates all frames on n labeled worlds satisfying the logic's frame
// conditions, ordered by the (leq, E) bit encodings. The callback returns
// false to stop early.
void enumerate_frames(int n, Logic logic,
                      const std::function<bool(const Frame&)>& fn);

struct Countermodel {
  Model model;
  int world = 0;
};

// First refuting (frame, valuation, world) in enumeration order: world count
// ascending, then (leq, E) encodings, then valuations, then worlds.
// none = valid on every frame up to the bound.
Result<std::optional<Countermodel>, GuardExceeded> countermodel(
    const FormulaPtr& f, Logic logic, int max_worlds,
    const ResourceGuard& g = {});

// Model text format: `worlds N`, one `leq: i j` / `E: i j` per edge,
// `val p: w1 w2 ...`, optional designated `world w`, `#` comments.
std::string print_model(const Model& m, std::optional<int> world = {});
struct ModelParseError {
  int line;
  std::string message;
};
Result<Model, ModelParseError> parse_model(const std::string& text);

}  // namespace ielc

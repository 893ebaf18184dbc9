#include "ielc/kripke.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ielc {

FormulaPtr letter(std::string name) {
  return std::make_shared<Formula>(Formula{FLetter{std::move(name)}});
}
FormulaPtr bottom() { return std::make_shared<Formula>(Formula{FBottom{}}); }
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FAnd{std::move(l), std::move(r)}});
}
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(Formula{FOr{std::move(l), std::move(r)}});
}
FormulaPtr implies(FormulaPtr l, FormulaPtr r) {
  return std::make_shared<Formula>(
      Formula{FImplies{std::move(l), std::move(r)}});
}
FormulaPtr f_not(FormulaPtr a) { return implies(std::move(a), bottom()); }
FormulaPtr circ(FormulaPtr body) {
  return std::make_shared<Formula>(Formula{FCirc{std::move(body)}});
}

namespace {
void collect_letters(const FormulaPtr& f, std::set<std::string>& out) {
  if (auto* x = as<FLetter>(f)) {
    out.insert(x->name);
  } else if (auto* x = as<FAnd>(f)) {
    collect_letters(x->left, out);
    collect_letters(x->right, out);
  } else if (auto* x = as<FOr>(f)) {
    collect_letters(x->left, out);
    collect_letters(x->right, out);
  } else if (auto* x = as<FImplies>(f)) {
    collect_letters(x->left, out);
    collect_letters(x->right, out);
  } else if (auto* x = as<FCirc>(f)) {
    collect_letters(x->body, out);
  }
}
}  // namespace

std::vector<std::string> letters_of(const FormulaPtr& f) {
  std::set<std::string> s;
  collect_letters(f, s);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------- frames

std::optional<FrameViolation> validate_frame(const Frame& f, Logic logic) {
  const int n = f.n;
  if (n < 0 || n > 31 || static_cast<int>(f.leq.size()) != n ||
      static_cast<int>(f.E.size()) != n)
    return FrameViolation{"shape", {}};
  for (int i = 0; i < n; ++i)
    if (!(f.leq[i] >> i & 1)) return FrameViolation{"reflexivity", {i}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (f.leq[i] >> j & 1) {
        if ((f.leq[j] & ~f.leq[i]) != 0) {
          int k = std::countr_zero(f.leq[j] & ~f.leq[i]);
          return FrameViolation{"transitivity", {i, j, k}};
        }
        if (i != j && (f.leq[j] >> i & 1))
          return FrameViolation{"antisymmetry", {i, j}};
      }
  for (int i = 0; i < n; ++i)
    if ((f.E[i] & ~f.leq[i]) != 0) {
      int j = std::countr_zero(f.E[i] & ~f.leq[i]);
      return FrameViolation{"E-condition-1", {i, j}};
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((f.leq[i] >> j & 1) && (f.E[j] & ~f.E[i]) != 0) {
        int k = std::countr_zero(f.E[j] & ~f.E[i]);
        return FrameViolation{"E-condition-2", {i, j, k}};
      }
  if (logic == Logic::IEL)
    for (int i = 0; i < n; ++i)
      if (f.E[i] == 0) return FrameViolation{"seriality", {i}};
  return std::nullopt;
}

bool valuation_up_closed(const Frame& f, Mask v) {
  for (int i = 0; i < f.n; ++i)
    if ((v >> i & 1) && (f.leq[i] & ~v) != 0) return false;
  return true;
}

std::vector<Mask> frame_up_sets(const Frame& f) {
  std::vector<Mask> out;
  for (Mask m = 0; m <= f.all(); ++m) {
    if (valuation_up_closed(f, m)) out.push_back(m);
    if (m == f.all()) break;
  }
  return out;
}

Mask eval_mask(const Model& m, const FormulaPtr& f) {
  const Frame& fr = m.frame;
  if (auto* x = as<FLetter>(f)) {
    auto it = m.valuation.find(x->name);
    if (it == m.valuation.end())
      throw std::invalid_argument("unknown letter '" + x->name + "'");
    return it->second;
  }
  if (as<FBottom>(f)) return 0;
  if (auto* x = as<FAnd>(f)) return eval_mask(m, x->left) & eval_mask(m, x->right);
  if (auto* x = as<FOr>(f)) return eval_mask(m, x->left) | eval_mask(m, x->right);
  if (auto* x = as<FImplies>(f)) {
    Mask a = eval_mask(m, x->left), b = eval_mask(m, x->right);
    Mask out = 0;
    for (int w = 0; w < fr.n; ++w)
      if ((fr.leq[w] & a & ~b) == 0) out |= Mask(1) << w;
    return out;
  }
  auto* x = as<FCirc>(f);
  Mask a = eval_mask(m, x->body);
  Mask out = 0;
  for (int w = 0; w < fr.n; ++w)
    if ((fr.E[w] & ~a) == 0) out |= Mask(1) << w;
  return out;
}

bool forces(const Model& m, int world, const FormulaPtr& f) {
  if (world < 0 || world >= m.frame.n)
    throw std::invalid_argument("unknown world");
  return (eval_mask(m, f) >> world) & 1;
}

Result<bool, GuardExceeded> valid_on_frame(const Frame& f,
                                           const FormulaPtr& formula,
                                           const ResourceGuard& g) {
  auto letters = letters_of(formula);
  if (f.n > 20) return GuardExceeded{1LL << f.n};
  auto upsets = frame_up_sets(f);
  long long valuations = 1;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    valuations *= static_cast<long long>(upsets.size());
    if (valuations * f.n > g.max_evaluations)
      return GuardExceeded{valuations * f.n};
  }
  if (valuations * f.n > g.max_evaluations)
    return GuardExceeded{valuations * f.n};

  Model m{f, {}};
  std::vector<std::size_t> idx(letters.size(), 0);
  const Mask all = f.all();
  for (;;) {
    for (std::size_t i = 0; i < letters.size(); ++i)
      m.valuation[letters[i]] = upsets[idx[i]];
    if (eval_mask(m, formula) != all) return false;
    std::size_t k = letters.size();
    while (k > 0) {
      if (++idx[k - 1] < upsets.size()) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) return true;
  }
}

void enumerate_frames(int n, Logic logic,
                      const std::function<bool(const Frame&)>& fn) {
  if (n < 1 || n > 5)
    throw std::invalid_argument("enumerate_frames: 1 <= n <= 5");
  // Off-diagonal pair list in row-major order; ascending subset masks agree
  // with ascending full-relation encodings since diagonals are constant.
  std::vector<std::pair<int, int>> off;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off.emplace_back(i, j);

  Frame f;
  f.n = n;
  f.leq.assign(n, 0);
  f.E.assign(n, 0);

  for (std::uint64_t rel = 0; rel < (std::uint64_t(1) << off.size()); ++rel) {
    for (int i = 0; i < n; ++i) f.leq[i] = Mask(1) << i;
    for (std::size_t k = 0; k < off.size(); ++k)
      if (rel >> k & 1) f.leq[off[k].first] |= Mask(1) << off[k].second;
    // partial order check
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        if (f.leq[i] >> j & 1) {
          if ((f.leq[j] & ~f.leq[i]) != 0) ok = false;
          if (i != j && (f.leq[j] >> i & 1)) ok = false;
        }
    if (!ok) continue;

    // E subsets of the leq pairs, in ascending encoding order.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (f.leq[i] >> j & 1) pairs.emplace_back(i, j);
    for (std::uint64_t e = 0; e < (std::uint64_t(1) << pairs.size()); ++e) {
      for (int i = 0; i < n; ++i) f.E[i] = 0;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (e >> k & 1) f.E[pairs[k].first] |= Mask(1) << pairs[k].second;
      bool good = true;
      for (int i = 0; i < n && good; ++i)
        for (int j = 0; j < n && good; ++j)
          if ((f.leq[i] >> j & 1) && (f.E[j] & ~f.E[i]) != 0) good = false;
      if (!good) continue;
      if (logic == Logic::IEL) {
        bool serial = true;
        for (int i = 0; i < n; ++i)
          if (f.E[i] == 0) serial = false;
        if (!serial) continue;
      }
      if (!fn(f)) return;
    }
  }
}

Result<std::optional<Countermodel>, GuardExceeded> countermodel(
    const FormulaPtr& f, Logic logic, int max_worlds, const ResourceGuard& g) {
  if (max_worlds < 1)
    throw std::invalid_argument("countermodel: max_worlds >= 1");
  auto letters = letters_of(f);
  std::optional<Countermodel> found;
  long long used = 0;
  bool exceeded = false;
  for (int n = 1; n <= max_worlds && !found && !exceeded; ++n) {
    enumerate_frames(n, logic, [&](const Frame& fr) {
      auto upsets = frame_up_sets(fr);
      Model m{fr, {}};
      std::vector<std::size_t> idx(letters.size(), 0);
      for (;;) {
        used += fr.n;
        if (used > g.max_evaluations) {
          exceeded = true;
          return false;
        }
        for (std::size_t i = 0; i < letters.size(); ++i)
          m.valuation[letters[i]] = upsets[idx[i]];
        Mask holds = eval_mask(m, f);
        if (holds != fr.all()) {
          int w = std::countr_one(holds);  // lowest unset bit
          found = Countermodel{m, w};
          return false;
        }
        std::size_t k = letters.size();
        while (k > 0) {
          if (++idx[k - 1] < upsets.size()) break;
          idx[k - 1] = 0;
          --k;
        }
        if (k == 0) return true;
      }
    });
  }
  if (exceeded) return GuardExceeded{used};
  return found;
}

// ---------------------------------------------------------------- file io

std::string print_model(const Model& m, std::optional<int> world) {
  std::ostringstream os;
  os << "worlds " << m.frame.n << "\n";
  for (int i = 0; i < m.frame.n; ++i)
    for (int j = 0; j < m.frame.n; ++j)
      if (m.frame.leq[i] >> j & 1) os << "leq: " << i << " " << j << "\n";
  for (int i = 0; i < m.frame.n; ++i)
    for (int j = 0; j < m.frame.n; ++j)
      if (m.frame.E[i] >> j & 1) os << "E: " << i << " " << j << "\n";
  for (const auto& [name, mask] : m.valuation) {
    os << "val " << name << ":";
    for (int i = 0; i < m.frame.n; ++i)
      if (mask >> i & 1) os << " " << i;
    os << "\n";
  }
  if (world) os << "world " << *world << "\n";
  return os.str();
}

Result<Model, ModelParseError> parse_model(const std::string& text) {
  Model m;
  m.frame.n = -1;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    return ModelParseError{lineno, msg};
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "worlds") {
      int n;
      if (!(ls >> n) || n < 1 || n > 31) return fail("bad world count");
      m.frame.n = n;
      m.frame.leq.assign(n, 0);
      m.frame.E.assign(n, 0);
    } else if (head == "leq:" || head == "E:") {
      if (m.frame.n < 0) return fail("edge before 'worlds'");
      int i, j;
      if (!(ls >> i >> j) || i < 0 || j < 0 || i >= m.frame.n ||
          j >= m.frame.n)
        return fail("bad edge");
      (head == "leq:" ? m.frame.leq : m.frame.E)[i] |= Mask(1) << j;
    } else if (head == "val") {
      if (m.frame.n < 0) return fail("valuation before 'worlds'");
      std::string name;
      if (!(ls >> name) || name.size() < 2 || name.back() != ':')
        return fail("bad valuation line");
      name.pop_back();
      Mask mask = 0;
      int w;
      while (ls >> w) {
        if (w < 0 || w >= m.frame.n) return fail("bad world in valuation");
        mask |= Mask(1) << w;
      }
      m.valuation[name] = mask;
    } else if (head == "world") {
      int w;
      if (!(ls >> w)) return fail("bad designated world");
      // parsed but not stored in the model proper
    } else {
      return fail("unknown directive '" + head + "'");
    }
  }
  if (m.frame.n < 0) return fail("missing 'worlds' line");
  return m;
}

}  // namespace ielc

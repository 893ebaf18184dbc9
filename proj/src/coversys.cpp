#include "ielc/coversys.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ielc {

namespace {

int popcount(Mask m) { return std::popcount(m); }

std::string elem_name(const std::vector<std::string>& names, int i) {
  if (i >= 0 && i < static_cast<int>(names.size())) return names[i];
  return std::to_string(i);
}

std::string mask_str(Mask m, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < 32; ++i)
    if (m >> i & 1) {
      if (!first) out += ",";
      out += elem_name(names, i);
      first = false;
    }
  return out + "}";
}

std::vector<Mask> down_rows(int n, const std::vector<Mask>& up) {
  std::vector<Mask> dn(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (up[j] >> i & 1) dn[i] |= Mask(1) << j;
  return dn;
}

}  // namespace

// ---------------------------------------------------------------- posets

std::optional<std::string> validate_poset(const FinitePoset& p) {
  if (p.n < 0 || p.n > 31 || static_cast<int>(p.up.size()) != p.n)
    return "bad poset shape";
  for (int i = 0; i < p.n; ++i) {
    if ((p.up[i] & ~p.all()) != 0) return "leq row out of range";
    if (!(p.up[i] >> i & 1))
      return "not reflexive at " + elem_name(p.names, i);
  }
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j)
      if (p.leq(i, j)) {
        if ((p.up[j] & ~p.up[i]) != 0)
          return "not transitive at " + elem_name(p.names, i) + " <= " +
                 elem_name(p.names, j);
        if (i != j && p.leq(j, i))
          return "not antisymmetric at " + elem_name(p.names, i) + ", " +
                 elem_name(p.names, j);
      }
  return std::nullopt;
}

bool is_up_set(const FinitePoset& p, Mask x) {
  for (int i = 0; i < p.n; ++i)
    if ((x >> i & 1) && (p.up[i] & ~x) != 0) return false;
  return true;
}

Mask up_closure(const FinitePoset& p, Mask x) {
  Mask out = 0;
  for (int i = 0; i < p.n; ++i)
    if (x >> i & 1) out |= p.up[i];
  return out;
}

Mask heyting_up(const FinitePoset& p, Mask a, Mask b) {
  Mask out = 0;
  for (int i = 0; i < p.n; ++i)
    if ((p.up[i] & a & ~b) == 0) out |= Mask(1) << i;
  return out;
}

std::vector<Mask> up_sets(const FinitePoset& p, std::size_t max_count) {
  if (p.n < 0 || (p.n < 63 && (std::size_t(1) << p.n) > max_count))
    throw guard_limit_error("up_sets: 2^" + std::to_string(p.n) +
                            " exceeds the size guard");
  std::vector<Mask> out;
  for (Mask m = 0;; ++m) {
    if (is_up_set(p, m)) out.push_back(m);
    if (m == p.all()) break;
  }
  return out;
}

// ---------------------------------------------------------------- cover systems

bool CoverSystem::covered_by(int x, Mask c) const {
  for (const auto& [y, cy] : covers)
    if (y == x && cy == c) return true;
  return false;
}

Mask j_op(const CoverSystem& s, Mask x) {
  Mask out = 0;
  for (const auto& [y, c] : s.covers)
    if ((c & ~x) == 0) out |= Mask(1) << y;
  return out;
}

std::vector<Mask> propositions(const CoverSystem& s, std::size_t max_count) {
  std::vector<Mask> out;
  for (Mask m : up_sets(s.poset, max_count))
    if ((j_op(s, m) & ~m) == 0) out.push_back(m);
  return out;
}

Mask diamond(const CoverSystem& s, Mask a) {
  if (!s.has_R) throw std::invalid_argument("diamond: system has no R");
  Mask out = 0;
  for (int i = 0; i < s.poset.n; ++i)
    if (s.R[i] & a) out |= Mask(1) << i;
  return out;
}

namespace {

struct CoverIndex {
  std::set<std::pair<int, Mask>> set;
  std::vector<std::vector<Mask>> by_elem;

  explicit CoverIndex(const CoverSystem& s) : by_elem(s.poset.n) {
    for (const auto& [x, c] : s.covers) {
      set.insert({x, c});
      if (x >= 0 && x < s.poset.n) by_elem[x].push_back(c);
    }
  }
};

// Transitivity: for x |> C and every family assigning each y in C one of
// its covers, the union must again cover x. Vacuous when some y in C has
// no cover at all.
bool check_transitivity(const CoverSystem& s, const CoverIndex& ix,
                        std::string& note) {
  constexpr long long kChoiceGuard = 1 << 24;
  for (const auto& [x, c] : s.covers) {
    std::vector<int> ys;
    for (int i = 0; i < s.poset.n; ++i)
      if (c >> i & 1) ys.push_back(i);
    bool vacuous = false;
    long long total = 1;
    for (int y : ys) {
      if (ix.by_elem[y].empty()) {
        vacuous = true;
        break;
      }
      total *= static_cast<long long>(ix.by_elem[y].size());
      if (total > kChoiceGuard)
        throw guard_limit_error("transitivity: too many cover families");
    }
    // C = {} is its own empty-family union; a member without covers makes
    // the hypothesis unsatisfiable.
    if (vacuous || ys.empty()) continue;
    std::vector<std::size_t> idx(ys.size(), 0);
    for (;;) {
      Mask u = 0;
      for (std::size_t k = 0; k < ys.size(); ++k)
        u |= ix.by_elem[ys[k]][idx[k]];
      if (!ix.set.count({x, u})) {
        note = "transitivity fails: " + elem_name(s.poset.names, x) +
               " |> " + mask_str(c, s.poset.names) + " with family union " +
               mask_str(u, s.poset.names);
        return false;
      }
      std::size_t k = ys.size();
      while (k > 0) {
        if (++idx[k - 1] < ix.by_elem[ys[k - 1]].size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  return true;
}

}  // namespace

CoverFlags classify_cover_system(const CoverSystem& s) {
  CoverFlags fl;
  if (auto bad = validate_poset(s.poset)) {
    fl.notes.push_back("poset: " + *bad);
    return fl;
  }
  const auto& names = s.poset.names;
  for (const auto& [x, c] : s.covers)
    if (x < 0 || x >= s.poset.n || (c & ~s.poset.all()) != 0) {
      fl.notes.push_back("cover entry out of range");
      return fl;
    }
  if (s.has_R) {
    if (static_cast<int>(s.R.size()) != s.poset.n) {
      fl.notes.push_back("R has wrong shape");
      return fl;
    }
    for (Mask row : s.R)
      if ((row & ~s.poset.all()) != 0) {
        fl.notes.push_back("R row out of range");
        return fl;
      }
  }
  CoverIndex ix(s);

  fl.existence = true;
  for (int x = 0; x < s.poset.n && fl.existence; ++x) {
    bool found = false;
    for (Mask c : ix.by_elem[x])
      if ((c & ~s.poset.up[x]) == 0) found = true;
    if (!found) {
      fl.existence = false;
      fl.notes.push_back("existence fails at " + elem_name(names, x));
    }
  }

  std::string note;
  fl.transitivity = check_transitivity(s, ix, note);
  if (!fl.transitivity) fl.notes.push_back(note);

  fl.refinement = true;
  for (const auto& [x, c] : s.covers) {
    Mask upc = up_closure(s.poset, c);
    for (int y = 0; y < s.poset.n && fl.refinement; ++y) {
      if (!s.poset.leq(x, y)) continue;
      bool found = false;
      for (Mask cy : ix.by_elem[y])
        if ((cy & ~upc) == 0) found = true;
      if (!found) {
        fl.refinement = false;
        fl.notes.push_back("refinement fails: " + elem_name(names, x) +
                           " |> " + mask_str(c, names) + " vs " +
                           elem_name(names, y));
      }
    }
    if (!fl.refinement) break;
  }

  fl.cover = fl.existence && fl.transitivity && fl.refinement;

  bool localic_ax = true;
  for (const auto& [x, c] : s.covers) {
    Mask upc = up_closure(s.poset, c);
    bool found = false;
    for (Mask cx : ix.by_elem[x])
      if ((cx & ~upc) == 0 && (cx & ~s.poset.up[x]) == 0) found = true;
    if (!found) {
      localic_ax = false;
      fl.notes.push_back("localic axiom fails at " + elem_name(names, x) +
                         " |> " + mask_str(c, names));
      break;
    }
  }
  fl.localic = fl.cover && localic_ax;

  bool strict_ax = true;
  for (const auto& [x, c] : s.covers)
    if ((c & ~s.poset.up[x]) != 0) {
      strict_ax = false;
      fl.notes.push_back("strictness fails at " + elem_name(names, x) +
                         " |> " + mask_str(c, names));
      break;
    }
  fl.strict = fl.cover && strict_ax;

  if (!s.has_R) return fl;

  bool confluence = true;
  for (int x = 0; x < s.poset.n && confluence; ++x)
    for (int y = 0; y < s.poset.n && confluence; ++y) {
      if (!s.poset.leq(x, y)) continue;
      for (int z = 0; z < s.poset.n; ++z) {
        if (!(s.R[x] >> z & 1)) continue;
        if ((s.R[y] & up_closure(s.poset, Mask(1) << z)) == 0) {
          confluence = false;
          fl.notes.push_back("confluence fails at " + elem_name(names, x) +
                             " <= " + elem_name(names, y) + ", R " +
                             elem_name(names, z));
          break;
        }
      }
    }

  // Modal localisation over every subset A: x |> C within <R>A forces some
  // R-successor of x to have a cover inside A.
  bool modal_loc = true;
  if (s.poset.n > 16)
    throw guard_limit_error("modal localisation: carrier too large");
  for (Mask a = 0; a <= s.poset.all() && modal_loc; ++a) {
    Mask d = diamond(s, a);
    Mask has_cover_in_a = 0;
    for (int y = 0; y < s.poset.n; ++y)
      for (Mask cy : ix.by_elem[y])
        if ((cy & ~a) == 0) {
          has_cover_in_a |= Mask(1) << y;
          break;
        }
    for (const auto& [x, c] : s.covers)
      if ((c & ~d) == 0 && (s.R[x] & has_cover_in_a) == 0) {
        modal_loc = false;
        fl.notes.push_back("modal localisation fails at " +
                           elem_name(names, x) + " with A = " +
                           mask_str(a, names));
        break;
      }
    if (a == s.poset.all()) break;
  }
  fl.modal = fl.strict && confluence && modal_loc;

  bool reflexive = true;
  for (int x = 0; x < s.poset.n; ++x)
    if (!(s.R[x] >> x & 1)) {
      reflexive = false;
      fl.notes.push_back("R not reflexive at " + elem_name(names, x));
      break;
    }

  // Zig-zag: x R y gives some z above both x and y with x R z. This is also
  // the printed multiplicative condition, whose conclusion never mentions z.
  bool zigzag = true;
  for (int x = 0; x < s.poset.n && zigzag; ++x)
    for (int y = 0; y < s.poset.n; ++y) {
      if (!(s.R[x] >> y & 1)) continue;
      if ((s.poset.up[x] & s.poset.up[y] & s.R[x]) == 0) {
        zigzag = false;
        fl.notes.push_back("zig-zag fails at " + elem_name(names, x) + " R " +
                           elem_name(names, y));
        break;
      }
    }
  fl.prenuclear = fl.modal && reflexive && zigzag;

  bool serial = true;
  for (int x = 0; x < s.poset.n; ++x)
    if (s.R[x] == 0) {
      serial = false;
      fl.notes.push_back("R not serial at " + elem_name(names, x));
      break;
    }

  bool directed = true;  // the "up y /\ up z" reading
  for (int x = 0; x < s.poset.n && directed; ++x)
    for (int y = 0; y < s.poset.n && directed; ++y) {
      if (!(s.R[x] >> y & 1)) continue;
      for (int z = 0; z < s.poset.n; ++z) {
        if (!(s.R[x] >> z & 1)) continue;
        if ((s.poset.up[y] & s.poset.up[z] & s.R[x]) == 0) {
          directed = false;
          fl.notes.push_back("R-directedness fails at " +
                             elem_name(names, x) + " R " +
                             elem_name(names, y) + ", " +
                             elem_name(names, z));
          break;
        }
      }
    }

  fl.mult_prenuclear_printed = fl.modal && serial && zigzag;
  fl.mult_prenuclear = fl.modal && serial && directed && zigzag;

  bool iel_ax = true;
  for (int x = 0; x < s.poset.n && iel_ax; ++x)
    for (int y = 0; y < s.poset.n; ++y) {
      if (!(s.R[x] >> y & 1)) continue;
      if (ix.set.count({y, 0}) && !ix.set.count({x, 0})) {
        iel_ax = false;
        fl.notes.push_back("IEL axiom fails at " + elem_name(names, x) +
                           " R " + elem_name(names, y));
        break;
      }
    }
  fl.iel = fl.mult_prenuclear && iel_ax;
  return fl;
}

// ---------------------------------------------------------------- lattices

std::string describe(const LocaleViolation& v) {
  std::string out = v.what;
  if (!v.witness.empty()) {
    out += " (witness:";
    for (int w : v.witness) out += " " + std::to_string(w);
    out += ")";
  }
  return out;
}

Result<FiniteLocale, LocaleViolation> make_lattice(
    int n, std::vector<Mask> up, std::vector<int> op,
    std::vector<std::string> names) {
  FinitePoset p{n, up, names};
  if (auto bad = validate_poset(p)) return LocaleViolation{*bad, {}};
  if (!op.empty() && static_cast<int>(op.size()) != n)
    return LocaleViolation{"operator has wrong arity", {}};
  for (int v : op)
    if (v < 0 || v >= n) return LocaleViolation{"operator value out of range", {}};

  FiniteLocale l;
  l.n = n;
  l.up = std::move(up);
  l.op = std::move(op);
  l.names = std::move(names);
  auto dn = down_rows(n, l.up);

  l.meet.assign(n, std::vector<int>(n, -1));
  l.join.assign(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mask lowers = dn[a] & dn[b];
      int g = -1;
      for (int c = 0; c < n; ++c)
        if ((lowers >> c & 1) && (lowers & ~dn[c]) == 0) g = c;
      if (g < 0) return LocaleViolation{"no meet", {a, b}};
      l.meet[a][b] = g;
      Mask uppers = l.up[a] & l.up[b];
      int s = -1;
      for (int c = 0; c < n; ++c)
        if ((uppers >> c & 1) && (uppers & ~l.up[c]) == 0) s = c;
      if (s < 0) return LocaleViolation{"no join", {a, b}};
      l.join[a][b] = s;
    }

  int bot = -1, top = -1;
  for (int c = 0; c < n; ++c) {
    if (l.up[c] == p.all()) bot = c;
    if (dn[c] == p.all()) top = c;
  }
  if (bot < 0) return LocaleViolation{"no bottom", {}};
  if (top < 0) return LocaleViolation{"no top", {}};
  l.bot = bot;
  l.top = top;

  l.imp.assign(n, std::vector<int>(n, l.bot));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int r = l.bot;
      for (int c = 0; c < n; ++c)
        if (l.leq(l.meet[a][c], b)) r = l.join[r][c];
      l.imp[a][b] = r;
    }
  return l;
}

Result<FiniteLocale, LocaleViolation> make_lattice(const LocaleFile& raw) {
  return make_lattice(raw.n, raw.up, raw.op, raw.names);
}

std::optional<LocaleViolation> validate_locale(const FiniteLocale& l) {
  FinitePoset p{l.n, l.up, l.names};
  if (auto bad = validate_poset(p)) return LocaleViolation{*bad, {}};
  if (static_cast<int>(l.meet.size()) != l.n ||
      static_cast<int>(l.join.size()) != l.n ||
      static_cast<int>(l.imp.size()) != l.n)
    return LocaleViolation{"missing tables", {}};
  auto dn = down_rows(l.n, l.up);
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b) {
      int m = l.meet[a][b];
      if (m < 0 || m >= l.n || !l.leq(m, a) || !l.leq(m, b))
        return LocaleViolation{"meet not a lower bound", {a, b}};
      if (((dn[a] & dn[b]) & ~dn[m]) != 0)
        return LocaleViolation{"meet not greatest", {a, b}};
      int j = l.join[a][b];
      if (j < 0 || j >= l.n || !l.leq(a, j) || !l.leq(b, j))
        return LocaleViolation{"join not an upper bound", {a, b}};
      if (((l.up[a] & l.up[b]) & ~l.up[j]) != 0)
        return LocaleViolation{"join not least", {a, b}};
    }
  if (l.up[l.bot] != p.all()) return LocaleViolation{"bad bottom", {l.bot}};
  if (dn[l.top] != p.all()) return LocaleViolation{"bad top", {l.top}};
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b)
      for (int c = 0; c < l.n; ++c)
        if (l.meet[a][l.join[b][c]] !=
            l.join[l.meet[a][b]][l.meet[a][c]])
          return LocaleViolation{"not distributive", {a, b, c}};
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b) {
      int r = l.bot;
      for (int c = 0; c < l.n; ++c)
        if (l.leq(l.meet[a][c], b)) r = l.join[r][c];
      if (l.imp[a][b] != r)
        return LocaleViolation{"implication table differs from its definition",
                               {a, b}};
      for (int c = 0; c < l.n; ++c)
        if (l.leq(l.meet[a][c], b) != l.leq(c, l.imp[a][b]))
          return LocaleViolation{"residuation fails", {a, b, c}};
    }
  if (l.has_op()) {
    if (static_cast<int>(l.op.size()) != l.n)
      return LocaleViolation{"operator has wrong arity", {}};
    for (int a = 0; a < l.n; ++a)
      for (int b = 0; b < l.n; ++b)
        if (l.leq(a, b) && !l.leq(l.op[a], l.op[b]))
          return LocaleViolation{"operator not monotone", {a, b}};
  }
  return std::nullopt;
}

OperatorFlags classify_operator(const FiniteLocale& l) {
  if (!l.has_op())
    throw std::invalid_argument("classify_operator: no operator");
  OperatorFlags f;
  f.monotone = true;
  f.inflationary = true;
  bool prelaw = true, meets = true, idem = true;
  for (int a = 0; a < l.n; ++a) {
    if (!l.leq(a, l.op[a])) f.inflationary = false;
    if (l.op[l.op[a]] != l.op[a]) idem = false;
    for (int b = 0; b < l.n; ++b) {
      if (l.leq(a, b) && !l.leq(l.op[a], l.op[b])) f.monotone = false;
      if (!l.leq(l.meet[l.op[a]][b], l.op[l.meet[a][b]])) prelaw = false;
      if (l.op[l.meet[a][b]] != l.meet[l.op[a]][l.op[b]]) meets = false;
    }
  }
  f.prenucleus = f.monotone && f.inflationary && prelaw;
  f.multiplicative = meets && l.op[l.top] == l.top;
  f.dense = l.op[l.bot] == l.bot;
  f.nucleus = f.monotone && f.inflationary && idem && meets;
  return f;
}

Result<CoverSystem, LocaleViolation> build_SL(const FiniteLocale& l) {
  if (auto bad = validate_locale(l)) return *bad;
  CoverSystem s;
  s.poset.n = l.n;
  s.poset.names = l.names;
  s.poset.up = down_rows(l.n, l.up);  // order reversed
  auto dn = s.poset.up;               // dn in the lattice order
  for (int x = 0; x < l.n; ++x) {
    std::vector<Mask> subs;
    Mask d = dn[x];
    for (Mask c = d;; c = (c - 1) & d) {
      subs.push_back(c);
      if (c == 0) break;
    }
    std::sort(subs.begin(), subs.end());
    for (Mask c : subs) {
      int j = l.bot;
      for (int y = 0; y < l.n; ++y)
        if (c >> y & 1) j = l.join[j][y];
      if (j == x) s.covers.emplace_back(x, c);
    }
  }
  std::sort(s.covers.begin(), s.covers.end());
  if (l.has_op()) {
    s.has_R = true;
    s.R.assign(l.n, 0);
    for (int x = 0; x < l.n; ++x)
      for (int y = 0; y < l.n; ++y)
        if (l.leq(x, l.op[y])) s.R[x] |= Mask(1) << y;
  }
  return s;
}

IsoReport representation_iso(const FiniteLocale& l) {
  IsoReport rep;
  auto built = build_SL(l);
  if (!built) {
    rep.ok = false;
    rep.failures.push_back("locale invalid: " + describe(built.error()));
    return rep;
  }
  const CoverSystem& s = built.value();
  auto dn = down_rows(l.n, l.up);
  auto props = propositions(s);
  auto is_prop = [&](Mask m) {
    return std::binary_search(props.begin(), props.end(), m);
  };
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };

  for (int x = 0; x < l.n; ++x)
    if (!is_prop(dn[x]))
      fail("image of " + elem_name(l.names, x) + " is not a proposition");
  if (static_cast<int>(props.size()) != l.n)
    fail("Prop(S_L) has " + std::to_string(props.size()) +
         " elements, expected " + std::to_string(l.n));
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b) {
      if (dn[l.meet[a][b]] != (dn[a] & dn[b]))
        fail("meet not preserved at " + elem_name(l.names, a) + ", " +
             elem_name(l.names, b));
      if (dn[l.join[a][b]] != j_op(s, dn[a] | dn[b]))
        fail("join not preserved at " + elem_name(l.names, a) + ", " +
             elem_name(l.names, b));
      if (dn[l.imp[a][b]] != heyting_up(s.poset, dn[a], dn[b]))
        fail("implication not preserved at " + elem_name(l.names, a) + ", " +
             elem_name(l.names, b));
    }
  if (dn[l.top] != s.poset.all()) fail("top not preserved");
  if (dn[l.bot] != j_op(s, 0)) fail("bottom not preserved");
  if (l.has_op())
    for (int a = 0; a < l.n; ++a)
      if (dn[l.op[a]] != diamond(s, dn[a]))
        fail("(m a] differs from <R_m>(a] at " + elem_name(l.names, a));
  return rep;
}

// ---------------------------------------------------------------- completion

Completion dedekind_macneille(const FinitePoset& p, std::size_t max_count) {
  if (auto bad = validate_poset(p))
    throw std::invalid_argument("dedekind_macneille: " + *bad);
  if (p.n > 20 || (std::size_t(1) << p.n) > max_count)
    throw guard_limit_error("dedekind_macneille: poset too large");
  auto dn = down_rows(p.n, p.up);
  auto ub = [&](Mask a) {
    Mask out = p.all();
    for (int i = 0; i < p.n; ++i)
      if (a >> i & 1) out &= p.up[i];
    return out;
  };
  auto lb = [&](Mask b) {
    Mask out = p.all();
    for (int i = 0; i < p.n; ++i)
      if (b >> i & 1) out &= dn[i];
    return out;
  };
  std::set<Mask> cuts;
  for (Mask a = 0;; ++a) {
    cuts.insert(lb(ub(a)));
    if (a == p.all()) break;
  }
  std::vector<Mask> elems(cuts.begin(), cuts.end());
  int m = static_cast<int>(elems.size());
  std::vector<Mask> up(m, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if ((elems[i] & ~elems[j]) == 0) up[i] |= Mask(1) << j;
  auto lattice = make_lattice(m, up);
  if (!lattice)
    throw std::logic_error("dedekind_macneille: cut lattice incomplete: " +
                           describe(lattice.error()));
  Completion out{std::move(lattice).take(), {}};
  out.embedding.resize(p.n);
  for (int x = 0; x < p.n; ++x) {
    Mask cut = lb(ub(Mask(1) << x));
    auto it = std::lower_bound(elems.begin(), elems.end(), cut);
    out.embedding[x] = static_cast<int>(it - elems.begin());
  }
  return out;
}

namespace {

void check_extension_args(const FiniteLocale& l, Mask sub,
                          const std::vector<int>& f) {
  Mask all = l.n >= 32 ? ~Mask(0) : ((Mask(1) << l.n) - 1);
  if ((sub & ~all) != 0)
    throw std::invalid_argument("extend: subalgebra mask out of range");
  if (static_cast<int>(f.size()) != l.n)
    throw std::invalid_argument("extend: f must be indexed over the carrier");
  for (int x = 0; x < l.n; ++x) {
    if (!(sub >> x & 1)) continue;
    if (f[x] < 0 || f[x] >= l.n || !(sub >> f[x] & 1))
      throw std::invalid_argument("extend: f must map the subalgebra into itself");
    for (int y = 0; y < l.n; ++y)
      if ((sub >> y & 1) && l.leq(x, y) && !l.leq(f[x], f[y]))
        throw std::invalid_argument("extend: f is not monotone");
  }
}

}  // namespace

std::vector<int> extend_lower(const FiniteLocale& l, Mask sub,
                              const std::vector<int>& f) {
  check_extension_args(l, sub, f);
  std::vector<int> out(l.n, l.bot);
  for (int a = 0; a < l.n; ++a) {
    int r = l.bot;
    for (int x = 0; x < l.n; ++x)
      if ((sub >> x & 1) && l.leq(x, a)) r = l.join[r][f[x]];
    out[a] = r;
  }
  return out;
}

std::vector<int> extend_upper(const FiniteLocale& l, Mask sub,
                              const std::vector<int>& f) {
  check_extension_args(l, sub, f);
  std::vector<int> out(l.n, l.top);
  for (int a = 0; a < l.n; ++a) {
    int r = l.top;
    for (int x = 0; x < l.n; ++x)
      if ((sub >> x & 1) && l.leq(a, x)) r = l.meet[r][f[x]];
    out[a] = r;
  }
  return out;
}

// ---------------------------------------------------------------- predicate models

PredFormulaPtr pf_pred(std::string name, std::vector<int> vars) {
  return std::make_shared<PredFormula>(
      PredFormula{PFPred{std::move(name), std::move(vars)}});
}
PredFormulaPtr pf_bottom() {
  return std::make_shared<PredFormula>(PredFormula{PFBottom{}});
}
PredFormulaPtr pf_and(PredFormulaPtr l, PredFormulaPtr r) {
  return std::make_shared<PredFormula>(
      PredFormula{PFAnd{std::move(l), std::move(r)}});
}
PredFormulaPtr pf_or(PredFormulaPtr l, PredFormulaPtr r) {
  return std::make_shared<PredFormula>(
      PredFormula{PFOr{std::move(l), std::move(r)}});
}
PredFormulaPtr pf_implies(PredFormulaPtr l, PredFormulaPtr r) {
  return std::make_shared<PredFormula>(
      PredFormula{PFImplies{std::move(l), std::move(r)}});
}
PredFormulaPtr pf_not(PredFormulaPtr a) {
  return pf_implies(std::move(a), pf_bottom());
}
PredFormulaPtr pf_forall(int var, PredFormulaPtr body) {
  return std::make_shared<PredFormula>(
      PredFormula{PFForall{var, std::move(body)}});
}
PredFormulaPtr pf_exists(int var, PredFormulaPtr body) {
  return std::make_shared<PredFormula>(
      PredFormula{PFExists{var, std::move(body)}});
}
PredFormulaPtr pf_circ(PredFormulaPtr body) {
  return std::make_shared<PredFormula>(PredFormula{PFCirc{std::move(body)}});
}

std::optional<std::string> validate_predicate_model(const PredicateModel& m) {
  if (auto bad = validate_poset(m.system.poset)) return "poset: " + *bad;
  if (m.domain_size < 1) return "domain must be non-empty";
  for (const auto& [name, entries] : m.valuation) {
    std::size_t arity = entries.empty() ? 0 : entries.begin()->first.size();
    for (const auto& [args, prop] : entries) {
      if (args.size() != arity)
        return "inconsistent arity for predicate '" + name + "'";
      for (int d : args)
        if (d < 0 || d >= m.domain_size)
          return "argument out of domain for '" + name + "'";
      if (!is_up_set(m.system.poset, prop) ||
          (j_op(m.system, prop) & ~prop) != 0)
        return "value of '" + name + "' is not a proposition";
    }
  }
  return std::nullopt;
}

Mask truth_set(const PredicateModel& m, const PredFormulaPtr& f,
               const Assignment& sigma) {
  Mask r;
  if (auto* x = as<PFPred>(f)) {
    auto pit = m.valuation.find(x->name);
    if (pit == m.valuation.end())
      throw std::invalid_argument("unbound predicate '" + x->name + "'");
    std::vector<int> args;
    args.reserve(x->vars.size());
    for (int v : x->vars) {
      auto ait = sigma.find(v);
      if (ait == sigma.end())
        throw std::invalid_argument("unassigned variable x" +
                                    std::to_string(v));
      args.push_back(ait->second);
    }
    auto eit = pit->second.find(args);
    if (eit == pit->second.end())
      throw std::invalid_argument("predicate '" + x->name +
                                  "' undefined at the given tuple");
    r = eit->second;
  } else if (as<PFBottom>(f)) {
    r = j_op(m.system, 0);
  } else if (auto* x = as<PFAnd>(f)) {
    r = truth_set(m, x->left, sigma) & truth_set(m, x->right, sigma);
  } else if (auto* x = as<PFOr>(f)) {
    r = j_op(m.system,
             truth_set(m, x->left, sigma) | truth_set(m, x->right, sigma));
  } else if (auto* x = as<PFImplies>(f)) {
    r = heyting_up(m.system.poset, truth_set(m, x->left, sigma),
                   truth_set(m, x->right, sigma));
  } else if (auto* x = as<PFForall>(f)) {
    r = m.system.poset.all();
    for (int d = 0; d < m.domain_size; ++d) {
      Assignment s2 = sigma;
      s2[x->var] = d;
      r &= truth_set(m, x->body, s2);
    }
  } else if (auto* x = as<PFExists>(f)) {
    Mask u = 0;
    for (int d = 0; d < m.domain_size; ++d) {
      Assignment s2 = sigma;
      s2[x->var] = d;
      u |= truth_set(m, x->body, s2);
    }
    r = j_op(m.system, u);
  } else {
    auto* c = as<PFCirc>(f);
    r = diamond(m.system, truth_set(m, c->body, sigma));
  }
  if (!is_up_set(m.system.poset, r) || (j_op(m.system, r) & ~r) != 0)
    throw std::logic_error(
        "truth_set: result is not a proposition (system is not of the "
        "required kind)");
  return r;
}

// ---------------------------------------------------------------- catalogues

namespace {

std::string lattice_canon(int n, const std::vector<Mask>& up) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::string best;
  do {
    std::string cur(static_cast<std::size_t>(n) * n, '0');
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (up[perm[i]] >> perm[j] & 1) cur[i * n + j] = '1';
    if (best.empty() || cur < best) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::vector<FiniteLocale> distributive_lattice_catalogue(int max_size) {
  if (max_size < 1 || max_size > 7)
    throw std::invalid_argument("catalogue: 1 <= max_size <= 7");
  std::set<std::string> seen;
  std::vector<std::pair<std::string, FiniteLocale>> found;

  for (int k = 0; k + 1 <= max_size; ++k) {
    std::vector<std::pair<int, int>> off;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) off.emplace_back(i, j);
    for (std::uint64_t rel = 0; rel < (std::uint64_t(1) << off.size());
         ++rel) {
      std::vector<Mask> qup(k);
      for (int i = 0; i < k; ++i) qup[i] = Mask(1) << i;
      for (std::size_t b = 0; b < off.size(); ++b)
        if (rel >> b & 1) qup[off[b].first] |= Mask(1) << off[b].second;
      bool poset = true;
      for (int i = 0; i < k && poset; ++i)
        for (int j = 0; j < k && poset; ++j)
          if (qup[i] >> j & 1) {
            if ((qup[j] & ~qup[i]) != 0) poset = false;
            if (i != j && (qup[j] >> i & 1)) poset = false;
          }
      if (!poset) continue;

      // Down-sets of Q, abandoning early when there are too many.
      auto qdn = down_rows(k, qup);
      std::vector<Mask> ds;
      Mask qall = k >= 32 ? ~Mask(0) : ((Mask(1) << k) - 1);
      bool small = true;
      for (Mask mset = 0;; ++mset) {
        bool down = true;
        for (int i = 0; i < k && down; ++i)
          if ((mset >> i & 1) && (qdn[i] & ~mset) != 0) down = false;
        if (down) {
          ds.push_back(mset);
          if (static_cast<int>(ds.size()) > max_size) {
            small = false;
            break;
          }
        }
        if (mset == qall) break;
      }
      if (!small) continue;

      int n = static_cast<int>(ds.size());
      std::vector<Mask> up(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if ((ds[i] & ~ds[j]) == 0) up[i] |= Mask(1) << j;
      std::string canon = lattice_canon(n, up);
      if (!seen.insert(canon).second) continue;
      auto lat = make_lattice(n, up);
      if (!lat) continue;  // cannot happen for down-set lattices
      found.emplace_back(canon, std::move(lat).take());
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) {
              if (a.second.n != b.second.n) return a.second.n < b.second.n;
              return a.first < b.first;
            });
  std::vector<FiniteLocale> out;
  out.reserve(found.size());
  for (auto& [c, l] : found) out.push_back(std::move(l));
  return out;
}

void for_each_monotone_op(
    const FiniteLocale& l,
    const std::function<void(const std::vector<int>&)>& fn) {
  // Elements in a linear extension (down-set size is strictly monotone).
  auto dn = down_rows(l.n, l.up);
  std::vector<int> order(l.n);
  for (int i = 0; i < l.n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int pa = popcount(dn[a]), pb = popcount(dn[b]);
    return pa != pb ? pa < pb : a < b;
  });
  std::vector<int> f(l.n, -1);
  std::function<void(int)> go = [&](int k) {
    if (k == l.n) {
      fn(f);
      return;
    }
    int x = order[k];
    for (int v = 0; v < l.n; ++v) {
      bool ok = true;
      for (int j = 0; j < k && ok; ++j) {
        int y = order[j];
        if (l.leq(y, x) && !l.leq(f[y], v)) ok = false;
        if (l.leq(x, y) && !l.leq(v, f[y])) ok = false;
      }
      if (!ok) continue;
      f[x] = v;
      go(k + 1);
      f[x] = -1;
    }
  };
  go(0);
}

// ---------------------------------------------------------------- file io

namespace {

using nlohmann::json;

Result<json, std::string> parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return std::string("invalid JSON");
  if (!j.is_object()) return std::string("expected a JSON object");
  return j;
}

Result<std::pair<int, std::vector<std::string>>, std::string> read_elements(
    const json& j, const char* key) {
  if (!j.contains(key)) return std::string("missing \"elements\"");
  const json& e = j.at(key);
  if (e.is_number_integer()) {
    int n = e.get<int>();
    if (n < 0 || n > 20) return std::string("element count out of range");
    return std::pair<int, std::vector<std::string>>{n, {}};
  }
  if (e.is_array()) {
    std::vector<std::string> names;
    for (const auto& x : e) {
      if (!x.is_string()) return std::string("element names must be strings");
      names.push_back(x.get<std::string>());
    }
    if (names.size() > 20) return std::string("too many elements");
    return std::pair<int, std::vector<std::string>>{
        static_cast<int>(names.size()), names};
  }
  return std::string("\"elements\" must be a count or an array of names");
}

Result<std::vector<Mask>, std::string> read_relation(const json& j,
                                                     const char* key, int n,
                                                     bool required) {
  std::vector<Mask> rows(n, 0);
  if (!j.contains(key)) {
    if (required) return std::string(std::string("missing \"") + key + "\"");
    return rows;
  }
  const json& r = j.at(key);
  if (!r.is_array())
    return std::string(std::string("\"") + key + "\" must be an array");
  for (const auto& pr : r) {
    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
        !pr[1].is_number_integer())
      return std::string(std::string("\"") + key +
                         "\" entries must be [i, j] pairs");
    int a = pr[0].get<int>(), b = pr[1].get<int>();
    if (a < 0 || a >= n || b < 0 || b >= n)
      return std::string(std::string("\"") + key + "\" index out of range");
    rows[a] |= Mask(1) << b;
  }
  return rows;
}

}  // namespace

Result<CoverSystem, std::string> cover_system_from_json(
    const std::string& text) {
  auto pj = parse_json(text);
  if (!pj) return pj.error();
  const json& j = pj.value();
  auto elems = read_elements(j, "elements");
  if (!elems) return elems.error();
  auto [n, names] = elems.value();
  auto leq = read_relation(j, "leq", n, true);
  if (!leq) return leq.error();

  CoverSystem s;
  s.poset = FinitePoset{n, leq.value(), names};
  if (!j.contains("covers")) return std::string("missing \"covers\"");
  const json& cov = j.at("covers");
  if (!cov.is_array()) return std::string("\"covers\" must be an array");
  for (const auto& entry : cov) {
    if (!entry.is_array() || entry.size() != 2 ||
        !entry[0].is_number_integer() || !entry[1].is_array())
      return std::string("\"covers\" entries must be [i, [j,...]]");
    int x = entry[0].get<int>();
    if (x < 0 || x >= n) return std::string("cover element out of range");
    Mask c = 0;
    for (const auto& v : entry[1]) {
      if (!v.is_number_integer())
        return std::string("cover members must be integers");
      int y = v.get<int>();
      if (y < 0 || y >= n) return std::string("cover member out of range");
      c |= Mask(1) << y;
    }
    s.covers.emplace_back(x, c);
  }
  std::sort(s.covers.begin(), s.covers.end());
  if (j.contains("R")) {
    auto r = read_relation(j, "R", n, true);
    if (!r) return r.error();
    s.has_R = true;
    s.R = r.value();
  }
  return s;
}

Result<LocaleFile, std::string> locale_from_json(const std::string& text) {
  auto pj = parse_json(text);
  if (!pj) return pj.error();
  const json& j = pj.value();
  auto elems = read_elements(j, "elements");
  if (!elems) return elems.error();
  auto [n, names] = elems.value();
  auto leq = read_relation(j, "leq", n, true);
  if (!leq) return leq.error();
  LocaleFile raw{n, leq.value(), {}, names};
  if (j.contains("m")) {
    const json& m = j.at("m");
    if (!m.is_array() || static_cast<int>(m.size()) != n)
      return std::string("\"m\" must be an array of n element indices");
    for (const auto& v : m) {
      if (!v.is_number_integer()) return std::string("\"m\" values must be integers");
      int x = v.get<int>();
      if (x < 0 || x >= n) return std::string("\"m\" value out of range");
      raw.op.push_back(x);
    }
  }
  return raw;
}

Result<PredicateModel, std::string> predicate_model_from_json(
    const std::string& text) {
  auto sys = cover_system_from_json(text);
  if (!sys) return sys.error();
  auto pj = parse_json(text);
  if (!pj) return pj.error();
  const json& j = pj.value();
  PredicateModel m;
  m.system = sys.value();
  if (!j.contains("domain")) return std::string("missing \"domain\"");
  const json& d = j.at("domain");
  if (d.is_number_integer()) {
    m.domain_size = d.get<int>();
  } else if (d.is_array()) {
    for (const auto& x : d) {
      if (!x.is_string()) return std::string("domain names must be strings");
      m.domain_names.push_back(x.get<std::string>());
    }
    m.domain_size = static_cast<int>(m.domain_names.size());
  } else {
    return std::string("\"domain\" must be a count or an array of names");
  }
  if (!j.contains("valuation")) return std::string("missing \"valuation\"");
  const json& val = j.at("valuation");
  if (!val.is_object()) return std::string("\"valuation\" must be an object");
  for (auto it = val.begin(); it != val.end(); ++it) {
    if (!it.value().is_array())
      return std::string("valuation entries must be arrays");
    for (const auto& entry : it.value()) {
      if (!entry.is_object() || !entry.contains("args") ||
          !entry.contains("set"))
        return std::string("valuation entries need \"args\" and \"set\"");
      std::vector<int> args;
      for (const auto& a : entry.at("args")) {
        if (!a.is_number_integer())
          return std::string("\"args\" must be integers");
        args.push_back(a.get<int>());
      }
      Mask prop = 0;
      for (const auto& w : entry.at("set")) {
        if (!w.is_number_integer())
          return std::string("\"set\" must be integers");
        int x = w.get<int>();
        if (x < 0 || x >= m.system.poset.n)
          return std::string("\"set\" member out of range");
        prop |= Mask(1) << x;
      }
      m.valuation[it.key()][args] = prop;
    }
  }
  return m;
}

Result<StructureKind, std::string> structure_kind(const std::string& text) {
  auto pj = parse_json(text);
  if (!pj) return pj.error();
  const json& j = pj.value();
  if (j.contains("valuation")) return StructureKind::PredicateModelFile;
  if (j.contains("covers")) return StructureKind::CoverSystemFile;
  return StructureKind::LocaleFile;
}

}  // namespace ielc

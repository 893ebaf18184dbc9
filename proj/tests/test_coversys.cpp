#include <doctest.h>

#include <algorithm>
#include <set>

#include "ielc/coversys.hpp"

using namespace ielc;

namespace {

FiniteLocale chain(int n) {
  std::vector<Mask> up(n);
  for (int i = 0; i < n; ++i)
    up[i] = ((Mask(1) << n) - 1) & ~((Mask(1) << i) - 1);
  auto r = make_lattice(n, up);
  REQUIRE(r.ok());
  return r.value();
}

// bot=0, a=1, b=2, top=3
FiniteLocale diamond(std::vector<int> op = {}) {
  std::vector<Mask> up = {0b1111, 0b1010, 0b1100, 0b1000};
  auto r = make_lattice(4, up, std::move(op), {"bot", "a", "b", "top"});
  REQUIRE(r.ok());
  return r.value();
}

FiniteLocale with_op(FiniteLocale l, std::vector<int> op) {
  l.op = std::move(op);
  return l;
}

CoverSystem sl(const FiniteLocale& l) {
  auto r = build_SL(l);
  REQUIRE(r.ok());
  return r.value();
}

}  // namespace

TEST_CASE("up_sets") {
  FinitePoset two_chain{2, {0b11, 0b10}, {}};
  CHECK(up_sets(two_chain) == std::vector<Mask>{0b00, 0b10, 0b11});
  FinitePoset anti{2, {0b01, 0b10}, {}};
  CHECK(up_sets(anti).size() == 4);
  FinitePoset one{1, {0b1}, {}};
  CHECK(up_sets(one) == std::vector<Mask>{0, 1});
  FinitePoset big{21, std::vector<Mask>(21, 0), {}};
  CHECK_THROWS_AS(up_sets(big), guard_limit_error);
}

TEST_CASE("j operator and propositions on S_L of a chain") {
  auto s = sl(chain(3));
  // every element has a cover inside its own cone, so j(everything) is all
  CHECK(j_op(s, s.poset.all()) == s.poset.all());
  // no empty cover except at the lattice bottom
  CHECK(j_op(s, 0) == 0b001);
  // cones (down-sets of the chain) are localised
  for (Mask cone : {Mask(0b001), Mask(0b011), Mask(0b111)})
    CHECK((j_op(s, cone) & ~cone) == 0);
  auto props = propositions(s);
  CHECK(props == std::vector<Mask>{0b001, 0b011, 0b111});
}

TEST_CASE("propositions of a strictly localic system are closed under meet") {
  auto s = sl(diamond());
  auto props = propositions(s);
  CHECK(std::binary_search(props.begin(), props.end(), s.poset.all()));
  for (Mask a : props)
    for (Mask b : props)
      CHECK(std::binary_search(props.begin(), props.end(), a & b));
}

TEST_CASE("diamond operator") {
  auto l = with_op(chain(3), {0, 1, 2});  // identity
  auto s = sl(l);
  CHECK(diamond(s, 0) == 0);
  // reflexive R embeds A into <R>A
  auto props = propositions(s);
  for (Mask a : props) CHECK((a & ~diamond(s, a)) == 0);
  // (m a] = <R_m>(a]
  for (int a = 0; a < l.n; ++a) {
    Mask cone = 0;
    for (int y = 0; y < l.n; ++y)
      if (l.leq(y, a)) cone |= Mask(1) << y;
    CHECK(diamond(s, cone) == cone);  // identity operator
  }
  CHECK_THROWS_AS(diamond(sl(chain(2)), 1), std::invalid_argument);
}

TEST_CASE("classify_cover_system on built systems") {
  // identity operator: dense multiplicative prenucleus, so S_L is IEL
  auto fl = classify_cover_system(sl(with_op(diamond(), {0, 1, 2, 3})));
  CHECK(fl.cover);
  CHECK(fl.localic);
  CHECK(fl.strict);
  CHECK(fl.modal);
  CHECK(fl.prenuclear);
  CHECK(fl.mult_prenuclear_printed);
  CHECK(fl.mult_prenuclear);
  CHECK(fl.iel);

  // constant-top operator: multiplicative prenucleus but not dense
  auto fl2 = classify_cover_system(sl(with_op(chain(3), {2, 2, 2})));
  CHECK(fl2.mult_prenuclear);
  CHECK_FALSE(fl2.iel);

  // non-serial R
  CoverSystem ns;
  ns.poset = FinitePoset{1, {0b1}, {}};
  ns.covers = {{0, 0b1}};
  ns.has_R = true;
  ns.R = {0};
  auto fl3 = classify_cover_system(ns);
  CHECK(j_op(ns, 0) == 0);  // no element has an empty cover
  CHECK(fl3.modal);
  CHECK_FALSE(fl3.prenuclear);
  CHECK_FALSE(fl3.mult_prenuclear);
  bool noted = false;
  for (const auto& n : fl3.notes)
    if (n.find("serial") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("a broken cover relation is rejected with witnesses") {
  CoverSystem s;
  s.poset = FinitePoset{2, {0b11, 0b10}, {}};
  s.covers = {{0, 0b10}};  // cover of 0 exists, but none for 1
  auto fl = classify_cover_system(s);
  CHECK_FALSE(fl.cover);
  CHECK_FALSE(fl.notes.empty());
}

TEST_CASE("validate_locale") {
  CHECK_FALSE(validate_locale(chain(4)).has_value());
  CHECK_FALSE(validate_locale(diamond()).has_value());

  // pentagon N5: a lattice that is not distributive
  // 0 < a(1) < c(3) < 1(4), 0 < b(2) < 1, no other relations
  std::vector<Mask> up = {0b11111, 0b11010, 0b10100, 0b11000, 0b10000};
  auto n5 = make_lattice(5, up);
  REQUIRE(n5.ok());
  auto v = validate_locale(n5.value());
  REQUIRE(v.has_value());
  CHECK(v->what == "not distributive");
  CHECK(v->witness.size() == 3);

  // not a lattice: two maximal elements
  std::vector<Mask> up2 = {0b111, 0b010, 0b100};
  auto nl = make_lattice(3, up2);
  REQUIRE_FALSE(nl.ok());
  CHECK(nl.error().what == "no join");

  auto bad_op = with_op(chain(2), {1, 0});  // decreasing, not monotone
  auto v2 = validate_locale(bad_op);
  REQUIRE(v2.has_value());
  CHECK(v2->what == "operator not monotone");
}

TEST_CASE("classify_operator") {
  auto id = classify_operator(with_op(diamond(), {0, 1, 2, 3}));
  CHECK(id.nucleus);
  CHECK(id.prenucleus);
  CHECK(id.multiplicative);
  CHECK(id.dense);

  auto top = classify_operator(with_op(chain(3), {2, 2, 2}));
  CHECK(top.nucleus);
  CHECK(top.multiplicative);
  CHECK_FALSE(top.dense);

  // double negation on the 3-chain: 0 -> 0, 1 -> 2, 2 -> 2
  auto l = chain(3);
  std::vector<int> dneg(3);
  for (int a = 0; a < 3; ++a) dneg[a] = l.imp[l.imp[a][0]][0];
  CHECK(dneg == std::vector<int>{0, 2, 2});
  auto nn = classify_operator(with_op(l, dneg));
  CHECK(nn.nucleus);
  CHECK(nn.dense);

  // inflationary monotone but not a prenucleus:
  // m(a) = top while m(bot) = bot breaks m a /\ b <= m(a /\ b) at (a, b)
  auto skew = classify_operator(with_op(diamond(), {0, 3, 2, 3}));
  CHECK(skew.monotone);
  CHECK(skew.inflationary);
  CHECK_FALSE(skew.prenucleus);

  CHECK_THROWS_AS(classify_operator(chain(2)), std::invalid_argument);
}

TEST_CASE("AltMult: for meet-preserving monotone maps, inflationary iff law") {
  for (const auto& l : distributive_lattice_catalogue(5)) {
    for_each_monotone_op(l, [&](const std::vector<int>& op) {
      bool meets = op[l.top] == l.top;
      for (int a = 0; a < l.n && meets; ++a)
        for (int b = 0; b < l.n && meets; ++b)
          if (op[l.meet[a][b]] != l.meet[op[a]][op[b]]) meets = false;
      if (!meets) return;
      bool inflationary = true, law = true;
      for (int a = 0; a < l.n; ++a) {
        if (!l.leq(a, op[a])) inflationary = false;
        for (int b = 0; b < l.n; ++b)
          if (!l.leq(l.meet[a][op[b]], op[l.meet[a][b]])) law = false;
      }
      CHECK(inflationary == law);
    });
  }
}

TEST_CASE("build_SL of the two-element locale") {
  auto s = sl(with_op(chain(2), {0, 1}));
  CHECK(s.poset.up == std::vector<Mask>{0b01, 0b11});  // order reversed
  std::vector<std::pair<int, Mask>> expect = {
      {0, 0}, {0, 0b01}, {1, 0b10}, {1, 0b11}};
  CHECK(s.covers == expect);
  REQUIRE(s.has_R);
  CHECK(s.R == std::vector<Mask>{0b11, 0b10});  // x R y iff x <=_L y
  auto fl = classify_cover_system(s);
  CHECK(fl.strict);
}

TEST_CASE("representation isomorphism") {
  // trivial locale
  CHECK(representation_iso(chain(1)).ok);
  // 3-chain with the constant-top operator
  CHECK(representation_iso(with_op(chain(3), {2, 2, 2})).ok);
  // all catalogue lattices up to size 4 with every monotone operator
  for (const auto& l : distributive_lattice_catalogue(4)) {
    CHECK(representation_iso(l).ok);
    for_each_monotone_op(l, [&](const std::vector<int>& op) {
      FiniteLocale lm = l;
      lm.op = op;
      auto rep = representation_iso(lm);
      CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures[0]));
    });
  }
  // a non-distributive input is reported, not crashed on
  std::vector<Mask> up = {0b11111, 0b11010, 0b10100, 0b11000, 0b10000};
  auto n5 = make_lattice(5, up);
  REQUIRE(n5.ok());
  auto rep = representation_iso(n5.value());
  CHECK_FALSE(rep.ok);
}

TEST_CASE("prenucleus and multiplicativity laws carry over to <R>") {
  int prenuclear_seen = 0, mult_seen = 0, differ_seen = 0;
  for (const auto& l : distributive_lattice_catalogue(5)) {
    for_each_monotone_op(l, [&](const std::vector<int>& op) {
      FiniteLocale lm = l;
      lm.op = op;
      auto opf = classify_operator(lm);
      if (!opf.prenucleus) return;
      auto s = sl(lm);
      auto fl = classify_cover_system(s);
      CHECK(fl.prenuclear);
      auto props = propositions(s);
      for (Mask a : props) {
        CHECK((a & ~diamond(s, a)) == 0);
        CHECK(std::binary_search(props.begin(), props.end(), diamond(s, a)));
        for (Mask b : props)
          CHECK(((a & diamond(s, b)) & ~diamond(s, a & b)) == 0);
      }
      ++prenuclear_seen;
      if (opf.multiplicative) {
        CHECK(fl.mult_prenuclear);
        CHECK(fl.mult_prenuclear_printed);
        for (Mask a : props)
          for (Mask b : props)
            CHECK(diamond(s, a & b) == (diamond(s, a) & diamond(s, b)));
        CHECK(diamond(s, s.poset.all()) == s.poset.all());
        ++mult_seen;
      }
      if (fl.mult_prenuclear_printed != fl.mult_prenuclear) ++differ_seen;
    });
  }
  CHECK(prenuclear_seen > 50);
  CHECK(mult_seen > 10);
  MESSAGE("printed/variant classifications differ on ", differ_seen,
          " S_L systems");
}

// A cover system (not of S_L shape) that satisfies the multiplicative
// axiom exactly as printed but not the directed variant; on it <R> fails
// to distribute over intersections, which is why the variant reading
// drives the iel flag and the truth-set logic selection.
TEST_CASE("printed and variant multiplicative readings genuinely differ") {
  CoverSystem s;
  s.poset.n = 4;  // diamond as the system order: 0 below 1,2 below 3
  s.poset.up = {0b1111, 0b1010, 0b1100, 0b1000};
  for (int x = 0; x < 4; ++x) s.covers.emplace_back(x, Mask(1) << x);
  s.has_R = true;
  s.R = {0b0111, 0b1010, 0b1100, 0b1000};

  auto fl = classify_cover_system(s);
  CHECK(fl.strict);
  CHECK(fl.modal);
  CHECK(fl.prenuclear);
  CHECK(fl.mult_prenuclear_printed);
  CHECK_FALSE(fl.mult_prenuclear);

  // and indeed <R> is not multiplicative on its propositions
  Mask a = 0b1010, b = 0b1100;  // the cones of 1 and 2
  CHECK((diamond(s, a) & diamond(s, b)) != diamond(s, a & b));
}

TEST_CASE("dedekind_macneille") {
  // two-element antichain completes to the four-element Boolean lattice
  FinitePoset anti{2, {0b01, 0b10}, {}};
  auto c = dedekind_macneille(anti);
  CHECK(c.lattice.n == 4);
  CHECK_FALSE(validate_locale(c.lattice).has_value());
  CHECK(c.embedding.size() == 2);
  CHECK(c.embedding[0] != c.embedding[1]);

  FinitePoset huge{21, std::vector<Mask>(21, 0), {}};
  CHECK_THROWS_AS(dedekind_macneille(huge), guard_limit_error);

  // a lattice completes to itself
  auto d = diamond();
  FinitePoset dp{d.n, d.up, {}};
  auto cd = dedekind_macneille(dp);
  CHECK(cd.lattice.n == d.n);
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      CHECK(d.leq(i, j) ==
            cd.lattice.leq(cd.embedding[i], cd.embedding[j]));

  // three-element fence: completion is join- and meet-dense
  FinitePoset fence{3, {0b011, 0b010, 0b110}, {}};
  auto cf = dedekind_macneille(fence);
  CHECK(cf.lattice.n == 4);
  const auto& L = cf.lattice;
  for (int a = 0; a < L.n; ++a) {
    int jn = L.bot, mt = L.top;
    for (int x : cf.embedding) {
      if (L.leq(x, a)) jn = L.join[jn][x];
      if (L.leq(a, x)) mt = L.meet[mt][x];
    }
    CHECK(jn == a);
    CHECK(mt == a);
  }
}

TEST_CASE("lower and upper extensions") {
  auto d = diamond();
  // subalgebra {bot, top}, f = identity
  Mask sub = 0b1001;
  std::vector<int> f = {0, 0, 0, 3};
  auto lo = extend_lower(d, sub, f);
  auto hi = extend_upper(d, sub, f);
  CHECK(lo == std::vector<int>{0, 0, 0, 3});
  CHECK(hi == std::vector<int>{0, 3, 3, 3});
  for (int a = 0; a < d.n; ++a) CHECK(d.leq(lo[a], hi[a]));
  // both restrict to f on the subalgebra
  for (int x = 0; x < d.n; ++x)
    if (sub >> x & 1) {
      CHECK(lo[x] == f[x]);
      CHECK(hi[x] == f[x]);
    }

  // subalgebra = everything: both extensions are f itself
  std::vector<int> g = {0, 1, 2, 3};
  CHECK(extend_lower(d, 0b1111, g) == g);
  CHECK(extend_upper(d, 0b1111, g) == g);

  std::vector<int> bad = {3, 0, 0, 0};  // not monotone on {bot, top}
  CHECK_THROWS_AS(extend_lower(d, 0b1001, bad), std::invalid_argument);
}

TEST_CASE("truth sets") {
  // IEL system: identity operator on the 3-chain
  PredicateModel iel;
  iel.system = sl(with_op(chain(3), {0, 1, 2}));
  iel.domain_size = 1;
  auto props = propositions(iel.system);
  CHECK_FALSE(validate_predicate_model(iel).has_value());

  CHECK(truth_set(iel, pf_bottom(), {}) == 0b001);  // j(empty) = {bot}

  // co-reflection has full truth set under every propositional valuation
  Mask all = iel.system.poset.all();
  for (Mask p : props) {
    PredicateModel m = iel;
    m.valuation["p"][{}] = p;
    CHECK(truth_set(m, pf_implies(pf_pred("p"), pf_circ(pf_pred("p"))), {}) ==
          all);
  }
  // ~O false is full exactly on IEL systems
  CHECK(truth_set(iel, pf_not(pf_circ(pf_bottom())), {}) == all);

  PredicateModel notiel;
  notiel.system = sl(with_op(chain(3), {2, 2, 2}));
  notiel.domain_size = 1;
  CHECK(truth_set(notiel, pf_not(pf_circ(pf_bottom())), {}) !=
        notiel.system.poset.all());

  // quantifiers over a two-element domain
  PredicateModel q;
  q.system = sl(with_op(chain(2), {0, 1}));
  q.domain_size = 2;
  q.valuation["P"][{0}] = 0b01;  // (bot]
  q.valuation["P"][{1}] = 0b11;  // top proposition
  CHECK_FALSE(validate_predicate_model(q).has_value());
  CHECK(truth_set(q, pf_exists(0, pf_pred("P", {0})), {}) == 0b11);
  CHECK(truth_set(q, pf_forall(0, pf_pred("P", {0})), {}) == 0b01);

  CHECK_THROWS_AS(truth_set(iel, pf_pred("nope"), {}), std::invalid_argument);
  CHECK_THROWS_AS(truth_set(q, pf_pred("P", {5}), {}), std::invalid_argument);
}

TEST_CASE("distributive lattice catalogue") {
  auto cat = distributive_lattice_catalogue(6);
  std::vector<int> by_size(7, 0);
  for (const auto& l : cat) {
    ++by_size[l.n];
    CHECK_FALSE(validate_locale(l).has_value());
  }
  CHECK(by_size[1] == 1);
  CHECK(by_size[2] == 1);
  CHECK(by_size[3] == 1);
  CHECK(by_size[4] == 2);
  CHECK(by_size[5] == 3);
  CHECK(by_size[6] == 5);
  CHECK(cat.size() == 13);
}

namespace {
// Brute-force count of distributive lattices with exactly n elements up to
// isomorphism, enumerating every labeled order directly. Cross-checks the
// Birkhoff-style catalogue construction.
int brute_distributive_count(int n) {
  std::set<std::string> canon;
  std::vector<std::pair<int, int>> off;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off.emplace_back(i, j);
  for (std::uint64_t rel = 0; rel < (std::uint64_t(1) << off.size()); ++rel) {
    std::vector<Mask> up(n);
    for (int i = 0; i < n; ++i) up[i] = Mask(1) << i;
    for (std::size_t b = 0; b < off.size(); ++b)
      if (rel >> b & 1) up[off[b].first] |= Mask(1) << off[b].second;
    bool poset = true;
    for (int i = 0; i < n && poset; ++i)
      for (int j = 0; j < n && poset; ++j)
        if (up[i] >> j & 1) {
          if ((up[j] & ~up[i]) != 0) poset = false;
          if (i != j && (up[j] >> i & 1)) poset = false;
        }
    if (!poset) continue;
    auto lat = make_lattice(n, up);
    if (!lat.ok()) continue;
    if (validate_locale(lat.value()).has_value()) continue;  // not distributive
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
    canon.insert(best);
  }
  return static_cast<int>(canon.size());
}
}  // namespace

TEST_CASE("catalogue agrees with direct enumeration up to size 5") {
  auto cat = distributive_lattice_catalogue(5);
  std::vector<int> by_size(6, 0);
  for (const auto& l : cat) ++by_size[l.n];
  for (int n = 1; n <= 5; ++n) CHECK(by_size[n] == brute_distributive_count(n));
}

TEST_CASE("monotone map enumeration") {
  int count = 0;
  auto c4 = chain(4);
  for_each_monotone_op(c4, [&](const std::vector<int>& op) {
    ++count;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (c4.leq(a, b)) CHECK(c4.leq(op[a], op[b]));
  });
  CHECK(count == 35);  // binomial(7, 3)
}

TEST_CASE("structure files") {
  const std::string sl2 = R"({
    "elements": ["bot", "top"],
    "leq": [[0,0],[1,0],[1,1]],
    "covers": [[0,[]],[0,[0]],[1,[1]],[1,[0,1]]],
    "R": [[0,0],[0,1],[1,1]]
  })";
  auto s = cover_system_from_json(sl2);
  REQUIRE(s.ok());
  auto built = sl(with_op(chain(2), {0, 1}));
  CHECK(s.value().poset.up == built.poset.up);
  CHECK(s.value().covers == built.covers);
  CHECK(s.value().R == built.R);
  CHECK(classify_cover_system(s.value()).iel);

  CHECK_FALSE(cover_system_from_json("{").ok());
  CHECK_FALSE(cover_system_from_json(R"({"elements": 2})").ok());
  CHECK_FALSE(
      cover_system_from_json(R"({"elements": 2, "leq": [[0,5]], "covers": []})")
          .ok());

  const std::string loc = R"({
    "elements": ["bot", "a", "b", "top"],
    "leq": [[0,0],[0,1],[0,2],[0,3],[1,1],[1,3],[2,2],[2,3],[3,3]],
    "m": [0, 1, 2, 3]
  })";
  auto lf = locale_from_json(loc);
  REQUIRE(lf.ok());
  auto lat = make_lattice(lf.value());
  REQUIRE(lat.ok());
  CHECK(lat.value().n == 4);
  CHECK(representation_iso(lat.value()).ok);

  CHECK(structure_kind(sl2).value() == StructureKind::CoverSystemFile);
  CHECK(structure_kind(loc).value() == StructureKind::LocaleFile);

  const std::string pm = R"({
    "elements": 2,
    "leq": [[0,0],[1,0],[1,1]],
    "covers": [[0,[]],[0,[0]],[1,[1]],[1,[0,1]]],
    "R": [[0,0],[0,1],[1,1]],
    "domain": ["d0", "d1"],
    "valuation": {"P": [{"args": [0], "set": [0]}, {"args": [1], "set": [0, 1]}]}
  })";
  auto pmr = predicate_model_from_json(pm);
  REQUIRE(pmr.ok());
  CHECK(structure_kind(pm).value() == StructureKind::PredicateModelFile);
  CHECK_FALSE(validate_predicate_model(pmr.value()).has_value());
  CHECK(truth_set(pmr.value(), pf_exists(0, pf_pred("P", {0})), {}) == 0b11);
}

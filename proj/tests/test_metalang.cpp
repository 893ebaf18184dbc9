#include <doctest.h>

#include "ielc/metalang.hpp"
#include "ielc/parser.hpp"
#include "ielc/reduce.hpp"
#include "support/gen.hpp"

using namespace ielc;

namespace {
TermPtr tp(const std::string& s) {
  auto r = parse_term(s);
  REQUIRE(r.ok());
  return r.value();
}
}  // namespace

TEST_CASE("ml typing rules") {
  MLContext ctx;
  ctx.decls.emplace_back("x", m_atom("a"));
  auto r = ml_infer(ctx, val(m_var("x")));
  REQUIRE(r.ok());
  CHECK(ml_type_eq(r.value(), nabla(m_atom("a"))));

  MLContext ctx2;
  ctx2.decls.emplace_back("m", nabla(m_atom("a")));
  ctx2.decls.emplace_back("f", m_arrow(m_atom("a"), nabla(m_atom("b"))));
  auto r2 = ml_infer(
      ctx2, let_val("x", m_var("m"), m_app(m_var("f"), m_var("x"))));
  REQUIRE(r2.ok());
  CHECK(ml_type_eq(r2.value(), nabla(m_atom("b"))));

  // let val x = m in x needs the body to have a nabla type
  MLContext ctx3;
  ctx3.decls.emplace_back("m", nabla(m_atom("a")));
  auto r3 = ml_infer(ctx3, let_val("x", m_var("m"), m_var("x")));
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.error().kind == TypeErrorKind::NotModal);

  // ... and it typechecks when the bound type is doubly modal
  MLContext ctx4;
  ctx4.decls.emplace_back("m", nabla(nabla(m_atom("a"))));
  auto r4 = ml_infer(ctx4, let_val("x", m_var("m"), m_var("x")));
  REQUIRE(r4.ok());
  CHECK(ml_type_eq(r4.value(), nabla(m_atom("a"))));

  // the let-val body keeps the outer context, unlike the source calculus
  MLContext ctx5;
  ctx5.decls.emplace_back("y", m_atom("b"));
  ctx5.decls.emplace_back("m", nabla(m_atom("a")));
  auto r5 = ml_infer(ctx5, let_val("x", m_var("m"), val(m_var("y"))));
  REQUIRE(r5.ok());
  CHECK(ml_type_eq(r5.value(), nabla(m_atom("b"))));
}

TEST_CASE("ml reduction rules") {
  // rule 1 with N = val x
  auto t1 = let_val("x", val(m_var("m")), val(m_var("x")));
  auto sites1 = ml_redexes(t1);
  REQUIRE_FALSE(sites1.empty());
  CHECK(sites1[0].rule == MLRule::LetValBeta);
  CHECK(ml_alpha_eq(ml_step(t1, sites1[0]), val(m_var("m"))));

  // rule 2, the commuting conversion
  auto t2 = let_val("x", let_val("y", m_var("n"), m_var("p")), m_var("m"));
  auto sites2 = ml_redexes(t2);
  REQUIRE(sites2.size() == 1);
  CHECK(sites2[0].rule == MLRule::LetValAssoc);
  CHECK(ml_alpha_eq(
      ml_step(t2, sites2[0]),
      let_val("y", m_var("n"), let_val("x", m_var("p"), m_var("m")))));

  // rule 2 freshens the migrating binder against the outer body
  auto t2c = let_val("x", let_val("y", m_var("n"), m_var("p")),
                     m_pair(m_var("m"), m_var("y")));
  auto s2c = ml_step(t2c, ml_redexes(t2c)[0]);
  CHECK(ml_free_vars(s2c) == ml_free_vars(t2c));
  CHECK(ml_alpha_eq(s2c, let_val("w", m_var("n"),
                                 let_val("x", m_var("p"),
                                         m_pair(m_var("m"), m_var("y"))))));

  // rule 3 (eta), in the reading that typechecks
  auto t3 = let_val("x", m_var("m"), val(m_var("x")));
  auto sites3 = ml_redexes(t3);
  REQUIRE(sites3.size() == 1);
  CHECK(sites3[0].rule == MLRule::LetValEta);
  CHECK(ml_alpha_eq(ml_step(t3, sites3[0]), m_var("m")));
}

TEST_CASE("type translation") {
  CHECK(ml_type_eq(translate_type(parse_type("O (a -> b)").value()),
                   nabla(m_arrow(m_atom("a"), m_atom("b")))));
  CHECK(ml_type_eq(translate_type(parse_type("a").value()), m_atom("a")));
  CHECK(ml_type_eq(translate_type(parse_type("O O a").value()),
                   nabla(nabla(m_atom("a")))));
  CHECK(ml_type_eq(translate_type(parse_type("a * O b").value()),
                   m_product(m_atom("a"), nabla(m_atom("b")))));
}

TEST_CASE("term translation") {
  CHECK(ml_alpha_eq(translate_term(tp("pure x")), val(m_var("x"))));
  CHECK(ml_alpha_eq(translate_term(tp("let o x = m in x")),
                    let_val("x", m_var("m"), val(m_var("x")))));
  CHECK(ml_alpha_eq(
      translate_term(tp("let o g,y = f,x in g y")),
      let_val("g", m_var("f"),
              let_val("y", m_var("x"), val(m_app(m_var("g"), m_var("y")))))));
  CHECK(ml_alpha_eq(translate_term(tp("let o _ = _ in m")),
                    val(m_var("m"))));
}

TEST_CASE("translation freshens binders that collide with argument variables") {
  // binder x would capture the free x of the second argument
  auto t = tp("let o x,y = m, x in <x, y>");
  auto ml = translate_term(t);
  CHECK(ml_free_vars(ml) == std::set<std::string>{"m", "x"});
  CHECK(ml_alpha_eq(
      ml, let_val("u", m_var("m"),
                  let_val("y", m_var("x"),
                          val(m_pair(m_var("u"), m_var("y")))))));

  // substitution commutation across exactly this corner
  auto m0 = tp("let o y = z in y");
  auto planted = substitute(m0, "z", tp("<y, w>"));
  CHECK(ml_alpha_eq(translate_term(planted),
                    ml_substitute(translate_term(m0), "z",
                                  translate_term(tp("<y, w>")))));
}

TEST_CASE("typing preservation on the corpus") {
  testgen::TermGen gen(2101);
  for (int i = 0; i < 200; ++i) {
    auto s = gen.sample();
    auto src = infer(s.ctx, s.term);
    REQUIRE(src.ok());
    auto r = ml_infer(translate_context(s.ctx), translate_term(s.term));
    REQUIRE_MESSAGE(r.ok(), print_term(s.term));
    CHECK(ml_type_eq(r.value(), translate_type(src.value())));
  }
}

TEST_CASE("substitution commutes with translation") {
  testgen::TermGen gen(2102);
  for (int i = 0; i < 150; ++i) {
    auto a = gen.sample();
    auto b = gen.sample();
    auto fv = free_vars(a.term);
    std::string x = fv.empty() ? "zz" : *fv.begin();
    CHECK(ml_alpha_eq(translate_term(substitute(a.term, x, b.term)),
                      ml_substitute(translate_term(a.term), x,
                                    translate_term(b.term))));
  }
}

TEST_CASE("every source step is simulated in the metalanguage") {
  testgen::TermGen gen(2103);
  int steps_checked = 0;
  for (int i = 0; i < 100; ++i) {
    auto s = gen.sample();
    auto ml_from = translate_term(s.term);
    for (const auto& site : redexes(s.term)) {
      auto ml_to = translate_term(step(s.term, site));
      std::string what = print_term(s.term) + "  via " + format_site(site);
      CHECK_MESSAGE(ml_reachable(ml_from, ml_to, 1000), what);
      ++steps_checked;
    }
  }
  CHECK(steps_checked > 100);
}

TEST_CASE("metalanguage normalization terminates on translated corpus") {
  testgen::TermGen gen(2104);
  for (int i = 0; i < 150; ++i) {
    auto s = gen.sample();
    auto r = ml_normalize(translate_term(s.term), 100000);
    REQUIRE_MESSAGE(r.ok(), print_term(s.term));
    CHECK(ml_redexes(r.value()).empty());
  }
}

TEST_CASE("ml printing") {
  CHECK(print_ml_term(let_val("x", m_var("m"), val(m_var("x")))) ==
        "let val x = m in val x");
  CHECK(print_ml_type(nabla(m_arrow(m_atom("a"), m_atom("b")))) ==
        "V (a -> b)");
  CHECK(print_ml_term(m_lam("x", m_atom("a"), val(m_var("x")))) ==
        "\\x:a. val x");
}

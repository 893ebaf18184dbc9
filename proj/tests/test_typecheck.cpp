#include <doctest.h>

#include <algorithm>
#include <random>

#include "ielc/parser.hpp"
#include "ielc/typecheck.hpp"
#include "support/gen.hpp"

using namespace ielc;

namespace {
TermPtr tp(const std::string& s) {
  auto r = parse_term(s);
  REQUIRE(r.ok());
  return r.value();
}
TypePtr ty(const std::string& s) {
  auto r = parse_type(s);
  REQUIRE(r.ok());
  return r.value();
}
Context ctx_of(const std::string& s) {
  auto r = parse_context(s);
  REQUIRE(r.ok());
  return r.value();
}
}  // namespace

TEST_CASE("the canonical modal derivations") {
  auto co = infer({}, tp("\\x:a. pure x"));
  REQUIRE(co.ok());
  CHECK(type_eq(co.value(), ty("a -> O a")));

  auto k = infer({}, tp("\\f:O (a -> b). \\x:O a. let o g,y = f,x in g y"));
  REQUIRE(k.ok());
  CHECK(type_eq(k.value(), ty("O (a -> b) -> O a -> O b")));
}

TEST_CASE("let bodies are typed under the binders alone") {
  auto r = infer(ctx_of("x : a"), tp("let o _ = _ in x"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().kind == TypeErrorKind::UnboundVariable);
  CHECK(r.error().name == "x");

  // ... but the arguments still see the outer context
  auto r2 = infer(ctx_of("x : a"), tp("let o y = pure x in y"));
  REQUIRE(r2.ok());
  CHECK(type_eq(r2.value(), ty("O a")));
}

TEST_CASE("error variants") {
  auto r = infer({}, tp("p1 (pure x)"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().kind == TypeErrorKind::UnboundVariable);

  auto r2 = infer(ctx_of("x : a"), tp("p1 (pure x)"));
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.error().kind == TypeErrorKind::NotAProduct);

  auto r3 = infer(ctx_of("x : a"), tp("x x"));
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.error().kind == TypeErrorKind::NotAFunction);

  auto r4 = infer(ctx_of("x : a"), tp("let o y = x in y"));
  REQUIRE_FALSE(r4.ok());
  CHECK(r4.error().kind == TypeErrorKind::NotModal);

  auto r5 = infer({}, tp("\\x. x"));
  REQUIRE_FALSE(r5.ok());
  CHECK(r5.error().kind == TypeErrorKind::MissingAnnotation);

  auto r6 = infer({}, tp("\\x:a. \\x:b. x"));
  REQUIRE_FALSE(r6.ok());
  CHECK(r6.error().kind == TypeErrorKind::DuplicateBinding);

  auto r7 = infer({}, let_circ({"x", "y"}, {tp("pure z")}, var("x")));
  REQUIRE_FALSE(r7.ok());
  CHECK(r7.error().kind == TypeErrorKind::ArityMismatch);
  CHECK(r7.error().expected_count == 2);
  CHECK(r7.error().found_count == 1);

  CHECK_FALSE(describe(r4.error()).empty());
}

TEST_CASE("check") {
  CHECK(check({}, tp("\\x:a. pure x"), ty("a -> O a")).ok());
  auto bad = check({}, tp("\\x:a. pure x"), ty("a -> O b"));
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error().kind == TypeErrorKind::Mismatch);
  CHECK(check(ctx_of("x : a"), tp("x"), ty("a")).ok());
}

TEST_CASE("generation lemma for pure") {
  CHECK(generation_pure(ctx_of("x : a"), tp("pure x")));
  CHECK(generation_pure(ctx_of("x : a"), tp("pure (pure x)")));
  CHECK(generation_pure(ctx_of("f : a -> b\nx : a"), tp("pure (f x)")));
  CHECK_THROWS_AS(generation_pure(ctx_of("x : a"), tp("x")),
                  std::invalid_argument);
}

TEST_CASE("corpus types as generated, uniquely") {
  testgen::TermGen gen(1001);
  for (int i = 0; i < 200; ++i) {
    auto s = gen.sample();
    auto r = infer(s.ctx, s.term);
    REQUIRE_MESSAGE(r.ok(), print_term(s.term));
    CHECK(type_eq(r.value(), s.type));
    // determinism
    auto again = infer(s.ctx, s.term);
    REQUIRE(again.ok());
    CHECK(type_eq(again.value(), r.value()));
  }
}

TEST_CASE("weakening and permutation") {
  testgen::TermGen gen(1002);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 150; ++i) {
    auto s = gen.sample();
    auto r = infer(s.ctx, s.term);
    REQUIRE(r.ok());

    Context wider = s.ctx;
    wider.decls.emplace_back("fresh_w", gen.random_type(2));
    auto rw = infer(wider, s.term);
    REQUIRE(rw.ok());
    CHECK(type_eq(rw.value(), r.value()));

    Context shuffled = s.ctx;
    std::shuffle(shuffled.decls.begin(), shuffled.decls.end(), rng);
    auto rs = infer(shuffled, s.term);
    REQUIRE(rs.ok());
    CHECK(type_eq(rs.value(), r.value()));
  }
}

TEST_CASE("strengthening to free variables") {
  testgen::TermGen gen(1003);
  for (int i = 0; i < 150; ++i) {
    auto s = gen.sample();
    auto r = infer(s.ctx, s.term);
    REQUIRE(r.ok());
    auto fv = free_vars(s.term);
    Context restricted;
    for (const auto& d : s.ctx.decls)
      if (fv.count(d.first)) restricted.decls.push_back(d);
    auto rr = infer(restricted, s.term);
    REQUIRE(rr.ok());
    CHECK(type_eq(rr.value(), r.value()));
  }
}

TEST_CASE("substitution lemma") {
  testgen::TermGen gen(1004);
  int exercised = 0;
  for (int i = 0; i < 300 && exercised < 100; ++i) {
    auto s = gen.sample();
    if (s.ctx.decls.empty()) continue;
    auto [x, xty] = s.ctx.decls.back();
    Context smaller = s.ctx;
    smaller.decls.pop_back();
    TermPtr n = gen.gen(smaller, xty, 6);
    if (!n) continue;
    auto r = infer(s.ctx, s.term);
    REQUIRE(r.ok());
    auto rs = infer(smaller, substitute(s.term, x, n));
    REQUIRE_MESSAGE(rs.ok(), print_term(s.term));
    CHECK(type_eq(rs.value(), r.value()));
    ++exercised;
  }
  CHECK(exercised >= 50);
}

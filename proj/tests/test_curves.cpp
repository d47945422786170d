#include <cmath>

#include "doctest.h"
#include "twistnorm/curves.hpp"

using namespace twistnorm;

TEST_CASE("curve examples over F_3") {
  auto F = tower_field(3, 0);
  Curve ord = Curve::from_ints(F, {0, 1, 0, 0, 1});
  auto g = count_and_structure(ord);
  CHECK(g.order == 6);
  CHECK(g.str() == "Z/6");
  auto t = trace_and_ordinary(ord);
  CHECK(t.a == -2);
  CHECK(t.ordinary);
  CHECK(p_primary(ord) == AbGroupStructure(3, {3}));
  CHECK(quotient_mod_pn(ord, 1) == AbGroupStructure(3, {3}));

  Curve ss = Curve::from_ints(F, {0, 0, 0, 1, 1});
  CHECK(count_and_structure(ss).order == 4);
  auto ts = trace_and_ordinary(ss);
  CHECK(ts.a == 0);
  CHECK_FALSE(ts.ordinary);
  CHECK(p_primary(ss).is_trivial());
  CHECK(quotient_mod_pn(ss, 1).is_trivial());
}

TEST_CASE("singular equations are rejected") {
  auto F = tower_field(3, 0);
  try {
    Curve::from_ints(F, {0, 0, 0, 0, 0});
    FAIL("expected singular_curve");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_curve);
  }
}

TEST_CASE("group law and enumeration properties") {
  for (unsigned p : {2u, 3u, 5u}) {
    auto F = tower_field(p, 0);
    auto curves = all_prime_field_curves(F);
    CHECK(!curves.empty());
    for (const auto& c : curves) {
      auto pts = c.points();
      const double q = static_cast<double>(F->size());
      CHECK(std::abs(static_cast<double>(pts.size()) - q - 1) <= 2 * std::sqrt(q));
      for (const auto& P : pts) REQUIRE(c.contains(P));
      auto g = count_and_structure(c);
      CHECK(g.n1 % g.n2 == 0);
      CHECK(g.n1 * g.n2 == g.order);
      // |G / p^n G| = |G[p^n]|
      for (unsigned n = 1; n <= 3; ++n) {
        u64 killed = 0;
        const u64 pn = checked_pow(p, n);
        for (const auto& P : pts) killed += c.mul(P, pn).infinity;
        CHECK(quotient_mod_pn(p, g, n).order() == killed);
      }
      CHECK(quotient_mod_pn(p, g, 20) == p_primary(p, g));
      if (trace_and_ordinary(c, g).ordinary) CHECK(p_primary(p, g).cyclic_orders().size() <= 1);
    }
  }
}

TEST_CASE("associativity on a curve over F_27") {
  auto F = tower_field(3, 1);
  Curve c(F, {GFElem::zero(F), GFElem::one(F), GFElem::zero(F), GFElem::generator(F), GFElem::one(F)});
  auto pts = c.points();
  auto g = count_and_structure(c);
  CHECK(g.order == pts.size());
  for (std::size_t i = 0; i + 2 < pts.size() && i < 30; ++i) {
    const auto &P = pts[i], &Q = pts[i + 1], &R = pts[i + 2];
    auto l = c.add(c.add(P, Q), R), r = c.add(P, c.add(Q, R));
    CHECK(l.infinity == r.infinity);
    if (!l.infinity) CHECK((l.x == r.x && l.y == r.y));
    CHECK(c.mul(P, g.order).infinity);
  }
}

TEST_CASE("unit root valuation matches the point count") {
  for (unsigned p : {3u, 5u}) {
    auto F = tower_field(p, 0);
    for (const auto& c : all_prime_field_curves(F)) {
      auto g = count_and_structure(c);
      auto t = trace_and_ordinary(c, g);
      if (!t.ordinary) {
        CHECK_THROWS_AS(unit_root(t.a, p, p, 20), Error);
        continue;
      }
      Zp alpha = unit_root(t.a, p, p, 20);
      unsigned v = 0;
      for (u64 x = g.order; x % p == 0; x /= p) ++v;
      CHECK((Zp(p, 20, 1) - alpha).valuation() == v);
    }
  }
}

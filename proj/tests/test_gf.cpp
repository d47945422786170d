#include <random>

#include "doctest.h"
#include "twistnorm/gf.hpp"

using namespace twistnorm;

namespace {

FpMatrix scalar(unsigned p, unsigned u) { return FpMatrix::from_ints(p, {{static_cast<long>(u)}}); }

}  // namespace

TEST_CASE("frobenius examples") {
  auto F = tower_field(3, 1);
  auto t = GFElem::generator(F);
  CHECK(gf_frobenius(t) == t - GFElem::one(F));
  CHECK(gf_frobenius(t, 3) == t);
  for (unsigned s : {0u, 1u, 2u}) {
    auto G = tower_field(3, s);
    for (long c = 0; c < 3; ++c) CHECK(gf_frobenius(GFElem::scalar(G, c)) == GFElem::scalar(G, c));
  }
  CHECK(F->modulus() == std::vector<unsigned>{1, 2, 0, 1});
}

TEST_CASE("tower levels are p-powers only") {
  CHECK_THROWS_AS(make_field(3, 2), Error);
  CHECK(tower_field(3, 2)->size() == 19683);
  CHECK(tower_field(5, 1)->degree() == 5);
  CHECK_THROWS_AS(GFField(3, {2, 0, 1}), Error);  // x^2 - 1 splits
  CHECK_NOTHROW(GFField(3, {1, 0, 1}) == GFField(3, {1, 0, 1}));
}

TEST_CASE("enumerate examples") {
  auto F3 = tower_field(3, 0);
  auto all = gf_enumerate(F3);
  REQUIRE(all.size() == 3);
  for (unsigned i = 0; i < 3; ++i) CHECK(all[i] == GFElem::scalar(F3, i));
  CHECK(gf_enumerate(std::make_shared<const GFField>(3, std::vector<unsigned>{1, 0, 1})).size() == 9);
  auto F27 = gf_enumerate(tower_field(3, 1));
  CHECK(F27.front().is_zero());
  CHECK(F27.back().coeffs() == std::vector<unsigned>{2, 2, 2});
  std::vector<unsigned> big(16, 0);
  big[0] = big[1] = big[15] = 1;  // x^15 + x + 1, 2^15 elements
  CHECK_THROWS_AS(gf_enumerate(std::make_shared<const GFField>(2, big)), Error);
}

TEST_CASE("brute twist solve examples") {
  auto F = tower_field(3, 1);
  auto t = GFElem::generator(F);
  auto r = gf_brute_twist_solve({t}, scalar(3, 2));
  REQUIRE(r.solvable);
  CHECK(r.beta[0].coeffs() == std::vector<unsigned>{1, 2, 0});
  auto r2 = gf_brute_twist_solve({GFElem::one(F)}, scalar(3, 2));
  REQUIRE(r2.solvable);
  CHECK(r2.beta[0] == GFElem::scalar(F, 2));
  int unsolvable = 0;
  gf_for_each(F, [&](const GFElem& a) {
    auto s = gf_brute_twist_solve({a}, scalar(3, 1));
    CHECK(s.solvable == (a.trace() == 0));
    if (!s.solvable) {
      ++unsolvable;
      CHECK(s.candidates_checked == 27);
      CHECK(s.exhaustive);
    }
  });
  CHECK(unsolvable == 18);
}

TEST_CASE("embedding between conway levels") {
  for (unsigned p : {2u, 3u}) {
    auto small = tower_field(p, 1), big = tower_field(p, 2);
    GFEmbedding e(small, big);
    std::mt19937_64 rng(p);
    for (int i = 0; i < 50; ++i) {
      auto a = GFElem::from_index(small, rng() % small->size());
      auto b = GFElem::from_index(small, rng() % small->size());
      CHECK(e(a * b) == e(a) * e(b));
      CHECK(e(a + b) == e(a) + e(b));
      CHECK(e(gf_frobenius(a)) == gf_frobenius(e(a)));
    }
    // Conway compatibility: the norm-compatible image is used, not the fallback root.
    CHECK(e.image_of_generator() ==
          GFElem::generator(big).pow((big->size() - 1) / (small->size() - 1)));
  }
}

TEST_CASE("property: frobenius is a field automorphism") {
  std::mt19937_64 rng(1);
  for (auto F : {tower_field(3, 1), tower_field(3, 2), tower_field(5, 1), tower_field(2, 3)}) {
    for (int i = 0; i < 100; ++i) {
      auto a = GFElem::from_index(F, rng() % F->size());
      auto b = GFElem::from_index(F, rng() % F->size());
      CHECK(gf_frobenius(a * b) == gf_frobenius(a) * gf_frobenius(b));
      CHECK(gf_frobenius(a + b) == gf_frobenius(a) + gf_frobenius(b));
      CHECK(gf_frobenius(a) == a.pow(F->prime()));
      CHECK(gf_frobenius(a, F->degree()) == a);
      if (!a.is_zero()) CHECK(a * a.inverse() == GFElem::one(F));
    }
  }
}

TEST_CASE("property: brute solutions verify and eigenvalue-free twists always solve") {
  std::mt19937_64 rng(5);
  for (auto F : {tower_field(3, 1), tower_field(3, 2)}) {
    for (int i = 0; i < 60; ++i) {
      const std::size_t d = 1 + i % 2;
      GFVector alpha;
      for (std::size_t a = 0; a < d; ++a) alpha.push_back(GFElem::from_index(F, rng() % F->size()));
      FpMatrix u(3, d, d);
      do {
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) u.at(r, c) = rng() % 3;
      } while (!u.invertible() || (u - FpMatrix::identity(3, d)).invertible() != true);
      auto s = gf_brute_twist_solve(alpha, u);
      REQUIRE(s.solvable);
      CHECK(apply_twisted_frobenius(s.beta, u) == alpha);
    }
  }
}

TEST_CASE("solve_lexmin picks the least solution") {
  // x0 + x1 = 1 over F_3 with coordinate 1 most significant: (1, 0).
  auto m = FpMatrix::from_ints(3, {{1, 1}});
  auto x = m.solve_lexmin({1});
  REQUIRE(x);
  CHECK(*x == std::vector<unsigned>{1, 0});
  CHECK_FALSE(FpMatrix::from_ints(3, {{1, 1}, {2, 2}}).solve_lexmin({1, 1}).has_value());
  // Agrees with brute enumeration on random consistent systems.
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    FpMatrix a(3, 3, 4);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) a.at(i, j) = rng() % (t % 2 ? 3 : 2);
    std::vector<unsigned> x0(4);
    for (auto& v : x0) v = rng() % 3;
    auto b = a.apply(x0);
    auto got = a.solve_lexmin(b);
    REQUIRE(got);
    std::vector<unsigned> best;
    for (unsigned idx = 0; idx < 81 && best.empty(); ++idx) {
      std::vector<unsigned> c{idx % 3, idx / 3 % 3, idx / 9 % 3, idx / 27};
      if (a.apply(c) == b) best = c;
    }
    CHECK(*got == best);
    auto k = a.kernel();
    CHECK(k.cols() == 4 - a.rank());
    CHECK((a * k) == FpMatrix(3, 3, k.cols()));
  }
}

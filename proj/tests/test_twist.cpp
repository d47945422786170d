#include <random>

#include "doctest.h"
#include "twistnorm/twist.hpp"

using namespace twistnorm;

namespace {

TwistFamily scalar_family(i64 u, unsigned N = 8) { return TwistFamily::scalars(3, N, {"j"}, {u}); }

}  // namespace

TEST_CASE("unit_root examples") {
  CHECK(unit_root(-2, 3, 3, 2).residue() == 4);
  try {
    (void)unit_root(0, 3, 3, 4);
    FAIL("expected supersingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::supersingular);
  }
  for (i64 a : {-2, -1, 1, 2, 4, -4, 5})
    for (u64 q : {3ull, 9ull, 27ull}) {
      if (a % 3 == 0) continue;
      Zp u = unit_root(a, q, 3, 10);
      CHECK(u.valuation() == 0);
      CHECK((u * u - Zp(3, 10, a) * u + Zp(3, 10, static_cast<i64>(q))).is_zero());
    }
}

TEST_CASE("coker examples") {
  CHECK(coker(scalar_family(4)) == AbGroupStructure(3, {3}));
  CHECK(coker(scalar_family(1)) == AbGroupStructure(3, {}, 1));
  auto fib = TwistFamily::singleton("j", ZpMatrix::from_ints(3, 6, {{0, 1}, {1, 1}}));
  CHECK(coker(fib).is_trivial());
}

TEST_CASE("coker_mod examples") {
  CHECK(coker_mod(scalar_family(4), 2) == AbGroupStructure(3, {3}));
  for (unsigned n : {1u, 2u, 5u}) CHECK(coker_mod(scalar_family(2), n).is_trivial());
  CHECK(coker_mod(scalar_family(10), 1) == AbGroupStructure(3, {3}));
  CHECK(coker_mod(scalar_family(1), 2) == AbGroupStructure(3, {9}));
  CHECK(coker_mod(scalar_family(28), 2) == AbGroupStructure(3, {9}));
}

TEST_CASE("group structure canonical text") {
  CHECK(AbGroupStructure(3, {3, 9, 1}).str() == "Z/9 x Z/3");
  CHECK(AbGroupStructure::trivial(3).str() == "0");
  CHECK(AbGroupStructure(3, {}, 2).str() == "Z_3^2");
  CHECK(AbGroupStructure(3, {27, 3}).log_order() == 4);
  CHECK_THROWS_AS(AbGroupStructure(3, {6}), Error);
}

TEST_CASE("families reject non-invertible matrices") {
  CHECK_THROWS_AS(TwistFamily::scalars(3, 4, {"j"}, {3}), Error);
  CHECK_THROWS_AS(TwistFamily(1, {"a", "b"}, {ZpMatrix::from_ints(3, 4, {{2}})}), Error);
}

TEST_CASE("property: coker and coker_mod agree on small divisors") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 1 + t % 3;
    ZpMatrix u(3, 8, d, d);
    do {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) u.raw(i, j) = rng() % 6561;
      // push some matrices close to the identity
      if (t % 2)
        for (std::size_t i = 0; i < d; ++i) u.raw(i, i) = (1 + 3 * (rng() % 100)) % 6561;
    } while (!u.determinant().is_unit());
    auto fam = TwistFamily::singleton("j", u);
    auto full = coker(fam);
    const unsigned n = 4;
    bool small = full.free_rank() == 0;
    for (u64 o : full.cyclic_orders()) small = small && o < 81;
    if (small) CHECK(coker_mod(fam, n) == full);
  }
}

TEST_CASE("property: block-diagonal cokers are direct sums") {
  auto a = ZpMatrix::from_ints(3, 6, {{4}});
  auto b = ZpMatrix::from_ints(3, 6, {{10}});
  auto ab = ZpMatrix::from_ints(3, 6, {{4, 0}, {0, 10}});
  CHECK(coker(TwistFamily::singleton("j", ab)) ==
        coker(TwistFamily::singleton("j", a)) + coker(TwistFamily::singleton("j", b)));
  auto twice = TwistFamily(1, {"a", "b"}, {a, a});
  CHECK(coker_mod(twice, 2) == coker_mod(TwistFamily::singleton("a", a), 2) + coker_mod(TwistFamily::singleton("a", a), 2));
}

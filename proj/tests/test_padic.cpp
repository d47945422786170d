#include <random>

#include "doctest.h"
#include "twistnorm/padic.hpp"

using namespace twistnorm;

TEST_CASE("zp arithmetic examples") {
  CHECK((Zp(3, 2, 4) + Zp(3, 2, 8)).residue() == 3);
  CHECK((Zp(3, 2, 4) * Zp(3, 2, 4)).residue() == 7);
  CHECK((Zp(5, 1, 3) - Zp(5, 1, 4)).residue() == 4);
  CHECK_THROWS_AS(Zp(3, 2, 1) + Zp(5, 2, 1), Error);
  CHECK_THROWS_AS(Zp(3, 2, 1) + Zp(3, 3, 1), Error);
}

TEST_CASE("zp valuation") {
  CHECK(Zp(3, 4, 0).valuation() == 4);
  CHECK(Zp(3, 4, 18).valuation() == 2);
  CHECK(Zp(3, 4, 5).valuation() == 0);
}

TEST_CASE("zp inverse examples") {
  CHECK(Zp(3, 2, 4).inverse().residue() == 7);
  CHECK(Zp(3, 1, 2).inverse().residue() == 2);
  try {
    (void)Zp(3, 2, 3).inverse();
    FAIL("expected not_a_unit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_a_unit);
  }
}

TEST_CASE("hensel examples") {
  CHECK(hensel_root(ZpPoly::from_ints(3, 2, {3, 2, 1}), 1).residue() == 4);
  for (unsigned p : {2u, 3u, 5u})
    for (unsigned N : {1u, 4u}) CHECK(hensel_root(ZpPoly::from_ints(p, N, {-1, 1}), 1).residue() == 1);
  CHECK(hensel_root(ZpPoly::from_ints(3, 3, {-1, 0, 1}), 2).residue() == 26);
  // x^2 has a double root at 0.
  try {
    (void)hensel_root(ZpPoly::from_ints(3, 3, {0, 0, 1}), 0);
    FAIL("expected not_a_simple_root");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::not_a_simple_root);
  }
  CHECK_THROWS_AS(hensel_root(ZpPoly::from_ints(3, 2, {3, 2, 1}), 2), Error);
}

TEST_CASE("teichmuller examples") {
  CHECK(teichmuller(3, 2, 2).residue() == 8);
  CHECK(teichmuller(3, 1, 5).residue() == 1);
  CHECK(teichmuller(5, 2, 2).residue() == 7);
  CHECK_THROWS_AS(teichmuller(3, 0, 2), Error);
}

TEST_CASE("snf examples") {
  auto a = smith_normal_form(ZpMatrix::from_ints(3, 4, {{-3, 0}, {0, 0}}));
  CHECK(a.divisor_valuations == std::vector<unsigned>{1, kInfiniteValuation});
  auto b = smith_normal_form(ZpMatrix::from_ints(3, 4, {{1, -1}, {-1, 0}}));
  CHECK(b.divisor_valuations == std::vector<unsigned>{0, 0});
  auto c = smith_normal_form(ZpMatrix::from_ints(3, 5, {{0, 3}, {9, 0}}));
  CHECK(c.divisor_valuations == std::vector<unsigned>{1, 2});
  CHECK(smith_normal_form(ZpMatrix(3, 4, 0, 0)).divisor_valuations.empty());
}

namespace {

ZpMatrix random_matrix(std::mt19937_64& rng, unsigned p, unsigned N, std::size_t r, std::size_t c) {
  ZpMatrix m(p, N, r, c);
  std::uniform_int_distribution<u64> dist(0, checked_pow(p, N) - 1);
  std::uniform_int_distribution<int> shape(0, 3);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      u64 v = dist(rng);
      // Bias towards high valuations so nontrivial divisors appear.
      for (int k = shape(rng); k > 0; --k) v = mulmod(v, p, m.modulus());
      m.raw(i, j) = v;
    }
  return m;
}

ZpMatrix diag(const SnfResult& s, unsigned p, unsigned N, std::size_t r, std::size_t c) {
  ZpMatrix d(p, N, r, c);
  for (std::size_t i = 0; i < s.divisor_valuations.size(); ++i) {
    unsigned v = s.divisor_valuations[i];
    d.raw(i, i) = v >= N ? 0 : checked_pow(p, v);
  }
  return d;
}

}  // namespace

TEST_CASE("property: snf reconstruction and unimodular transforms") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    unsigned p = trial % 2 ? 3 : 5;
    unsigned N = 1 + trial % 6;
    std::size_t r = dim(rng), c = dim(rng);
    ZpMatrix m = random_matrix(rng, p, N, r, c);
    auto s = smith_normal_form(m);
    REQUIRE(s.divisor_valuations.size() == std::min(r, c));
    CHECK(std::is_sorted(s.divisor_valuations.begin(), s.divisor_valuations.end()));
    CHECK(s.left * m * s.right == diag(s, p, N, r, c));
    CHECK(s.left.determinant().is_unit());
    CHECK(s.right.determinant().is_unit());
    CHECK(smith_valuations(m) == s.divisor_valuations);
    ZpMatrix k = kernel_generators(m);
    CHECK((m * k) == ZpMatrix(p, N, r, k.cols()));
  }
}

TEST_CASE("property: colength matches the divisor sum") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    ZpMatrix m = random_matrix(rng, 3, 4, 3, 1 + trial % 4);
    unsigned expect = 0;
    auto v = smith_valuations(m);
    for (auto x : v) expect += std::min(x, 4u);
    expect += 4 * (3 - v.size());
    CHECK(colength(m) == expect);
  }
}

TEST_CASE("property: hensel fixed point and teichmuller multiplicativity") {
  for (unsigned p : {3u, 5u, 7u})
    for (u64 a = 1; a < p; ++a)
      for (u64 b = 1; b < p; ++b) {
        CHECK(teichmuller(p, a, 6) * teichmuller(p, b, 6) == teichmuller(p, a * b % p, 6));
        CHECK(teichmuller(p, a, 6).pow(p - 1).residue() == 1);
      }
  auto f = ZpPoly::from_ints(3, 8, {3, 2, 1});
  Zp x = hensel_root(f, 1);
  CHECK(f(x).is_zero());
  CHECK(x.residue() % 3 == 1);
  CHECK((x - f(x) * f.derivative()(x).inverse()) == x);
}

TEST_CASE("property: precision coherence") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned N = 3;
    ZpMatrix hi = random_matrix(rng, 3, N + 2, 3, 3);
    ZpMatrix lo = hi.truncated(N);
    auto vh = smith_valuations(hi), vl = smith_valuations(lo);
    for (std::size_t i = 0; i < vh.size(); ++i) {
      unsigned a = vh[i] >= N ? kInfiniteValuation : vh[i];
      CHECK(a == vl[i]);
    }
    auto fh = ZpPoly::from_ints(3, N + 2, {3, 2, 1});
    auto fl = ZpPoly::from_ints(3, N, {3, 2, 1});
    CHECK(hensel_root(fh, 1).truncated(N) == hensel_root(fl, 1));
    CHECK(teichmuller(5, 2, N + 2).truncated(N) == teichmuller(5, 2, N));
  }
}

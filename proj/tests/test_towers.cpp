#include <random>

#include "doctest.h"
#include "twistnorm/towers.hpp"

using namespace twistnorm;

namespace {

UnramElem random_unram(std::mt19937_64& rng, const UnramLevelPtr& L) {
  std::vector<u64> c(L->degree());
  for (auto& x : c) x = rng() % L->modulus_value();
  return UnramElem(L, c);
}

RamElem random_ram(std::mt19937_64& rng, const RamLayerPtr& L) {
  std::vector<u64> c(L->dimension());
  for (auto& x : c) x = rng() % L->modulus_value();
  return RamElem(L, c);
}

RamElem random_principal(std::mt19937_64& rng, const RamLayerPtr& L) {
  return RamElem::one(L) + L->uniformizer() * random_ram(rng, L);
}

}  // namespace

TEST_CASE("build_unram examples") {
  auto T = build_unram(3, 1, 6);
  CHECK(T->degree() == 3);
  auto F = T->residue_field();
  CHECK(T->frobenius_image().residue() == GFElem::generator(F) - GFElem::one(F));
  auto Z = build_unram(3, 0, 5);
  std::mt19937_64 rng(1);
  auto z = random_unram(rng, Z);
  CHECK(z.frobenius() == z);
  for (int i = 0; i < 20; ++i) {
    auto a = random_unram(rng, T);
    CHECK(a.frobenius(3) == a);
    CHECK(a.frobenius().frobenius().frobenius() == a);
  }
}

TEST_CASE("property: the Frobenius lift is a ring homomorphism reducing to x^p") {
  std::mt19937_64 rng(2);
  for (auto T : {build_unram(3, 1, 7), build_unram(3, 2, 4), build_unram(5, 1, 5), build_unram(2, 2, 6)}) {
    const UnramElem h_at_xi = [&] {
      UnramElem acc = UnramElem::zero(T), xi = T->frobenius_image();
      for (std::size_t i = T->modulus().size(); i-- > 0;)
        acc = acc * xi + UnramElem::scalar(T, static_cast<i64>(T->modulus()[i]));
      return acc;
    }();
    CHECK(h_at_xi.is_zero());
    for (int i = 0; i < 30; ++i) {
      auto a = random_unram(rng, T), b = random_unram(rng, T);
      CHECK((a * b).frobenius() == a.frobenius() * b.frobenius());
      CHECK((a + b).frobenius() == a.frobenius() + b.frobenius());
      CHECK(a.frobenius().residue() == gf_frobenius(a.residue()));
      CHECK(a.frobenius(T->degree()) == a);
      if (a.residue().is_zero()) continue;
      CHECK(a * a.inverse() == UnramElem::one(T));
    }
  }
}

TEST_CASE("unramified embeddings respect Frobenius") {
  std::mt19937_64 rng(3);
  auto T1 = build_unram(3, 1, 5), T2 = build_unram(3, 2, 5);
  UnramEmbedding e(T1, T2);
  for (int i = 0; i < 20; ++i) {
    auto a = random_unram(rng, T1), b = random_unram(rng, T1);
    CHECK(e(a * b) == e(a) * e(b));
    CHECK(e(a.frobenius()) == e(a).frobenius());
    CHECK(e(a).residue() == GFEmbedding(T1->residue_field(), T2->residue_field())(a.residue()));
  }
}

TEST_CASE("cyclotomic layer examples") {
  auto Z = build_unram(3, 0, 6);
  auto L = build_cyclotomic_layer(3, 1, Z);
  CHECK(L->eisenstein() == std::vector<i64>{3, 9, 6, 1});
  CHECK(L->galois_roots().size() == 3);
  CHECK(L->is_galois());
  auto pi = L->uniformizer();
  CHECK(norm(pi) == UnramElem::scalar(build_unram(3, 0, L->norm_precision()), -3));
  CHECK(norm(RamElem::one(L)) == UnramElem::one(build_unram(3, 0, L->norm_precision())));
  auto L5 = build_cyclotomic_layer(5, 1, build_unram(5, 0, 5));
  CHECK(L5->ramification() == 5);
  CHECK(L5->is_galois());
  CHECK(norm(L5->uniformizer()).valuation() == 1);
  auto L9 = build_cyclotomic_layer(3, 2, build_unram(3, 0, 6));
  CHECK(L9->is_galois());
  CHECK(L9->different_exponent() == 22);
  CHECK(L->different_exponent() == 4);
  CHECK(L5->different_exponent() == 8);
  CHECK_THROWS_AS(build_cyclotomic_layer(3, 3, Z), Error);
  CHECK_THROWS_AS(build_cyclotomic_layer(2, 1, build_unram(2, 0, 6)), Error);
}

TEST_CASE("norm of base elements is the e-th power") {
  std::mt19937_64 rng(4);
  auto T = build_unram(3, 1, 6);
  auto E = build_cyclotomic_layer(3, 1, T);
  const unsigned No = E->norm_precision();
  for (int i = 0; i < 10; ++i) {
    auto a = random_unram(rng, T);
    CHECK(norm(RamElem::from_base(E, a)) == a.pow(3).truncated(No));
  }
}

TEST_CASE("property: norms are multiplicative and keep principal units principal") {
  std::mt19937_64 rng(5);
  for (auto E : {build_cyclotomic_layer(3, 1, build_unram(3, 1, 6)), build_cyclotomic_layer(3, 2, build_unram(3, 0, 6)),
                 build_cyclotomic_layer(5, 1, build_unram(5, 0, 5))}) {
    for (int i = 0; i < 10; ++i) {
      auto a = random_ram(rng, E), b = random_ram(rng, E);
      CHECK(norm(a * b) == norm(a) * norm(b));
      auto u = random_principal(rng, E);
      auto nu = norm(u);
      CHECK((nu - UnramElem::one(nu.level())).valuation() >= 1);
      CHECK(norm(u.frobenius()) == norm(u).frobenius());
    }
    CHECK(norm(E->uniformizer()).valuation() == 1);
  }
}

TEST_CASE("property: norm transitivity through the intermediate layer") {
  // Inside the degree-9 layer the order-3 subgroup H fixes the degree-3 layer;
  // the norm over H followed by coset representatives is the full norm.
  std::mt19937_64 rng(6);
  auto L = build_cyclotomic_layer(3, 2, build_unram(3, 0, 7));
  auto roots = L->galois_roots();
  const std::size_t e = roots.size();
  const unsigned R = L->root_precision();
  auto same = [&](const RamElem& a, const RamElem& b) { return (a - b).valuation() >= R; };
  auto compose = [&](std::size_t i, std::size_t j) {
    RamElem img = L->conjugate(roots[j], i);
    for (std::size_t l = 0; l < e; ++l)
      if (same(img, roots[l])) return l;
    FAIL("Galois group not closed");
    return e;
  };
  std::vector<std::size_t> H;
  for (std::size_t i = 0; i < e; ++i)
    if (compose(i, compose(i, i)) == 0) H.push_back(i);
  REQUIRE(H.size() == 3);
  std::vector<std::size_t> reps;
  std::vector<bool> covered(e, false);
  for (std::size_t i = 0; i < e; ++i) {
    if (covered[i]) continue;
    reps.push_back(i);
    for (auto h : H) covered[compose(i, h)] = true;
  }
  REQUIRE(reps.size() == 3);
  for (int t = 0; t < 5; ++t) {
    auto x = random_principal(rng, L);
    RamElem y = RamElem::one(L);
    for (auto h : H) y = y * L->conjugate(x, h);
    for (auto h : H) CHECK(same(L->conjugate(y, h), y));
    RamElem z = RamElem::one(L);
    for (auto r : reps) z = z * L->conjugate(y, r);
    auto full = norm(x);
    const unsigned No = L->norm_precision();
    const u64 mod = checked_pow(3, No);
    CHECK(z.flat()[0] % mod == full.coeffs()[0]);
  }
}

TEST_CASE("filtration examples") {
  auto Z = build_unram(3, 0, 5);
  auto u = PrincipalUnit::from_unram(UnramElem::scalar(Z, 4));
  auto d = filtration_decompose(u, 3);
  REQUIRE(d.components.size() == 2);
  CHECK(d.components[0].coeffs() == std::vector<unsigned>{1});
  CHECK(d.components[1].coeffs() == std::vector<unsigned>{0});
  CHECK(u.filtration_level() == 1);
  auto one = PrincipalUnit::from_unram(UnramElem::one(Z));
  for (const auto& c : filtration_decompose(one, 5).components) CHECK(c.is_zero());
  CHECK_THROWS_AS(filtration_decompose(u, 6), Error);
  CHECK_THROWS_AS(PrincipalUnit::from_unram(UnramElem::scalar(Z, 2)), Error);
}

TEST_CASE("property: filtration round trip") {
  std::mt19937_64 rng(8);
  for (auto L : {trivial_layer(build_unram(3, 1, 5)), build_cyclotomic_layer(3, 1, build_unram(3, 1, 5)),
                 build_cyclotomic_layer(3, 2, build_unram(3, 0, 4))}) {
    for (int t = 0; t < 10; ++t) {
      PrincipalUnit u(random_principal(rng, L));
      const unsigned M = 2 + static_cast<unsigned>(rng() % (L->valuation_cap() - 2));
      auto d = filtration_decompose(u, M);
      auto back = filtration_recompose(L, d.components);
      CHECK((back * back.inverse() - RamElem::one(L)).is_zero());
      CHECK((u.value() * back.inverse() - RamElem::one(L)).valuation() >= M);
    }
  }
}

#include <random>

#include "doctest.h"
#include "twistnorm/unitgroup.hpp"

using namespace twistnorm;

namespace {

RamElem random_principal(std::mt19937_64& rng, const RamLayerPtr& L) {
  std::vector<u64> c(L->dimension());
  for (auto& x : c) x = rng() % L->modulus_value();
  return RamElem::one(L) + L->uniformizer() * RamElem(L, c);
}

ZpMatrix identity_gens(const UnitGroup& G) {
  const std::size_t g = G.generator_count();
  ZpMatrix I(G.prime(), G.exponent_precision(), g, g);
  for (std::size_t i = 0; i < g; ++i) I.raw(i, i) = 1;
  return I;
}

}  // namespace

TEST_CASE("unit_group_exponent") {
  CHECK(unit_group_exponent(3, 1, 1) == 0);
  CHECK(unit_group_exponent(3, 1, 2) == 1);
  CHECK(unit_group_exponent(3, 1, 4) == 3);
  CHECK(unit_group_exponent(3, 2, 4) == 2);
  CHECK(unit_group_exponent(2, 1, 3) == 2);
}

TEST_CASE("U1(Z_3) mod U(M) is cyclic") {
  auto L = trivial_layer(build_unram(3, 0, 8));
  for (unsigned M = 2; M <= 6; ++M) {
    UnitGroup G(L, M);
    PresentedGroup P(G.relations());
    CHECK(P.log_order() == M - 1);
    CHECK(P.subgroup(identity_gens(G)) == AbGroupStructure(3, {checked_pow(3, M - 1)}, 0));
  }
}

TEST_CASE("unramified U1 mod U(M) is free over Z/p^(M-1)") {
  auto L = trivial_layer(build_unram(3, 1, 6));
  UnitGroup G(L, 3);
  PresentedGroup P(G.relations());
  CHECK(P.log_order() == 6);
  CHECK(P.subgroup(identity_gens(G)).str() == "Z/9 x Z/9 x Z/9");
  ZpMatrix I = identity_gens(G);
  ZpMatrix pI = I;
  for (std::size_t i = 0; i < I.rows(); ++i) pI.raw(i, i) = 3;
  CHECK(P.quotient(I, pI).str() == "Z/3 x Z/3 x Z/3");
}

TEST_CASE("digits and element round trip") {
  std::mt19937_64 rng(7);
  std::vector<RamLayerPtr> layers{trivial_layer(build_unram(3, 1, 6)),
                                  build_cyclotomic_layer(3, 1, build_unram(3, 0, 6)),
                                  build_cyclotomic_layer(3, 1, build_unram(3, 1, 6)),
                                  trivial_layer(build_unram(2, 2, 8))};
  for (const auto& L : layers) {
    const unsigned M = 4;
    UnitGroup G(L, M);
    PresentedGroup P(G.relations());
    CHECK(P.log_order() == G.generator_count());
    for (int t = 0; t < 10; ++t) {
      RamElem x = random_principal(rng, L);
      RamElem y = G.element(G.digits(x));
      CHECK((y * x.inverse() - RamElem::one(L)).valuation() >= M);
    }
  }
}

TEST_CASE("digits are a homomorphism modulo relations") {
  std::mt19937_64 rng(11);
  auto L = build_cyclotomic_layer(3, 1, build_unram(3, 1, 6));
  UnitGroup G(L, 5);
  PresentedGroup P(G.relations());
  ZpMatrix none(3, G.exponent_precision(), G.generator_count(), 0);
  ZpMatrix Phi = G.frobenius_matrix();
  for (int t = 0; t < 8; ++t) {
    RamElem x = random_principal(rng, L), y = random_principal(rng, L);
    CHECK(P.contains(none, G.column(x * y) - (G.column(x) + G.column(y))));
    CHECK(P.contains(none, G.column(x.frobenius()) - (Phi * G.column(x))));
  }
}

TEST_CASE("class order and minimal generators") {
  auto L = trivial_layer(build_unram(3, 0, 8));
  UnitGroup G(L, 5);
  PresentedGroup P(G.relations());
  ZpMatrix none(3, G.exponent_precision(), G.generator_count(), 0);
  // 1 + 3 generates; 1 + 9 has order 27 in U1/U(5).
  RamElem u = RamElem::from_base(L, UnramElem::scalar(L->base(), 10));
  CHECK(P.class_log_order(none, G.column(u)) == 3);
  ZpMatrix I = identity_gens(G);
  ZpMatrix m = P.minimal_generators(I, P.log_order());
  CHECK(m.cols() == 1);
}

TEST_CASE("kron_identity") {
  ZpMatrix a(3, 2, 2, 2);
  a.raw(0, 1) = 4;
  a.raw(1, 0) = 2;
  ZpMatrix k = kron_identity(a, 2);
  CHECK(k.rows() == 4);
  CHECK(k.raw(0, 2) == 4);
  CHECK(k.raw(1, 3) == 4);
  CHECK(k.raw(0, 3) == 0);
  CHECK(k.raw(2, 0) == 2);
}

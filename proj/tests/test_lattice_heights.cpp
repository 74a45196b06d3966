#include <doctest.h>

#include <random>

#include "heightlab/experiments.hpp"
#include "heightlab/lattice_heights.hpp"

using namespace heightlab;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }
}  // namespace

TEST_CASE("hom heights") {
  CHECK(hom_height_p(LatticeHom(RationalMatrix{{1, 2}, {3, 4}}), 2) == 1);
  const LatticeHom twelfth(RationalMatrix{{q(1, 12)}});
  CHECK(hom_height_p(twelfth, 2) == 4);
  CHECK(hom_height_p(twelfth, 5) == 1);
  CHECK(hom_height_f(LatticeHom(RationalMatrix{{1, -2}})) == 1);
  CHECK(hom_height_f(LatticeHom(RationalMatrix{{q(1, 12), q(1, 10)}})) == 60);
  CHECK(hom_height_f(LatticeHom(RationalMatrix{{q(1, 343)}})) == 343);
  CHECK_THROWS(hom_height_p(twelfth, 4));
}

TEST_CASE("H_f is the product of the local heights") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 100; ++it) {
    RationalMatrix m(3, 2);
    for (auto i = 0u; i < 3; ++i)
      for (auto j = 0u; j < 2; ++j) m(i, j) = q(experiments::uniform(rng, -30, 30), experiments::uniform(rng, 1, 90));
    const LatticeHom phi(m);
    const Integer hf = hom_height_f(phi);
    Integer prod = 1;
    if (hf > 1)
      for (const auto& p : prime_factors(hf)) prod *= hom_height_p(phi, p);
    CHECK(prod == hf);
  }
}

TEST_CASE("composition with automorphisms") {
  const LatticeHom phi(RationalMatrix{{q(1, 5)}});
  const auto k = IntegralAutomorphism::global(RationalMatrix{{-1}});
  const auto u = IntegralAutomorphism::global(RationalMatrix{{1}});
  const LatticeHom out = compose_with_automorphisms(phi, k, u);
  CHECK(out.matrix() == RationalMatrix{{q(-1, 5)}});
  CHECK(hom_height_f(out) == 5);

  const auto id2 = IntegralAutomorphism::global(RationalMatrix::identity(2));
  const LatticeHom psi(RationalMatrix{{1, q(1, 2)}, {0, 3}});
  CHECK(compose_with_automorphisms(psi, id2, id2) == psi);
  CHECK_THROWS_AS(compose_with_automorphisms(phi, id2, u), std::invalid_argument);
  CHECK_THROWS_AS(IntegralAutomorphism::global(RationalMatrix{{2}}), std::invalid_argument);
  CHECK_THROWS_AS(IntegralAutomorphism::global(RationalMatrix{{q(1, 2)}}), std::invalid_argument);
  CHECK_NOTHROW(IntegralAutomorphism::at_prime(RationalMatrix{{2}}, 3));
  CHECK_THROWS_AS(IntegralAutomorphism::at_prime(RationalMatrix{{3}}, 3), std::invalid_argument);
}

TEST_CASE("invariance under random unimodular pairs, denominators {2, 9}") {
  std::mt19937_64 rng(18);
  for (int it = 0; it < 50; ++it) {
    RationalMatrix m(3, 3);
    for (auto i = 0u; i < 3; ++i)
      for (auto j = 0u; j < 3; ++j) m(i, j) = q(experiments::uniform(rng, -9, 9), experiments::uniform(rng, 0, 1) ? 2 : 9);
    m(0, 0) = q(1, 2);
    m(1, 1) = q(1, 9);
    const LatticeHom phi(m);
    REQUIRE(hom_height_f(phi) == 18);
    const auto k = IntegralAutomorphism::global(experiments::random_unimodular(rng, 3));
    const auto u = IntegralAutomorphism::global(experiments::random_unimodular(rng, 3));
    CHECK(hom_height_f(compose_with_automorphisms(phi, k, u)) == 18);
  }
}

TEST_CASE("per-prime invariance with p-unit determinants") {
  std::mt19937_64 rng(19);
  for (int it = 0; it < 50; ++it) {
    RationalMatrix m(2, 2);
    for (auto i = 0u; i < 2; ++i)
      for (auto j = 0u; j < 2; ++j) m(i, j) = q(experiments::uniform(rng, -9, 9), experiments::uniform(rng, 1, 50));
    const LatticeHom phi(m);
    // det 2 is a unit at 3.
    const auto k = IntegralAutomorphism::at_prime(RationalMatrix{{2, 1}, {0, 1}} * experiments::random_unimodular(rng, 2), 3);
    const auto u = IntegralAutomorphism::at_prime(experiments::random_unimodular(rng, 2), 3);
    CHECK(hom_height_p(compose_with_automorphisms(phi, k, u), 3) == hom_height_p(phi, 3));
  }
}

TEST_CASE("conjugate representation") {
  const auto basis = standard_gl_basis(2);
  const LatticeHom id = conjugate_representation(RationalMatrix::identity(2), basis, basis);
  CHECK(id.matrix() == RationalMatrix::identity(4));

  const RationalMatrix e12 = RationalMatrix::unit(2, 0, 1);
  for (long m = -4; m <= -1; ++m) {
    const RationalMatrix g = RationalMatrix::diagonal({power_of(5, m), 1});
    const LatticeHom dphi = conjugate_representation(g, {e12}, basis);
    CHECK(dphi.matrix()(1, 0) == power_of(5, m));
    CHECK(hom_height_p(dphi, 5) == ipow(5, static_cast<unsigned long>(-m)));
  }

  // Torus line span(E11 - E22) conjugated by [[1, 1/p], [0, 1]]:
  // g diag(1, -1) g^-1 = [[1, -2/p], [0, -1]].
  const long p = 7;
  const RationalMatrix h{{1, 0}, {0, -1}};
  const RationalMatrix g{{1, q(1, p)}, {0, 1}};
  const LatticeHom dphi = conjugate_representation(g, {h}, basis);
  CHECK(dphi.matrix() == RationalMatrix{{1}, {q(-2, p)}, {0}, {-1}});
  CHECK(hom_height_p(dphi, p) == p);

  // Round trip through g and g^-1.
  const LatticeHom a = conjugate_representation(g, basis, basis);
  const LatticeHom b = conjugate_representation(g.inverse(), basis, basis);
  CHECK(b.matrix() * a.matrix() == RationalMatrix::identity(4));

  CHECK_THROWS_AS(conjugate_representation(RationalMatrix{{1, 1}, {1, 1}}, {e12}, basis), std::invalid_argument);
  CHECK_THROWS_AS(conjugate_representation(g, {e12, e12}, basis), std::invalid_argument);
  CHECK_THROWS_AS(conjugate_representation(g, {h}, {e12}), std::invalid_argument);
}

TEST_CASE("text round trip") {
  const LatticeHom phi(RationalMatrix{{q(1, 2), 0, 3}, {q(-7, 9), 1, 0}});
  const std::string text = phi.to_text();
  CHECK(text.rfind("2 3\n", 0) == 0);
  CHECK(LatticeHom::parse(text) == phi);
  CHECK(LatticeHom::parse(text).to_text() == text);
  CHECK_THROWS(LatticeHom::parse("2 2\n1 2 3"));
  CHECK_THROWS(LatticeHom::parse("1 1\n1 2"));
}

#include <doctest.h>

#include <random>

#include "heightlab/experiments.hpp"
#include "heightlab/padic.hpp"
#include "oracles.hpp"

using namespace heightlab;
using namespace heightlab::padic;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }
RationalMatrix scalar(const Rational& x) { return RationalMatrix{{x}}; }
}  // namespace

TEST_CASE("PadicMatrix representation") {
  RationalMatrix z{{0, q(1, 125)}, {0, 0}};
  PadicMatrix m = PadicMatrix::from_rational(z, 5, 4);
  CHECK(m.shift() == 3);
  CHECK(matrix_norm(m) == 125);
  CHECK(local_height(m) == 125);
  CHECK(m.value(0, 1) == q(1, 125));
  CHECK(matrix_norm(PadicMatrix::from_rational(RationalMatrix::identity(2), 7, 3)) == 1);
  CHECK(matrix_norm(PadicMatrix::from_rational(RationalMatrix{{5, q(1, 5)}, {25, 0}}, 5, 6)) == 5);
  CHECK(local_height(PadicMatrix::from_rational(RationalMatrix::zero(2, 2), 5, 3)) == 1);
  CHECK(local_height(PadicMatrix::from_rational(RationalMatrix::identity(2) * q(5), 5, 3)) == 1);
  CHECK_THROWS_AS(PadicMatrix::from_rational(z, 5, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(PadicMatrix::from_rational(z, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(PadicMatrix::from_rational(z, 5, kMaxPrecision + 1), std::invalid_argument);
  CHECK_THROWS_AS(PadicMatrix::from_rational(z, 6, 4), std::invalid_argument);
  CHECK_THROWS_AS(PadicMatrix::from_rational(RationalMatrix(2, 3), 5, 4), std::invalid_argument);

  PadicMatrix back = PadicMatrix::parse(m.to_text());
  CHECK(back == m);
  CHECK_THROWS(PadicMatrix::parse("5 2 0 4\n1 2 3"));
}

TEST_CASE("H_p(Z) = H_p(1 + Z)") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 100; ++it) {
    RationalMatrix z(2, 2);
    for (auto i = 0u; i < 2; ++i)
      for (auto j = 0u; j < 2; ++j) z(i, j) = q(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 27));
    for (long p : {2L, 3L, 5L}) {
      CHECK(local_height(z, p) == local_height(z + RationalMatrix::identity(2), p));
    }
  }
}

TEST_CASE("char_poly examples") {
  CharPoly c = char_poly(RationalMatrix::identity(2));
  CHECK(c.coeffs == std::vector<Rational>{1, -2});
  CHECK(char_poly(RationalMatrix{{0, 1}, {0, 0}}).is_pure_power());
  c = char_poly(RationalMatrix{{2, 1}, {1, 1}});
  CHECK(c.coeffs == std::vector<Rational>{1, -3});
  CHECK(c.coefficient(2) == 1);
}

TEST_CASE("char_poly agrees with Leibniz expansion") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 150; ++it) {
    const std::size_t d = 1 + rng() % 4;
    RationalMatrix z(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) z(i, j) = q(static_cast<long>(rng() % 15) - 7, 1 + static_cast<long>(rng() % 9));
    const CharPoly c = char_poly(z);
    const auto ref = oracle::leibniz_char_poly(z);
    for (std::size_t k = 0; k <= d; ++k) CHECK(c.coefficient(k) == ref[k]);
  }
}

TEST_CASE("criteria") {
  const RationalMatrix n{{0, 1}, {0, 0}};
  CHECK(log_criterion(n, 7, 1));
  CHECK(log_criterion(n, 7, 40));
  CHECK(log_criterion(scalar(5), 5, 1));
  CHECK_FALSE(log_criterion(RationalMatrix::identity(2), 5, 1));
  CHECK(exp_converges(RationalMatrix{{0, q(1, 125)}, {0, 0}}, 5));
  CHECK_FALSE(exp_converges(scalar(2), 2));
  CHECK(exp_converges(scalar(9), 3));
  CHECK(criterion_order(scalar(9), 3) == Valuation(2));
  CHECK(criterion_order(n, 3).is_infinite());
  CHECK(check_log_chi_necessity(RationalMatrix{{0, q(1, 5)}, {0, 0}}, 5));
  CHECK(check_log_chi_necessity(RationalMatrix::identity(2) * q(3), 3));
  CHECK_FALSE(check_log_chi_necessity(RationalMatrix::identity(2), 5));
}

TEST_CASE("exp of nilpotent and zero") {
  const RationalMatrix x{{0, q(7, 3)}, {0, 0}};
  PadicMatrix e = exp_matrix(x, 5, 4);
  CHECK(e.congruent(RationalMatrix::identity(2) + x, 4));
  // Canonical residues: 7/3 = 419 mod 5^4.
  CHECK(e.values() == RationalMatrix{{1, 419}, {0, 1}});
  CHECK(exp_matrix(RationalMatrix::zero(3, 3), 2, 5).values() == RationalMatrix::identity(3));
}

TEST_CASE("exp rejects non-convergent input with the failing order") {
  try {
    exp_matrix(scalar(2), 2, 4);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.order() == Valuation(1));
  }
  CHECK_THROWS_AS(exp_matrix(RationalMatrix::identity(2), 3, 4), ConvergenceError);
  CHECK_THROWS_AS(log_matrix(RationalMatrix::identity(2), 3, 4), ConvergenceError);
}

TEST_CASE("scalar exp against a long exact series") {
  // exp(5) mod 5^4: 400 terms leave a tail of valuation far above 4.
  const Rational ref = oracle::scalar_exp_series(q(5), 400);
  PadicMatrix e = exp_matrix(scalar(5), 5, 4);
  CHECK(e.residue(0, 0) == oracle::mod_power(ref, 5, 4));
  for (long p : {3L, 5L, 7L}) {
    for (long n : {1L, 3L, 8L}) {
      const Rational x = q(p * 2);
      PadicMatrix m = exp_matrix(scalar(x), p, n);
      CHECK(m.residue(0, 0) == oracle::mod_power(oracle::scalar_exp_series(x, 300), p, n));
    }
  }
}

TEST_CASE("scalar log against a long exact series") {
  const Rational ref = oracle::scalar_log_series(q(5), 400);
  PadicMatrix l = log_matrix(scalar(5), 5, 4);
  CHECK(l.residue(0, 0) == oracle::mod_power(ref, 5, 4));
  CHECK(log_matrix(RationalMatrix::zero(2, 2), 5, 4).values() == RationalMatrix::zero(2, 2));
  const Rational x = q(9);
  CHECK(log_matrix(scalar(x), 3, 6).residue(0, 0) == oracle::mod_power(oracle::scalar_log_series(x, 300), 3, 6));
}

TEST_CASE("log of nilpotent attains the precise bound") {
  const RationalMatrix y{{0, q(1, 125)}, {0, 0}};
  PadicMatrix l = log_matrix(y, 5, 4);
  CHECK(l.values() == y);
  CHECK(matrix_norm(l) == 125);
}

TEST_CASE("matrix exp/log agree with a longer partial sum") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 60; ++it) {
    const long p = std::vector<long>{2, 3, 5, 7}[it % 4];
    const long d = 1 + it % 3;
    const RationalMatrix x = experiments::random_exp_convergent(rng, p, d);
    const long n = 6;
    const long last = exp_truncation_index(x, p, n);
    const PadicMatrix e = exp_matrix(x, p, n);
    CHECK(e.congruent(exp_partial_sum(x, 3 * last + 30), n));
    const RationalMatrix y = experiments::random_log_admissible(rng, p, d);
    const long llast = log_truncation_index(y, p, n);
    CHECK(log_matrix(y, p, n).congruent(log_partial_sum(y, 3 * llast + 30), n));
  }
}

TEST_CASE("power bound ||Y^n|| <= |p|^floor(n/d) H_p(Y)^(d-1)") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 80; ++it) {
    const long p = std::vector<long>{2, 3, 5}[it % 3];
    const long d = 1 + it % 3;
    const RationalMatrix y = experiments::random_log_admissible(rng, p, d);
    Rational h_pow = 1;
    for (long k = 0; k + 1 < d; ++k) h_pow *= local_height(y, p);
    RationalMatrix power = RationalMatrix::identity(static_cast<std::size_t>(d));
    for (long n = 1; n <= 12; ++n) {
      power = power * y;
      CHECK(matrix_norm(power, p) <= power_of(p, -(n / d)) * h_pow);
    }
  }
}

TEST_CASE("roundtrip examples") {
  CHECK(log_exp_roundtrip(RationalMatrix{{0, q(1, 7)}, {0, 0}}, 7, 5));
  CHECK(log_exp_roundtrip(scalar(5), 5, 6));
  const RationalMatrix x = RationalMatrix{{0, 25}, {0, 0}} + RationalMatrix::identity(2) * q(25);
  CHECK(log_exp_roundtrip(x, 5, 4));
}

TEST_CASE("roundtrip on commuting scalar-times-nilpotent matches the scalar oracle") {
  // exp(aI + N) = exp(a)(1 + N) for N^2 = 0.
  const Rational a = q(25);
  const RationalMatrix n{{0, 25}, {0, 0}};
  const PadicMatrix e = exp_matrix(RationalMatrix::identity(2) * a + n, 5, 6);
  const Rational ea = oracle::scalar_exp_series(a, 300);
  const RationalMatrix expected = (RationalMatrix::identity(2) + n) * ea;
  CHECK(e.congruent(expected, 6));
}

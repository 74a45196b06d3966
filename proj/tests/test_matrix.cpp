#include <doctest.h>

#include <random>

#include "heightlab/matrix.hpp"
#include "oracles.hpp"

using namespace heightlab;

namespace {
Rational q(long n, long d = 1) { return make_rational(n, d); }

RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = q(static_cast<long>(rng() % 11) - 5, static_cast<long>(rng() % 6) + 1);
  return m;
}
}  // namespace

TEST_CASE("basic arithmetic") {
  RationalMatrix a{{1, 2}, {3, 4}};
  RationalMatrix b{{0, 1}, {1, 0}};
  CHECK(a * b == RationalMatrix{{2, 1}, {4, 3}});
  CHECK(a + b == RationalMatrix{{1, 3}, {4, 4}});
  CHECK(a.trace() == 5);
  CHECK(a.determinant() == -2);
  CHECK(a * a.inverse() == RationalMatrix::identity(2));
  CHECK(a.pow(3) == a * a * a);
  CHECK(a.transpose() == RationalMatrix{{1, 3}, {2, 4}});
  CHECK_THROWS_AS(RationalMatrix({{1, 2}, {2, 4}}).inverse(), std::invalid_argument);
  CHECK(RationalMatrix({{1, 2}, {2, 4}}).rank() == 1);
}

TEST_CASE("norms and heights") {
  RationalMatrix z{{5, q(1, 5)}, {25, 0}};
  CHECK(matrix_norm(z, 5) == 5);
  CHECK(local_height(z, 5) == 5);
  CHECK(local_height_exponent(z, 5) == 1);
  CHECK(matrix_norm(RationalMatrix::zero(2, 2), 5) == 0);
  CHECK(local_height(RationalMatrix::zero(2, 2), 5) == 1);
  CHECK(RationalMatrix{{q(1, 12)}}.denominator_lcm() == 12);
  CHECK(congruent_mod(RationalMatrix{{1}}, RationalMatrix{{26}}, 5, 2));
  CHECK_FALSE(congruent_mod(RationalMatrix{{1}}, RationalMatrix{{26}}, 5, 3));
}

TEST_CASE("determinant agrees with Leibniz expansion") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 4;
    RationalMatrix m = random_matrix(rng, n);
    CHECK(m.determinant() == oracle::leibniz_det(m));
  }
}

TEST_CASE("ultrametric matrix norm") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 3;
    RationalMatrix a = random_matrix(rng, n), b = random_matrix(rng, n);
    for (long p : {2L, 3L, 5L}) {
      CHECK(matrix_norm(a + b, p) <= std::max(matrix_norm(a, p), matrix_norm(b, p)));
      CHECK(matrix_norm(a * b, p) <= matrix_norm(a, p) * matrix_norm(b, p));
    }
  }
}

TEST_CASE("solve_linear") {
  RationalMatrix a{{1, 1}, {1, -1}, {2, 0}};
  auto x = solve_linear(a, {3, 1, 4});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 2);
  CHECK((*x)[1] == 1);
  CHECK_FALSE(solve_linear(a, {3, 1, 5}).has_value());
}

TEST_CASE("text form") {
  RationalMatrix a{{q(1, 2), -3}, {0, q(7, 9)}};
  CHECK(a.to_string() == "1/2 -3\n0 7/9\n");
}

#pragma once

// Exact integers and rationals, p-adic valuations and absolute values, and
// the scalar affine Weil heights built from them.
//
// Integers and rationals are GMP's mpz_class / mpq_class. Every Rational
// handed out by this module is canonical (reduced, positive denominator).

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace heightlab {

using Integer = mpz_class;
using Rational = mpq_class;

/// p-adic valuation of a rational number; infinite exactly for zero.
class Valuation {
 public:
  constexpr Valuation() = default;  // infinity
  explicit Valuation(long v) : value_(v) {}

  static Valuation infinity() { return Valuation(); }

  bool is_infinite() const { return !value_.has_value(); }
  long value() const;

  friend bool operator==(const Valuation&, const Valuation&) = default;
  friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b);

  std::string str() const;

 private:
  std::optional<long> value_;
};

/// Canonicalizes and returns q.
Rational make_rational(const Integer& num, const Integer& den);
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
std::string to_string(const Integer& n);

bool is_prime(const Integer& n);
/// Throws std::invalid_argument unless p is prime.
void require_prime(const Integer& p);

/// Multiplicity of p in the nonzero integer n.
long multiplicity(const Integer& n, const Integer& p);

Valuation valuation(const Rational& x, const Integer& p);
/// As valuation(), without the primality check; for inner loops.
Valuation valuation_unchecked(const Rational& x, const Integer& p);
/// Normalized p-adic absolute value, p^(-v_p(x)); 0 maps to 0.
Rational abs_p(const Rational& x, const Integer& p);
Rational abs_real(const Rational& x);

/// p^e as an exact rational; e may be negative.
Rational power_of(const Integer& p, long e);
Integer ipow(const Integer& base, unsigned long e);

/// Distinct prime divisors of |n| in increasing order. n != 0.
std::vector<Integer> prime_factors(const Integer& n);

/// Number of distinct prime divisors of n >= 1.
long omega(const Integer& n);

/// floor(log_p(n)) for n >= 1.
long floor_log(const Integer& n, const Integer& p);

Integer lcm_range(long d);  // lcm(1, ..., d)

/// The place at which an affine height is evaluated.
class Place {
 public:
  enum class Kind { Real, Prime, Finite, Global };

  static Place real() { return Place(Kind::Real, 0); }
  static Place at(const Integer& p);
  static Place finite() { return Place(Kind::Finite, 0); }
  static Place global() { return Place(Kind::Global, 0); }

  Kind kind() const { return kind_; }
  const Integer& prime() const { return prime_; }

 private:
  Place(Kind kind, Integer prime) : kind_(kind), prime_(std::move(prime)) {}
  Kind kind_;
  Integer prime_;
};

/// Affine height max(1, |w_1|, ..., |w_n|) at one place, or the product over
/// all finite places (FINITE), or real times finite (GLOBAL).
Rational height_tuple(std::span<const Rational> coords, const Place& place);

/// H_f of a tuple as an integer: the lcm of the denominators.
Integer finite_height(std::span<const Rational> coords);

struct GmHeights {
  Rational real;   // max(|t|, |1/t|)
  Integer finite;  // |n*m| for t = n/m reduced
};

/// Heights of t under the closed embedding t -> (t, 1/t) of G_m.
GmHeights gm_heights(const Rational& t);

}  // namespace heightlab

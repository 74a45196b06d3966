#pragma once

// Capped-precision p-adic matrices and the matrix exponential / logarithm.
//
// A PadicMatrix stores each entry as a residue r modulo p^(N+s) standing for
// r * p^(-s), so entries are known modulo p^N. Series are summed exactly over
// Q up to an a priori truncation index and reduced once at the end.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heightlab/exactnum.hpp"
#include "heightlab/matrix.hpp"

namespace heightlab::padic {

inline constexpr long kMaxPrecision = 1L << 16;

class PadicMatrix {
 public:
  /// Reduces an exact rational matrix. The shift defaults to the smallest one
  /// that represents every entry; an explicit shift that is too small, or a
  /// non-square input, is rejected.
  static PadicMatrix from_rational(const RationalMatrix& m, const Integer& p, long precision,
                                   std::optional<long> shift = std::nullopt);

  /// Text form: a "p d s N" header line, then d rows of d rationals, each the
  /// represented value r/p^s in lowest terms.
  static PadicMatrix parse(std::string_view text);
  std::string to_text() const;

  const Integer& prime() const { return p_; }
  std::size_t dim() const { return d_; }
  long shift() const { return shift_; }
  long precision() const { return precision_; }

  const Integer& residue(std::size_t i, std::size_t j) const { return residues_[i * d_ + j]; }
  Rational value(std::size_t i, std::size_t j) const;
  RationalMatrix values() const;

  /// Max |entry|_p over entries not known to vanish mod p^N.
  Rational norm() const;
  Rational local_height() const;

  /// Represented values agree modulo p^n, n <= min of both precisions.
  bool congruent(const RationalMatrix& exact, long n) const;

  friend bool operator==(const PadicMatrix&, const PadicMatrix&) = default;

 private:
  PadicMatrix(Integer p, std::size_t d, long shift, long precision)
      : p_(std::move(p)), d_(d), shift_(shift), precision_(precision), residues_(d * d) {}

  Integer p_;
  std::size_t d_;
  long shift_;
  long precision_;
  std::vector<Integer> residues_;
};

/// Reduces x (with v_p(x) >= 0) to the residue in [0, p^n).
Integer reduce_mod_power(const Rational& x, const Integer& p, long n);

/// Monic characteristic polynomial det(T*I - Z) = T^d + c_{d-1} T^{d-1} + ... + c_0.
struct CharPoly {
  std::vector<Rational> coeffs;  // c_0 .. c_{d-1}

  std::size_t degree() const { return coeffs.size(); }
  /// Coefficient of T^k for 0 <= k <= d.
  Rational coefficient(std::size_t k) const { return k == coeffs.size() ? Rational(1) : coeffs.at(k); }
  bool is_pure_power() const;  // T^d
  std::string to_string() const;

  friend bool operator==(const CharPoly&, const CharPoly&) = default;
};

/// Faddeev-LeVerrier over Q.
CharPoly char_poly(const RationalMatrix& z);

Rational matrix_norm(const PadicMatrix& z);
Rational local_height(const PadicMatrix& z);

/// Smallest p-adic valuation of the non-leading characteristic coefficients;
/// infinite when the characteristic polynomial is T^d.
Valuation criterion_order(const RationalMatrix& z, const Integer& p);

/// chi_Z(T) lies in T^d + p^k Z_p[T].
bool log_criterion(const RationalMatrix& z, const Integer& p, long k);

/// There is k >= 1 with log_criterion(x, p, k) and d < k(p - 1).
bool exp_converges(const RationalMatrix& x, const Integer& p);

/// ||x|| < |p|^(1/(p-1)), the entrywise sufficient condition.
bool exp_converges_by_norm(const RationalMatrix& x, const Integer& p);

class ConvergenceError : public std::invalid_argument {
 public:
  ConvergenceError(const std::string& what, Valuation order)
      : std::invalid_argument(what), order_(order) {}
  /// The criterion order k that failed (min valuation of chi's coefficients).
  Valuation order() const { return order_; }

 private:
  Valuation order_;
};

/// Index of the last series term that can matter at precision n; every later
/// term has norm strictly below p^(-n). Throws ConvergenceError when no
/// criterion applies.
long exp_truncation_index(const RationalMatrix& x, const Integer& p, long n);
long log_truncation_index(const RationalMatrix& y, const Integer& p, long n);

/// Exact partial sums sum_{k<=last} x^k/k! and -sum_{1<=k<=last} (-1)^k y^k/k.
RationalMatrix exp_partial_sum(const RationalMatrix& x, long last);
RationalMatrix log_partial_sum(const RationalMatrix& y, long last);

/// exp(x) modulo p^n. Accepted when exp_converges or exp_converges_by_norm.
PadicMatrix exp_matrix(const RationalMatrix& x, const Integer& p, long n);

/// log(1 + y) modulo p^n; requires log_criterion(y, p, 1). Checks the output
/// against ||log(1+y)|| <= d H_p(y)^(d-1), and <= H_p(y)^(d-1) when p > d,
/// throwing std::logic_error on violation.
PadicMatrix log_matrix(const RationalMatrix& y, const Integer& p, long n);

/// chi_Y(T) lies in T^d + p Z_p[T].
bool check_log_chi_necessity(const RationalMatrix& y, const Integer& p);

/// log(exp(x)) == x modulo p^n.
bool log_exp_roundtrip(const RationalMatrix& x, const Integer& p, long n);

}  // namespace heightlab::padic

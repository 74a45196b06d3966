#pragma once

// Dense matrices over Q with exact GMP entries.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <iosfwd>
#include <string>
#include <vector>

#include "heightlab/exactnum.hpp"

namespace heightlab {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);
  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// E_ij in M_n: 1 at (i, j), 0 elsewhere.
  static RationalMatrix unit(std::size_t n, std::size_t i, std::size_t j);
  static RationalMatrix diagonal(const std::vector<Rational>& diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<Rational>& entries() const { return data_; }

  RationalMatrix& operator+=(const RationalMatrix& o);
  RationalMatrix& operator-=(const RationalMatrix& o);
  RationalMatrix& operator*=(const Rational& s);

  friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) { return a += b; }
  friend RationalMatrix operator-(RationalMatrix a, const RationalMatrix& b) { return a -= b; }
  friend RationalMatrix operator*(RationalMatrix a, const Rational& s) { return a *= s; }
  friend RationalMatrix operator*(const Rational& s, RationalMatrix a) { return a *= s; }
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  RationalMatrix operator-() const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

  RationalMatrix transpose() const;
  RationalMatrix pow(unsigned long n) const;
  Rational trace() const;
  Rational determinant() const;
  std::size_t rank() const;
  /// Throws std::invalid_argument for singular or non-square input.
  RationalMatrix inverse() const;

  bool is_zero() const;
  bool is_integral() const;
  /// All entries have p-adic valuation >= 0.
  bool is_p_integral(const Integer& p) const;

  /// min over entries of v_p; infinite for the zero matrix.
  Valuation min_valuation(const Integer& p) const;
  /// lcm of all entry denominators.
  Integer denominator_lcm() const;

  /// Entries as whitespace-separated rationals, one row per line.
  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

std::ostream& operator<<(std::ostream& os, const RationalMatrix& m);

/// Max over entries of |entry|_p, an exact power of p or 0.
Rational matrix_norm(const RationalMatrix& m, const Integer& p);
/// max(1, matrix_norm(m, p)).
Rational local_height(const RationalMatrix& m, const Integer& p);
/// log_p of local_height: max(0, -min v_p(entries)).
long local_height_exponent(const RationalMatrix& m, const Integer& p);

/// Entrywise a - b has valuation >= n at p.
bool congruent_mod(const RationalMatrix& a, const RationalMatrix& b, const Integer& p, long n);

/// Solves A x = b exactly; returns nothing when there is no solution.
/// For consistent underdetermined systems, free variables are set to zero.
std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& a, const std::vector<Rational>& b);

}  // namespace heightlab

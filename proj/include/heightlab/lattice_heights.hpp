#pragma once

// Heights of linear maps between based lattices.
//
// A LatticeHom is the exact matrix of a map m -> gl(d) in fixed bases of the
// lattices m_Z and gl(d, Z). Its finite height is the least n >= 1 with
// n * Phi(m_Z) inside gl(d, Z), i.e. the lcm of the entry denominators.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heightlab/exactnum.hpp"
#include "heightlab/matrix.hpp"

namespace heightlab {

class LatticeHom {
 public:
  LatticeHom() = default;
  explicit LatticeHom(RationalMatrix m) : matrix_(std::move(m)) {}

  std::size_t rows() const { return matrix_.rows(); }
  std::size_t cols() const { return matrix_.cols(); }
  const RationalMatrix& matrix() const { return matrix_; }

  /// "rows cols" header line, then one line per row of rationals.
  static LatticeHom parse(std::string_view text);
  std::string to_text() const;

  friend bool operator==(const LatticeHom&, const LatticeHom&) = default;

 private:
  RationalMatrix matrix_;
};

/// An automorphism of a based lattice: integer matrix with integral inverse.
/// Global automorphisms have det = +-1; per-prime ones only need a p-unit
/// determinant and p-integral entries.
class IntegralAutomorphism {
 public:
  static IntegralAutomorphism global(const RationalMatrix& m);
  static IntegralAutomorphism at_prime(const RationalMatrix& m, const Integer& p);

  const RationalMatrix& matrix() const { return matrix_; }
  const RationalMatrix& inverse() const { return inverse_; }
  /// Empty for a global automorphism.
  const std::optional<Integer>& prime() const { return prime_; }
  std::size_t dim() const { return matrix_.rows(); }

 private:
  IntegralAutomorphism(RationalMatrix m, RationalMatrix inv, std::optional<Integer> p)
      : matrix_(std::move(m)), inverse_(std::move(inv)), prime_(std::move(p)) {}

  RationalMatrix matrix_;
  RationalMatrix inverse_;
  std::optional<Integer> prime_;
};

/// Least p^k, k >= 0, with p^k * Phi p-integral.
Integer hom_height_p(const LatticeHom& phi, const Integer& p);

/// lcm of entry denominators; the product of hom_height_p over all primes.
Integer hom_height_f(const LatticeHom& phi);

/// k o Phi o u.
LatticeHom compose_with_automorphisms(const LatticeHom& phi, const IntegralAutomorphism& k,
                                      const IntegralAutomorphism& u);

/// Matrices E_11, E_12, ..., E_dd in row-major order.
std::vector<RationalMatrix> standard_gl_basis(std::size_t d);

/// Matrix of X -> g X g^-1 on span(basis_m), written in basis_g.
/// Rejects singular g, dependent basis_m, and images outside span(basis_g).
LatticeHom conjugate_representation(const RationalMatrix& g, const std::vector<RationalMatrix>& basis_m,
                                    const std::vector<RationalMatrix>& basis_g);

/// Flattens d x d matrices into the columns of a d^2 x k matrix.
RationalMatrix flatten_basis(const std::vector<RationalMatrix>& basis);

}  // namespace heightlab

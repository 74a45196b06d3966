#include "heightlab/lattice_heights.hpp"

#include <sstream>
#include <stdexcept>

namespace heightlab {

LatticeHom LatticeHom::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 1 || cols < 1) {
    throw std::invalid_argument("malformed lattice map header");
  }
  RationalMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (long k = 0; k < rows * cols; ++k) {
    std::string tok;
    if (!(is >> tok)) throw std::invalid_argument("lattice map literal has too few entries");
    m(static_cast<std::size_t>(k / cols), static_cast<std::size_t>(k % cols)) = parse_rational(tok);
  }
  std::string extra;
  if (is >> extra) throw std::invalid_argument("trailing data after lattice map literal");
  return LatticeHom(std::move(m));
}

std::string LatticeHom::to_text() const {
  return std::to_string(rows()) + ' ' + std::to_string(cols()) + '\n' + matrix_.to_string();
}

IntegralAutomorphism IntegralAutomorphism::global(const RationalMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("automorphism must be square");
  if (!m.is_integral()) throw std::invalid_argument("automorphism must have integer entries");
  Rational det = m.determinant();
  if (det != 1 && det != -1) throw std::invalid_argument("automorphism is not unimodular (det = " + to_string(det) + ")");
  return IntegralAutomorphism(m, m.inverse(), std::nullopt);
}

IntegralAutomorphism IntegralAutomorphism::at_prime(const RationalMatrix& m, const Integer& p) {
  require_prime(p);
  if (!m.is_square()) throw std::invalid_argument("automorphism must be square");
  if (!m.is_p_integral(p)) throw std::invalid_argument("automorphism must be p-integral");
  Rational det = m.determinant();
  if (det == 0 || valuation_unchecked(det, p) != Valuation(0)) {
    throw std::invalid_argument("automorphism determinant is not a p-adic unit");
  }
  return IntegralAutomorphism(m, m.inverse(), p);
}

Integer hom_height_p(const LatticeHom& phi, const Integer& p) {
  require_prime(p);
  return ipow(p, static_cast<unsigned long>(local_height_exponent(phi.matrix(), p)));
}

Integer hom_height_f(const LatticeHom& phi) { return phi.matrix().denominator_lcm(); }

LatticeHom compose_with_automorphisms(const LatticeHom& phi, const IntegralAutomorphism& k,
                                      const IntegralAutomorphism& u) {
  if (k.dim() != phi.rows() || u.dim() != phi.cols()) {
    throw std::invalid_argument("automorphism dimensions do not match the lattice map");
  }
  return LatticeHom(k.matrix() * phi.matrix() * u.matrix());
}

std::vector<RationalMatrix> standard_gl_basis(std::size_t d) {
  std::vector<RationalMatrix> basis;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) basis.push_back(RationalMatrix::unit(d, i, j));
  return basis;
}

RationalMatrix flatten_basis(const std::vector<RationalMatrix>& basis) {
  if (basis.empty()) throw std::invalid_argument("empty basis");
  const std::size_t d = basis.front().rows();
  RationalMatrix out(d * d, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& b = basis[k];
    if (b.rows() != d || b.cols() != d) throw std::invalid_argument("basis matrices of mixed size");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i * d + j, k) = b(i, j);
  }
  return out;
}

LatticeHom conjugate_representation(const RationalMatrix& g, const std::vector<RationalMatrix>& basis_m,
                                    const std::vector<RationalMatrix>& basis_g) {
  if (!g.is_square()) throw std::invalid_argument("conjugator must be square");
  if (g.determinant() == 0) throw std::invalid_argument("conjugator is singular");
  RationalMatrix m_cols = flatten_basis(basis_m);
  if (m_cols.rows() != g.rows() * g.rows()) throw std::invalid_argument("basis size does not match conjugator");
  if (m_cols.rank() != basis_m.size()) throw std::invalid_argument("basis of m is linearly dependent");
  RationalMatrix g_cols = flatten_basis(basis_g);
  if (g_cols.rows() != m_cols.rows()) throw std::invalid_argument("target basis size mismatch");
  if (g_cols.rank() != basis_g.size()) throw std::invalid_argument("target basis is linearly dependent");

  const RationalMatrix g_inv = g.inverse();
  const std::size_t d = g.rows();
  RationalMatrix out(basis_g.size(), basis_m.size());
  for (std::size_t k = 0; k < basis_m.size(); ++k) {
    RationalMatrix image = g * basis_m[k] * g_inv;
    std::vector<Rational> rhs(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) rhs[i * d + j] = image(i, j);
    auto coords = solve_linear(g_cols, rhs);
    if (!coords) throw std::invalid_argument("conjugated basis element leaves the span of the target basis");
    for (std::size_t r = 0; r < basis_g.size(); ++r) out(r, k) = (*coords)[r];
  }
  return LatticeHom(std::move(out));
}

}  // namespace heightlab

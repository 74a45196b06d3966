#pragma once

// Orbit indices of compact p-adic matrix groups.
//
// [U : U cap GL_d(Z_p)] equals the size of the orbit of the standard lattice
// Z_p^d under U, because GL_d(Z_p) is its stabilizer. Orbits are enumerated
// breadth-first over lattices kept in a canonical Hermite normal form.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heightlab/exactnum.hpp"
#include "heightlab/lattice_heights.hpp"
#include "heightlab/matrix.hpp"

namespace heightlab::orbit {

/// A full-rank Z_p-lattice in Q_p^d, stored as the upper-triangular column
/// Hermite normal form of a basis: diagonal entries p^e_i, and each entry
/// above the diagonal reduced into [0, p^e_i) within Z[1/p].
class LatticeClass {
 public:
  static LatticeClass standard(const Integer& p, std::size_t d);
  /// Span of the columns of a nonsingular basis whose entries are p-adic
  /// numbers from Q (denominators prime to p are allowed).
  static LatticeClass from_basis(const RationalMatrix& basis, const Integer& p);

  LatticeClass transformed(const RationalMatrix& g) const;

  const RationalMatrix& hnf() const { return hnf_; }
  const Integer& prime() const { return p_; }
  std::size_t dim() const { return hnf_.rows(); }

  /// Smallest a >= 0 with p^a Z_p^d <= L <= p^-a Z_p^d.
  long spread() const;
  const std::string& key() const { return key_; }

  friend bool operator==(const LatticeClass& a, const LatticeClass& b) { return a.key_ == b.key_; }

 private:
  LatticeClass(Integer p, RationalMatrix hnf);

  Integer p_;
  RationalMatrix hnf_;
  std::string key_;
};

struct OrbitReport {
  bool terminated = false;
  Integer index = 0;  // the orbit size; meaningful when terminated
  std::uint64_t cap = 0;
  std::uint64_t witness_count = 0;
  std::size_t generator_count = 0;
  long precision_used = 0;  // 0 for exact generators
  long max_spread = 0;
  // False when approximated generators were not known to enough digits.
  bool level_sufficient = true;

  /// "125" or "AT_LEAST(1000)".
  std::string index_string() const;
};

/// Smallest i in [1, cap] with exp(iX) in GL_d(Z_p); AT_LEAST(cap) otherwise.
OrbitReport cyclic_exp_index(const RationalMatrix& x, const Integer& p, std::uint64_t cap);

/// Orbit of Z_p^d under the group generated by the given invertible matrices.
OrbitReport lattice_orbit_index(const std::vector<RationalMatrix>& generators, const Integer& p,
                                std::uint64_t cap);

/// As above with caller-supplied inverses (for approximated generators), and
/// optionally collecting the orbit.
OrbitReport lattice_orbit_index(const std::vector<RationalMatrix>& generators,
                                const std::vector<RationalMatrix>& inverses, const Integer& p,
                                std::uint64_t cap, std::vector<LatticeClass>* orbit_out);

/// Topological generators of Z_p^x: a primitive root mod p^2, or {-1, 5} at 2.
std::vector<Integer> unit_group_generators(const Integer& p);

/// |GL(n, Z/3)| = 3^(n(n-1)/2) prod_{i=1..n} (3^i - 1).
Integer minkowski_constant(long n);
/// Number of invertible n x n matrices over Z/q (q prime), by enumeration.
std::uint64_t count_invertible_mod(long n, long q);

struct TorsionSearch {
  bool torsion_free = true;
  std::optional<RationalMatrix> witness;  // A != I of finite order, A = I mod m
  std::uint64_t examined = 0;
  long box = 0;
};

/// Searches A = I + modulus * B, B in [-box, box]^(n x n), B != 0, for
/// A^k = I with k in {2, ..., 6}. Exhaustive within the box.
TorsionSearch minkowski_torsion_search(long n, long modulus, long box);
long default_torsion_box(long n);
bool minkowski_torsion_check(long n);

enum class LocalCase { Exp2p, Nilpotent, Torus, Mixed, Cyclic };
using heightlab::to_string;
std::string to_string(LocalCase c);
LocalCase parse_local_case(const std::string& tag);

/// phi = Ad(conjugator) restricted to m. For Nilpotent/Exp2p/Cyclic the lie
/// basis spans m_Z; Torus uses the full diagonal torus; Mixed adds the
/// diagonal torus to the given nilpotent basis.
struct LocalSetup {
  LocalCase kind = LocalCase::Nilpotent;
  Integer p = 2;
  RationalMatrix conjugator;
  std::vector<RationalMatrix> lie_basis;
  std::uint64_t cap = 100000;
  long level = 0;  // working precision for approximated exponentials; 0 = automatic

  std::size_t dim() const { return conjugator.rows(); }
};

/// d(phi) as a map m_Z -> gl(d) in the standard basis.
LatticeHom differential(const LocalSetup& setup);

/// Index of the group attached to the setup (phi(M(Z_p)), or phi(exp(2p m_Zp))
/// for Exp2p, or the cyclic group for Cyclic).
OrbitReport local_index(const LocalSetup& setup);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct LocalBoundResult {
  Verdict verdict = Verdict::Inconclusive;
  OrbitReport report;
  Integer height = 1;  // H_p(d phi)
  Rational bound = 0;
  std::optional<Rational> slack;  // index / bound
  // Torus case: the p-part quotient [T]_p / [exp(2p t)]_p and the constant
  // c_2 = p / quotient it certifies.
  std::optional<OrbitReport> unipotent_report;
  std::optional<Rational> quotient;
  std::optional<Rational> measured_c2;
  // Mixed case: the component indices.
  std::vector<OrbitReport> components;
};

/// Checks the orbit-index lower bound matching the declared structural case.
/// For Torus, pass iff quotient >= p / c2 (c2 defaults to the measured value).
LocalBoundResult verify_local_bound(const LocalSetup& setup, std::optional<Rational> c2 = std::nullopt);

/// max over the family (members with H_p(d phi) != 1) of p / quotient.
Rational measure_torus_constant(const std::vector<LocalSetup>& family);

struct GlobalSetup {
  LocalCase kind = LocalCase::Nilpotent;
  RationalMatrix conjugator;
  std::vector<RationalMatrix> lie_basis;
  std::vector<Integer> primes;
  std::uint64_t cap = 100000;
  Rational c = 1;
};

struct GlobalBoundResult {
  Verdict verdict = Verdict::Inconclusive;
  Integer finite_height = 1;  // H_f(d phi)
  long omega = 0;
  Integer index_product = 1;
  Rational bound = 0;  // H_f / c^omega
  double measured_c = 1.0;  // least c with the bound holding
  std::map<Integer, OrbitReport> per_prime;
};

GlobalBoundResult verify_global_bound(const GlobalSetup& setup);

/// Text descriptor: "key value..." lines (case, p, d, conjugator, basis, cap,
/// level); '#' starts a comment.
LocalSetup parse_descriptor(const std::string& text);

}  // namespace heightlab::orbit

#include "heightlab/orbit_index.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "heightlab/padic.hpp"

namespace heightlab::orbit {
namespace {

long vp(const Rational& x, const Integer& p) { return valuation_unchecked(x, p).value(); }

// Representative of x + p^e Z_p in Z[1/p] ∩ [0, p^e).
Rational canonical_rep(const Rational& x, const Integer& p, long e) {
  if (x == 0) return 0;
  const long k = std::max({0L, -vp(x, p), -e});
  const Rational scaled = x * power_of(p, k);
  const Integer r = padic::reduce_mod_power(scaled, p, e + k);
  return make_rational(r, ipow(p, static_cast<unsigned long>(k)));
}

void add_column_multiple(RationalMatrix& m, std::size_t dst, std::size_t src, const Rational& f) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m(r, src) != 0) m(r, dst) -= f * m(r, src);
}

void swap_columns(RationalMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, a), m(r, b));
}

RationalMatrix hermite_form(RationalMatrix h, const Integer& p) {
  const std::size_t d = h.rows();
  std::vector<long> expo(d);
  for (std::size_t i = d; i-- > 0;) {
    std::size_t best = d;
    long best_v = 0;
    for (std::size_t c = 0; c <= i; ++c) {
      if (h(i, c) == 0) continue;
      long v = vp(h(i, c), p);
      if (best == d || v < best_v) best = c, best_v = v;
    }
    if (best == d) throw std::invalid_argument("lattice basis is singular");
    swap_columns(h, best, i);
    // Scale the pivot column by a unit so the pivot becomes p^e.
    const Rational unit = power_of(p, best_v) / h(i, i);
    for (std::size_t r = 0; r <= i; ++r) h(r, i) *= unit;
    expo[i] = best_v;
    for (std::size_t c = 0; c < i; ++c) {
      if (h(i, c) == 0) continue;
      add_column_multiple(h, c, i, h(i, c) / h(i, i));
    }
  }
  for (std::size_t j = 1; j < d; ++j) {
    for (std::size_t i = j; i-- > 0;) {
      const Rational x = h(i, j);
      const Rational r = canonical_rep(x, p, expo[i]);
      if (r == x) continue;
      add_column_multiple(h, j, i, (x - r) / h(i, i));
      h(i, j) = r;
    }
  }
  return h;
}

std::string make_key(const RationalMatrix& h) {
  std::string key;
  for (const auto& q : h.entries()) {
    key += q.get_str(36);
    key += ',';
  }
  return key;
}

long neg_min_valuation(const RationalMatrix& m, const Integer& p) {
  Valuation v = m.min_valuation(p);
  return v.is_infinite() ? 0 : -v.value();
}

}  // namespace

LatticeClass::LatticeClass(Integer p, RationalMatrix hnf)
    : p_(std::move(p)), hnf_(std::move(hnf)), key_(make_key(hnf_)) {}

LatticeClass LatticeClass::standard(const Integer& p, std::size_t d) {
  require_prime(p);
  if (d == 0) throw std::invalid_argument("lattice dimension must be positive");
  return LatticeClass(p, RationalMatrix::identity(d));
}

LatticeClass LatticeClass::from_basis(const RationalMatrix& basis, const Integer& p) {
  require_prime(p);
  if (!basis.is_square() || basis.rows() == 0) throw std::invalid_argument("lattice basis must be square");
  return LatticeClass(p, hermite_form(basis, p));
}

LatticeClass LatticeClass::transformed(const RationalMatrix& g) const {
  if (g.rows() != dim() || g.cols() != dim()) throw std::invalid_argument("transformation size mismatch");
  return LatticeClass(p_, hermite_form(g * hnf_, p_));
}

long LatticeClass::spread() const {
  return std::max({0L, neg_min_valuation(hnf_, p_), neg_min_valuation(hnf_.inverse(), p_)});
}

std::string OrbitReport::index_string() const {
  return terminated ? to_string(index) : "AT_LEAST(" + std::to_string(cap) + ")";
}

OrbitReport cyclic_exp_index(const RationalMatrix& x, const Integer& p, std::uint64_t cap) {
  require_prime(p);
  if (!x.is_square()) throw std::invalid_argument("matrix must be square");
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  const bool nilpotent = padic::char_poly(x).is_pure_power();
  if (!nilpotent && !padic::exp_converges(x, p) && !padic::exp_converges_by_norm(x, p)) {
    throw padic::ConvergenceError("exp(X) does not converge by the available criteria",
                                  padic::criterion_order(x, p));
  }
  OrbitReport rep;
  rep.cap = cap;
  rep.generator_count = 1;
  const long last = static_cast<long>(x.rows()) - 1;
  for (std::uint64_t i = 1; i <= cap; ++i) {
    const RationalMatrix xi = x * Rational(Integer(std::to_string(i)));
    bool integral;
    if (nilpotent) {
      const RationalMatrix e = padic::exp_partial_sum(xi, last);
      integral = e.is_p_integral(p) && vp(e.determinant(), p) == 0;
    } else {
      // Precision 1 decides integrality: entries of negative valuation are
      // represented exactly, and the determinant is read mod p.
      const padic::PadicMatrix e = padic::exp_matrix(xi, p, 1);
      const RationalMatrix v = e.values();
      integral = v.is_p_integral(p);
      if (integral) {
        Rational det = v.determinant();
        integral = det != 0 && vp(det, p) == 0;
      }
    }
    rep.witness_count = i;
    if (integral) {
      rep.terminated = true;
      rep.index = Integer(std::to_string(i));
      return rep;
    }
  }
  return rep;
}

OrbitReport lattice_orbit_index(const std::vector<RationalMatrix>& generators, const Integer& p,
                                std::uint64_t cap) {
  std::vector<RationalMatrix> inverses;
  inverses.reserve(generators.size());
  for (const auto& g : generators) {
    if (!g.is_square() || g.determinant() == 0) throw std::invalid_argument("generator is not invertible");
    inverses.push_back(g.inverse());
  }
  return lattice_orbit_index(generators, inverses, p, cap, nullptr);
}

OrbitReport lattice_orbit_index(const std::vector<RationalMatrix>& generators,
                                const std::vector<RationalMatrix>& inverses, const Integer& p,
                                std::uint64_t cap, std::vector<LatticeClass>* orbit_out) {
  require_prime(p);
  if (generators.empty()) throw std::invalid_argument("no generators");
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  if (inverses.size() != generators.size()) throw std::invalid_argument("generator/inverse count mismatch");
  const std::size_t d = generators.front().rows();
  std::vector<RationalMatrix> moves;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const auto& g = generators[k];
    if (!g.is_square() || g.rows() != d || inverses[k].rows() != d || inverses[k].cols() != d) {
      throw std::invalid_argument("generators must be square of equal size");
    }
    if (g.determinant() == 0) throw std::invalid_argument("generator is not invertible");
    moves.push_back(g);
    if (inverses[k] != g) moves.push_back(inverses[k]);
  }

  OrbitReport rep;
  rep.cap = cap;
  rep.generator_count = generators.size();
  std::unordered_set<std::string> seen;
  std::deque<LatticeClass> frontier;
  LatticeClass start = LatticeClass::standard(p, d);
  seen.insert(start.key());
  if (orbit_out) orbit_out->push_back(start);
  frontier.push_back(std::move(start));
  while (!frontier.empty()) {
    LatticeClass cur = std::move(frontier.front());
    frontier.pop_front();
    rep.max_spread = std::max(rep.max_spread, cur.spread());
    for (const auto& m : moves) {
      LatticeClass next = cur.transformed(m);
      if (!seen.insert(next.key()).second) continue;
      if (seen.size() > cap) {
        rep.witness_count = cap;
        return rep;
      }
      if (orbit_out) orbit_out->push_back(next);
      frontier.push_back(std::move(next));
    }
  }
  rep.terminated = true;
  rep.witness_count = seen.size();
  rep.index = Integer(std::to_string(seen.size()));
  return rep;
}

std::vector<Integer> unit_group_generators(const Integer& p) {
  require_prime(p);
  if (p == 2) return {Integer(-1), Integer(5)};
  const Integer p2 = p * p;
  const Integer order = p * (p - 1);
  const auto factors = prime_factors(order);
  for (Integer g = 2; g < p2; ++g) {
    if (g % p == 0) continue;
    bool primitive = true;
    for (const auto& q : factors) {
      Integer r;
      Integer e = order / q;
      mpz_powm(r.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t(), p2.get_mpz_t());
      if (r == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) return {g};
  }
  throw std::logic_error("no primitive root found");
}

Integer minkowski_constant(long n) {
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  Integer c = ipow(3, static_cast<unsigned long>(n * (n - 1) / 2));
  for (long i = 1; i <= n; ++i) c *= ipow(3, static_cast<unsigned long>(i)) - 1;
  return c;
}

namespace {

long det_mod(std::vector<long> a, long n, long q) {
  long det = 1;
  for (long c = 0; c < n; ++c) {
    long piv = -1;
    for (long r = c; r < n; ++r)
      if (a[r * n + c] % q != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      for (long k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = (q - det) % q;
    }
    const long x = a[c * n + c] % q;
    det = det * x % q;
    long inv = 1;
    for (long e = q - 2, b = x; e > 0; e >>= 1, b = b * b % q)
      if (e & 1) inv = inv * b % q;
    for (long r = c + 1; r < n; ++r) {
      const long f = a[r * n + c] % q * inv % q;
      if (f == 0) continue;
      for (long k = c; k < n; ++k) a[r * n + k] = ((a[r * n + k] - f * a[c * n + k]) % q + q) % q;
    }
  }
  return det;
}

using SmallMatrix = std::vector<__int128>;

SmallMatrix small_mul(const SmallMatrix& a, const SmallMatrix& b, long n) {
  SmallMatrix c(static_cast<std::size_t>(n * n), 0);
  for (long i = 0; i < n; ++i)
    for (long k = 0; k < n; ++k)
      for (long j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
  return c;
}

}  // namespace

std::uint64_t count_invertible_mod(long n, long q) {
  if (n < 1 || n > 4) throw std::invalid_argument("enumeration supports 1 <= n <= 4");
  if (!is_prime(q)) throw std::invalid_argument("modulus must be prime");
  const long cells = n * n;
  std::vector<long> a(static_cast<std::size_t>(cells), 0);
  std::uint64_t count = 0;
  while (true) {
    if (det_mod(a, n, q) != 0) ++count;
    long k = 0;
    while (k < cells && ++a[k] == q) a[k++] = 0;
    if (k == cells) break;
  }
  return count;
}

long default_torsion_box(long n) {
  switch (n) {
    case 1: return 4;
    case 2: return 3;
    default: return 1;
  }
}

TorsionSearch minkowski_torsion_search(long n, long modulus, long box) {
  if (n < 1 || n > 4) throw std::invalid_argument("torsion search supports 1 <= N <= 4");
  if (modulus < 2) throw std::invalid_argument("modulus must be at least 2");
  if (box < 1) throw std::invalid_argument("box must be at least 1");
  const long cells = n * n;
  std::vector<long> b(static_cast<std::size_t>(cells), -box);
  TorsionSearch out;
  out.box = box;
  SmallMatrix id(static_cast<std::size_t>(cells), 0);
  for (long i = 0; i < n; ++i) id[i * n + i] = 1;
  while (true) {
    if (std::any_of(b.begin(), b.end(), [](long v) { return v != 0; })) {
      ++out.examined;
      SmallMatrix a(static_cast<std::size_t>(cells));
      for (long k = 0; k < cells; ++k) a[k] = id[k] + static_cast<__int128>(modulus) * b[k];
      SmallMatrix power = a;
      for (int k = 2; k <= 6; ++k) {
        power = small_mul(power, a, n);
        if (power == id) {
          out.torsion_free = false;
          RationalMatrix w(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
          for (long c = 0; c < cells; ++c)
            w(static_cast<std::size_t>(c / n), static_cast<std::size_t>(c % n)) =
                Rational(static_cast<long>(a[c]));
          out.witness = std::move(w);
          return out;
        }
      }
    }
    long k = 0;
    while (k < cells && ++b[k] > box) b[k++] = -box;
    if (k == cells) break;
  }
  return out;
}

bool minkowski_torsion_check(long n) {
  return minkowski_torsion_search(n, 3, default_torsion_box(n)).torsion_free;
}

std::string to_string(LocalCase c) {
  switch (c) {
    case LocalCase::Exp2p: return "exp2p";
    case LocalCase::Nilpotent: return "nilpotent";
    case LocalCase::Torus: return "torus";
    case LocalCase::Mixed: return "mixed";
    case LocalCase::Cyclic: return "cyclic";
  }
  return "?";
}

LocalCase parse_local_case(const std::string& tag) {
  for (LocalCase c : {LocalCase::Exp2p, LocalCase::Nilpotent, LocalCase::Torus, LocalCase::Mixed, LocalCase::Cyclic})
    if (to_string(c) == tag) return c;
  throw std::invalid_argument("unknown case tag '" + tag + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::vector<RationalMatrix> torus_basis(std::size_t d) {
  std::vector<RationalMatrix> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(RationalMatrix::unit(d, i, i));
  return out;
}

std::vector<RationalMatrix> source_basis(const LocalSetup& s) {
  const std::size_t d = s.dim();
  switch (s.kind) {
    case LocalCase::Torus: return torus_basis(d);
    case LocalCase::Mixed: {
      auto b = torus_basis(d);
      b.insert(b.end(), s.lie_basis.begin(), s.lie_basis.end());
      return b;
    }
    default:
      if (s.lie_basis.empty()) throw std::invalid_argument("setup needs a lie basis");
      return s.lie_basis;
  }
}

void validate(const LocalSetup& s) {
  require_prime(s.p);
  if (!s.conjugator.is_square() || s.conjugator.rows() == 0) throw std::invalid_argument("conjugator must be square");
  if (s.conjugator.determinant() == 0) throw std::invalid_argument("conjugator is singular");
  for (const auto& x : s.lie_basis)
    if (x.rows() != s.dim() || x.cols() != s.dim()) throw std::invalid_argument("lie basis element has wrong size");
  if (s.kind == LocalCase::Nilpotent || s.kind == LocalCase::Mixed) {
    for (const auto& x : s.lie_basis)
      if (!padic::char_poly(x).is_pure_power()) throw std::invalid_argument("lie basis element is not nilpotent");
  }
  if (s.kind == LocalCase::Cyclic && s.lie_basis.size() != 1) {
    throw std::invalid_argument("cyclic case takes exactly one element");
  }
}

struct GeneratorSet {
  std::vector<RationalMatrix> gens;
  std::vector<RationalMatrix> invs;
};

GeneratorSet conjugated(const RationalMatrix& g, const RationalMatrix& g_inv, const std::vector<RationalMatrix>& hs) {
  GeneratorSet out;
  for (const auto& h : hs) {
    RationalMatrix x = g * h * g_inv;
    out.invs.push_back(x.inverse());
    out.gens.push_back(std::move(x));
  }
  return out;
}

// Topological generators of exp(Z_p X) for nilpotent X: exp(X) itself.
std::vector<RationalMatrix> unipotent_generators(const std::vector<RationalMatrix>& basis) {
  std::vector<RationalMatrix> out;
  for (const auto& x : basis) out.push_back(padic::exp_partial_sum(x, static_cast<long>(x.rows()) - 1));
  return out;
}

std::vector<RationalMatrix> torus_generators(const Integer& p, std::size_t d) {
  std::vector<RationalMatrix> out;
  for (const auto& u : unit_group_generators(p)) {
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<Rational> diag(d, Rational(1));
      diag[i] = Rational(u);
      out.push_back(RationalMatrix::diagonal(diag));
    }
  }
  return out;
}

// exp(2p t_Zp) for the diagonal torus is topologically generated by 1 + 2p in
// each slot.
std::vector<RationalMatrix> torus_unipotent_generators(const Integer& p, std::size_t d) {
  std::vector<RationalMatrix> out;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Rational> diag(d, Rational(1));
    diag[i] = Rational(1 + 2 * p);
    out.push_back(RationalMatrix::diagonal(diag));
  }
  return out;
}

// Orbit under g exp(2p X_i) g^-1, with the exponentials known modulo p^level.
// The approximate orbit equals the true one once
// level - log_p(|g| |g^-1|) >= 2 * (largest spread in the orbit).
OrbitReport exp2p_index(const LocalSetup& s, const RationalMatrix& g, const RationalMatrix& g_inv) {
  const Integer& p = s.p;
  const long cond = neg_min_valuation(g, p) + neg_min_valuation(g_inv, p);
  long level = s.level > 0 ? s.level : std::max(4L, cond + 4);
  for (int attempt = 0;; ++attempt) {
    GeneratorSet set;
    for (const auto& x : s.lie_basis) {
      const RationalMatrix two_p_x = x * Rational(2 * p);
      const RationalMatrix e = padic::exp_matrix(two_p_x, p, level).values();
      const RationalMatrix e_inv = padic::exp_matrix(-two_p_x, p, level).values();
      set.gens.push_back(g * e * g_inv);
      set.invs.push_back(g * e_inv * g_inv);
    }
    OrbitReport rep = lattice_orbit_index(set.gens, set.invs, p, s.cap, nullptr);
    rep.precision_used = level;
    const long needed = 2 * rep.max_spread + cond;
    rep.level_sufficient = rep.terminated && level >= needed;
    if (rep.level_sufficient || !rep.terminated || s.level > 0 || attempt >= 6) return rep;
    level = needed + 1;
  }
}

Rational abs_lcm_range(const Integer& p, std::size_t d) {
  return abs_p(Rational(lcm_range(static_cast<long>(d))), p);
}

}  // namespace

LatticeHom differential(const LocalSetup& setup) {
  validate(setup);
  return conjugate_representation(setup.conjugator, source_basis(setup), standard_gl_basis(setup.dim()));
}

OrbitReport local_index(const LocalSetup& s) {
  validate(s);
  const RationalMatrix& g = s.conjugator;
  const RationalMatrix g_inv = g.inverse();
  const std::size_t d = s.dim();
  switch (s.kind) {
    case LocalCase::Cyclic:
      return cyclic_exp_index(g * s.lie_basis.front() * g_inv, s.p, s.cap);
    case LocalCase::Exp2p:
      return exp2p_index(s, g, g_inv);
    case LocalCase::Nilpotent: {
      auto set = conjugated(g, g_inv, unipotent_generators(s.lie_basis));
      return lattice_orbit_index(set.gens, set.invs, s.p, s.cap, nullptr);
    }
    case LocalCase::Torus: {
      auto set = conjugated(g, g_inv, torus_generators(s.p, d));
      return lattice_orbit_index(set.gens, set.invs, s.p, s.cap, nullptr);
    }
    case LocalCase::Mixed: {
      auto hs = torus_generators(s.p, d);
      auto us = unipotent_generators(s.lie_basis);
      hs.insert(hs.end(), us.begin(), us.end());
      auto set = conjugated(g, g_inv, hs);
      return lattice_orbit_index(set.gens, set.invs, s.p, s.cap, nullptr);
    }
  }
  throw std::logic_error("unhandled case");
}

LocalBoundResult verify_local_bound(const LocalSetup& s, std::optional<Rational> c2) {
  LocalBoundResult out;
  const LatticeHom dphi = differential(s);
  out.height = hom_height_p(dphi, s.p);
  const Rational h(out.height);
  const std::size_t d = s.dim();
  const RationalMatrix g_inv = s.conjugator.inverse();
  out.report = local_index(s);

  switch (s.kind) {
    case LocalCase::Cyclic: {
      const Rational hx = local_height(s.conjugator * s.lie_basis.front() * g_inv, s.p);
      out.bound = s.p > static_cast<long>(d) ? hx : hx / Rational(static_cast<long>(d));
      break;
    }
    case LocalCase::Nilpotent:
      out.bound = abs_lcm_range(s.p, d) * h;
      break;
    case LocalCase::Exp2p:
      out.bound = abs_p(Rational(2 * s.p * lcm_range(static_cast<long>(d))), s.p) * h;
      break;
    case LocalCase::Mixed: {
      // Subgroup principle: the group contains both components.
      LocalSetup torus = s;
      torus.kind = LocalCase::Torus;
      torus.lie_basis.clear();
      LocalSetup nil = s;
      nil.kind = LocalCase::Nilpotent;
      out.components.push_back(local_index(torus));
      out.components.push_back(local_index(nil));
      const Integer hn = hom_height_p(differential(nil), s.p);
      out.bound = abs_lcm_range(s.p, d) * Rational(hn);
      for (const auto& c : out.components) {
        if (!c.terminated) {
          out.verdict = Verdict::Inconclusive;
          return out;
        }
        out.bound = std::max(out.bound, Rational(c.index));
      }
      break;
    }
    case LocalCase::Torus: {
      const RationalMatrix& g = s.conjugator;
      auto set = conjugated(g, g_inv, torus_unipotent_generators(s.p, d));
      out.unipotent_report = lattice_orbit_index(set.gens, set.invs, s.p, s.cap, nullptr);
      if (!out.report.terminated || !out.unipotent_report->terminated) {
        out.verdict = Verdict::Inconclusive;
        return out;
      }
      out.quotient = make_rational(out.report.index, out.unipotent_report->index);
      if (out.height == 1) {
        out.bound = 1;
        out.slack = Rational(out.report.index);
        out.verdict = Verdict::Pass;
        return out;
      }
      out.measured_c2 = Rational(s.p) / *out.quotient;
      const Rational c = c2.value_or(*out.measured_c2);
      if (c <= 0) throw std::invalid_argument("c2 must be positive");
      out.bound = Rational(s.p) / c;
      out.slack = *out.quotient / out.bound;
      out.verdict = *out.quotient >= out.bound ? Verdict::Pass : Verdict::Fail;
      return out;
    }
  }
  if (!out.report.terminated || !out.report.level_sufficient) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  const Rational index(out.report.index);
  out.slack = index / out.bound;
  out.verdict = index >= out.bound ? Verdict::Pass : Verdict::Fail;
  return out;
}

Rational measure_torus_constant(const std::vector<LocalSetup>& family) {
  Rational c = 0;
  for (const auto& s : family) {
    if (s.kind != LocalCase::Torus) throw std::invalid_argument("torus family contains a non-torus setup");
    LocalBoundResult r = verify_local_bound(s);
    if (r.verdict == Verdict::Inconclusive) throw std::runtime_error("torus index hit the cap");
    if (r.measured_c2) c = std::max(c, *r.measured_c2);
  }
  return c;
}

GlobalBoundResult verify_global_bound(const GlobalSetup& setup) {
  if (setup.c <= 0) throw std::invalid_argument("c must be positive");
  LocalSetup probe;
  probe.kind = setup.kind;
  probe.conjugator = setup.conjugator;
  probe.lie_basis = setup.lie_basis;
  probe.cap = setup.cap;
  probe.p = setup.primes.empty() ? Integer(2) : setup.primes.front();

  GlobalBoundResult out;
  const LatticeHom dphi = differential(probe);
  out.finite_height = hom_height_f(dphi);
  out.omega = omega(out.finite_height);
  for (const auto& q : prime_factors(out.finite_height)) {
    if (std::find(setup.primes.begin(), setup.primes.end(), q) == setup.primes.end()) {
      throw std::invalid_argument("prime list misses " + to_string(q) + ", which divides H_f");
    }
  }
  bool inconclusive = false;
  for (const auto& q : setup.primes) {
    LocalSetup s = probe;
    s.p = q;
    OrbitReport r = local_index(s);
    if (!r.terminated || !r.level_sufficient) inconclusive = true;
    else out.index_product *= r.index;
    out.per_prime.emplace(q, std::move(r));
  }
  Rational c_pow = 1;
  for (long i = 0; i < out.omega; ++i) c_pow *= setup.c;
  out.bound = Rational(out.finite_height) / c_pow;
  if (inconclusive) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  if (out.index_product < out.finite_height && out.omega > 0) {
    const Rational ratio = make_rational(out.finite_height, out.index_product);
    out.measured_c = std::pow(ratio.get_d(), 1.0 / static_cast<double>(out.omega));
  }
  out.verdict = Rational(out.index_product) >= out.bound ? Verdict::Pass : Verdict::Fail;
  return out;
}

LocalSetup parse_descriptor(const std::string& text) {
  LocalSetup s;
  std::istringstream in(text);
  std::string line;
  long d = 0;
  bool have_case = false, have_p = false;
  std::vector<std::string> pending_conj;
  std::vector<std::vector<std::string>> pending_basis;
  auto read_matrix = [&](const std::vector<std::string>& toks) {
    if (d <= 0) throw std::invalid_argument("descriptor: 'd' must precede matrices");
    if (static_cast<long>(toks.size()) != d * d) throw std::invalid_argument("descriptor: matrix needs d*d entries");
    RationalMatrix m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (long k = 0; k < d * d; ++k)
      m(static_cast<std::size_t>(k / d), static_cast<std::size_t>(k % d)) = parse_rational(toks[static_cast<std::size_t>(k)]);
    return m;
  };
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    auto single = [&]() -> const std::string& {
      if (toks.size() != 1) throw std::invalid_argument("descriptor: '" + key + "' takes one value");
      return toks.front();
    };
    if (key == "case") {
      s.kind = parse_local_case(single());
      have_case = true;
    } else if (key == "p") {
      s.p = Integer(single());
      have_p = true;
    } else if (key == "d") {
      d = std::stol(single());
      if (d < 1 || d > 8) throw std::invalid_argument("descriptor: d out of range");
    } else if (key == "cap") {
      s.cap = std::stoull(single());
    } else if (key == "level") {
      s.level = std::stol(single());
    } else if (key == "conjugator") {
      pending_conj = toks;
    } else if (key == "basis") {
      pending_basis.push_back(toks);
    } else {
      throw std::invalid_argument("descriptor: unknown key '" + key + "'");
    }
  }
  if (!have_case || !have_p || d == 0) throw std::invalid_argument("descriptor: case, p and d are required");
  s.conjugator = pending_conj.empty() ? RationalMatrix::identity(static_cast<std::size_t>(d)) : read_matrix(pending_conj);
  for (const auto& b : pending_basis) s.lie_basis.push_back(read_matrix(b));
  validate(s);
  return s;
}

}  // namespace heightlab::orbit

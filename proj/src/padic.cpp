#include "heightlab/padic.hpp"

#include <algorithm>
#include <sstream>

namespace heightlab::padic {

namespace {

void require_precision(long n) {
  if (n < 1 || n > kMaxPrecision) {
    throw std::invalid_argument("precision must lie in [1, " + std::to_string(kMaxPrecision) +
                                "], got " + std::to_string(n));
  }
}

// v_p(n!) by Legendre's formula.
long factorial_valuation(long n, long p) {
  long v = 0;
  for (long q = n / p; q > 0; q /= p) v += q;
  return v;
}

long valuation_of(long n, long p) {
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

long small_prime(const Integer& p) {
  if (!p.fits_slong_p()) throw std::invalid_argument("prime too large for series bookkeeping");
  return p.get_si();
}

// Smallest integer n >= 1 with slope*n + offset > target, slope > 0.
long first_exceeding(const Rational& slope, const Rational& offset, const Rational& target) {
  Rational t = (target - offset) / slope;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Integer n = fl + 1;
  if (n < 1) n = 1;
  if (!n.fits_slong_p()) throw std::invalid_argument("series truncation index overflow");
  return n.get_si();
}

}  // namespace

Integer reduce_mod_power(const Rational& x, const Integer& p, long n) {
  Integer mod = ipow(p, static_cast<unsigned long>(n));
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), x.get_den_mpz_t(), mod.get_mpz_t()) == 0) {
    if (mod == 1) return 0;
    throw std::invalid_argument("value is not p-integral: " + to_string(x));
  }
  Integer r = x.get_num() * inv;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
  return r;
}

PadicMatrix PadicMatrix::from_rational(const RationalMatrix& m, const Integer& p, long precision,
                                       std::optional<long> shift) {
  require_prime(p);
  require_precision(precision);
  if (!m.is_square() || m.rows() == 0) throw std::invalid_argument("p-adic matrix must be square, d >= 1");
  Valuation v = m.min_valuation(p);
  long needed = v.is_infinite() ? 0 : std::max(0L, -v.value());
  long s = shift.value_or(needed);
  if (s < needed) {
    throw std::invalid_argument("shift " + std::to_string(s) + " cannot represent an entry of valuation " +
                                v.str());
  }
  if (s > kMaxPrecision) throw std::invalid_argument("shift exceeds representable range");
  PadicMatrix out(p, m.rows(), s, precision);
  Rational scale = power_of(p, s);
  for (std::size_t i = 0; i < out.d_; ++i)
    for (std::size_t j = 0; j < out.d_; ++j)
      out.residues_[i * out.d_ + j] = reduce_mod_power(m(i, j) * scale, p, precision + s);
  return out;
}

Rational PadicMatrix::value(std::size_t i, std::size_t j) const {
  return make_rational(residue(i, j), ipow(p_, static_cast<unsigned long>(shift_)));
}

RationalMatrix PadicMatrix::values() const {
  RationalMatrix m(d_, d_);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) m(i, j) = value(i, j);
  return m;
}

Rational PadicMatrix::norm() const {
  Valuation best = Valuation::infinity();
  for (const auto& r : residues_) {
    if (r == 0) continue;
    best = std::min(best, Valuation(multiplicity(r, p_) - shift_));
  }
  if (best.is_infinite()) return 0;
  return power_of(p_, -best.value());
}

Rational PadicMatrix::local_height() const { return std::max<Rational>(1, norm()); }

bool PadicMatrix::congruent(const RationalMatrix& exact, long n) const {
  if (n > precision_) throw std::invalid_argument("congruence beyond stored precision");
  return congruent_mod(values(), exact, p_, n);
}

std::string PadicMatrix::to_text() const {
  std::ostringstream os;
  os << to_string(p_) << ' ' << d_ << ' ' << shift_ << ' ' << precision_ << '\n';
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = 0; j < d_; ++j) {
      if (j) os << ' ';
      os << to_string(value(i, j));
    }
    os << '\n';
  }
  return os.str();
}

PadicMatrix PadicMatrix::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string p_tok;
  long d = 0, s = 0, n = 0;
  if (!(is >> p_tok >> d >> s >> n)) throw std::invalid_argument("malformed p-adic matrix header");
  if (d < 1 || s < 0) throw std::invalid_argument("p-adic matrix header out of range");
  Integer p(p_tok);
  RationalMatrix m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (long k = 0; k < d * d; ++k) {
    std::string tok;
    if (!(is >> tok)) throw std::invalid_argument("p-adic matrix literal has too few entries");
    m(static_cast<std::size_t>(k / d), static_cast<std::size_t>(k % d)) = parse_rational(tok);
  }
  std::string extra;
  if (is >> extra) throw std::invalid_argument("trailing data after p-adic matrix literal");
  return from_rational(m, p, n, s);
}

bool CharPoly::is_pure_power() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& c) { return c == 0; });
}

std::string CharPoly::to_string() const {
  std::ostringstream os;
  const std::size_t d = coeffs.size();
  os << "T^" << d;
  for (std::size_t k = d; k-- > 0;) {
    const Rational& c = coeffs[k];
    if (c == 0) continue;
    os << (c < 0 ? " - " : " + ") << heightlab::to_string(Rational(abs(c)));
    if (k > 0) os << "*T^" << k;
  }
  return os.str();
}

CharPoly char_poly(const RationalMatrix& z) {
  if (!z.is_square()) throw std::invalid_argument("char_poly of non-square matrix");
  const std::size_t d = z.rows();
  CharPoly cp;
  cp.coeffs.assign(d, Rational(0));
  RationalMatrix m = RationalMatrix::identity(d);
  for (std::size_t k = 1; k <= d; ++k) {
    RationalMatrix am = z * m;
    Rational c = -am.trace() / Rational(static_cast<long>(k));
    cp.coeffs[d - k] = c;
    if (k < d) {
      m = am;
      for (std::size_t i = 0; i < d; ++i) m(i, i) += c;
    }
  }
  return cp;
}

Rational matrix_norm(const PadicMatrix& z) { return z.norm(); }
Rational local_height(const PadicMatrix& z) { return z.local_height(); }

Valuation criterion_order(const RationalMatrix& z, const Integer& p) {
  require_prime(p);
  CharPoly cp = char_poly(z);
  Valuation v = Valuation::infinity();
  for (const auto& c : cp.coeffs) v = std::min(v, valuation_unchecked(c, p));
  return v;
}

bool log_criterion(const RationalMatrix& z, const Integer& p, long k) {
  return criterion_order(z, p) >= Valuation(k);
}

bool exp_converges(const RationalMatrix& x, const Integer& p) {
  Valuation k = criterion_order(x, p);
  if (k.is_infinite()) return true;
  if (k.value() < 1) return false;
  Integer lhs = static_cast<long>(x.rows());
  return lhs < Integer(k.value()) * (p - 1);
}

bool exp_converges_by_norm(const RationalMatrix& x, const Integer& p) {
  require_prime(p);
  Valuation v = x.min_valuation(p);
  if (v.is_infinite()) return true;
  return Integer(v.value()) * (p - 1) > 1;
}

long exp_truncation_index(const RationalMatrix& x, const Integer& p, long n) {
  require_precision(n);
  const long d = static_cast<long>(x.rows());
  Valuation order = criterion_order(x, p);
  if (order.is_infinite()) return d - 1;  // x^d = 0
  const long pp = small_prime(p);
  const Rational inv_pm1(1, pp - 1);
  const long h = local_height_exponent(x, p);

  std::optional<long> best;
  auto scan = [&](long upper, auto&& exponent) {
    long last = 0;
    for (long k = 1; k < upper; ++k)
      if (exponent(k) <= n) last = k;
    best = best ? std::min(*best, last) : last;
  };

  if (exp_converges(x, p)) {
    // ||x^k|| <= |p|^(order * floor(k/d)) * H_p(x)^(d-1)
    const long kappa = order.value();
    Rational slope = make_rational(kappa, d) - inv_pm1;
    Rational offset = -make_rational(kappa * (d - 1), d) + inv_pm1 - (d - 1) * h;
    long upper = first_exceeding(slope, offset, n);
    scan(upper, [&](long k) { return kappa * (k / d) - factorial_valuation(k, pp) - (d - 1) * h; });
  }
  if (exp_converges_by_norm(x, p)) {
    const long mu = x.min_valuation(p).value();
    Rational slope = Rational(mu) - inv_pm1;
    long upper = first_exceeding(slope, inv_pm1, n);
    scan(upper, [&](long k) { return mu * k - factorial_valuation(k, pp); });
  }
  if (!best) {
    std::ostringstream os;
    os << "exp does not converge by the criterion: chi in T^d + p^k Z_p[T] with k = " << order.str()
       << ", d = " << d << ", p = " << to_string(p) << " (need d < k(p-1))";
    throw ConvergenceError(os.str(), order);
  }
  return *best;
}

long log_truncation_index(const RationalMatrix& y, const Integer& p, long n) {
  require_precision(n);
  const long d = static_cast<long>(y.rows());
  Valuation order = criterion_order(y, p);
  if (order.is_infinite()) return std::max(1L, d - 1);  // y^d = 0
  if (order.value() < 1) {
    throw ConvergenceError("log(1+Y) criterion fails: chi_Y not in T^d + p Z_p[T] (k = " + order.str() + ")",
                           order);
  }
  const long pp = small_prime(p);
  const long kappa = order.value();
  const long h = local_height_exponent(y, p);
  // On [p^j, p^(j+1)) the term exponent is at least kappa(p^j - d + 1)/d - j - (d-1)h,
  // which is nondecreasing in j once kappa p^j (p-1) >= d.
  long j = 0;
  Integer pj = 1;
  for (;; ++j, pj *= pp) {
    Rational lower = make_rational(Integer(kappa) * (pj - d + 1), d) - j - (d - 1) * h;
    if (Integer(kappa) * pj * (pp - 1) >= d && lower > n) break;
    if (j > 64) throw std::invalid_argument("log truncation index overflow");
  }
  if (!pj.fits_slong_p()) throw std::invalid_argument("log truncation index overflow");
  long last = 1;
  for (long k = 1; k < pj.get_si(); ++k) {
    long e = kappa * (k / d) - valuation_of(k, pp) - (d - 1) * h;
    if (e <= n) last = k;
  }
  return last;
}

RationalMatrix exp_partial_sum(const RationalMatrix& x, long last) {
  const std::size_t d = x.rows();
  RationalMatrix term = RationalMatrix::identity(d);
  RationalMatrix sum = term;
  for (long k = 1; k <= last; ++k) {
    term = term * x;
    term *= Rational(1, k);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

RationalMatrix log_partial_sum(const RationalMatrix& y, long last) {
  const std::size_t d = y.rows();
  RationalMatrix sum(d, d);
  RationalMatrix power = RationalMatrix::identity(d);
  for (long k = 1; k <= last; ++k) {
    power = power * y;
    if (power.is_zero()) break;
    sum += power * Rational(k % 2 == 1 ? 1 : -1, k);
  }
  return sum;
}

PadicMatrix exp_matrix(const RationalMatrix& x, const Integer& p, long n) {
  if (!x.is_square() || x.rows() == 0) throw std::invalid_argument("exp of non-square matrix");
  long last = exp_truncation_index(x, p, n);
  return PadicMatrix::from_rational(exp_partial_sum(x, last), p, n);
}

PadicMatrix log_matrix(const RationalMatrix& y, const Integer& p, long n) {
  if (!y.is_square() || y.rows() == 0) throw std::invalid_argument("log of non-square matrix");
  long last = log_truncation_index(y, p, n);
  PadicMatrix out = PadicMatrix::from_rational(log_partial_sum(y, last), p, n);

  const long d = static_cast<long>(y.rows());
  Rational hd = local_height(y, p);
  Rational power = 1;
  for (long k = 0; k < d - 1; ++k) power *= hd;
  Rational norm = out.norm();
  if (norm > Rational(d) * power) {
    throw std::logic_error("log(1+Y) violates ||log|| <= d H_p(Y)^(d-1)");
  }
  if (p > d && norm > power) {
    throw std::logic_error("log(1+Y) violates ||log|| <= H_p(Y)^(d-1) for p > d");
  }
  return out;
}

bool check_log_chi_necessity(const RationalMatrix& y, const Integer& p) { return log_criterion(y, p, 1); }

bool log_exp_roundtrip(const RationalMatrix& x, const Integer& p, long n) {
  require_precision(n);
  const long d = static_cast<long>(x.rows());
  const long hx = local_height_exponent(x, p);
  long guard = 2 * (d - 1) * (hx + 1) + floor_log(Integer(d * (n + 1)), p) + 4;
  const RationalMatrix one = RationalMatrix::identity(x.rows());
  for (int attempt = 0; attempt < 4; ++attempt, guard *= 2) {
    long work = std::min(n + guard, kMaxPrecision);
    RationalMatrix y = exp_matrix(x, p, work).values() - one;
    if (!log_criterion(y, p, 1)) continue;
    if (log_matrix(y, p, n).congruent(x, n)) return true;
  }
  return false;
}

}  // namespace heightlab::padic

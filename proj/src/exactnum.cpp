#include "heightlab/exactnum.hpp"

#include <algorithm>
#include <stdexcept>

namespace heightlab {

long Valuation::value() const {
  if (!value_) throw std::logic_error("valuation is infinite");
  return *value_;
}

std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return *a.value_ <=> *b.value_;
}

std::string Valuation::str() const {
  return value_ ? std::to_string(*value_) : std::string("INFINITY");
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  auto last = text.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("empty rational literal");
  std::string s = text.substr(first, last - first + 1);
  if (s.front() == '+') s.erase(0, 1);
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0) {
    throw std::invalid_argument("malformed rational literal '" + text + "'");
  }
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }
std::string to_string(const Integer& n) { return n.get_str(10); }

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

void require_prime(const Integer& p) {
  if (!is_prime(p)) throw std::invalid_argument("not a prime: " + to_string(p));
}

long multiplicity(const Integer& n, const Integer& p) {
  if (n == 0) throw std::invalid_argument("multiplicity of zero");
  Integer rest;
  return static_cast<long>(
      mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

Valuation valuation_unchecked(const Rational& x, const Integer& p) {
  if (x == 0) return Valuation::infinity();
  return Valuation(multiplicity(x.get_num(), p) - multiplicity(x.get_den(), p));
}

Valuation valuation(const Rational& x, const Integer& p) {
  require_prime(p);
  return valuation_unchecked(x, p);
}

Rational abs_p(const Rational& x, const Integer& p) {
  Valuation v = valuation(x, p);
  if (v.is_infinite()) return Rational(0);
  return power_of(p, -v.value());
}

Rational abs_real(const Rational& x) { return abs(x); }

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Rational power_of(const Integer& p, long e) {
  if (e >= 0) return Rational(ipow(p, static_cast<unsigned long>(e)));
  return make_rational(1, ipow(p, static_cast<unsigned long>(-e)));
}

namespace {

Integer pollard_brent(const Integer& n, unsigned long seed) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  Integer y = seed % 1000 + 2, c = seed % 97 + 1, g = 1, q = 1, x, ys;
  const unsigned long m = 128;
  unsigned long r = 1;
  auto f = [&](const Integer& v) {
    Integer t = v * v + c;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    return t;
  };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) y = f(y);
    unsigned long k = 0;
    while (k < r && g == 1) {
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
        y = f(y);
        Integer diff = abs(x - y);
        q = q * diff;
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = f(ys);
      Integer diff = abs(x - ys);
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

void factor_into(Integer n, std::vector<Integer>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Integer d = n;
  for (unsigned long seed = 1; d == n; ++seed) d = pollard_brent(n, seed);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<Integer> prime_factors(const Integer& n) {
  if (n == 0) throw std::invalid_argument("prime_factors of zero");
  Integer m = abs(n);
  std::vector<Integer> out;
  for (unsigned long small = 2; small < 1000 && m > 1; ++small) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), small)) {
      out.emplace_back(small);
      while (mpz_divisible_ui_p(m.get_mpz_t(), small)) m /= small;
    }
  }
  if (m > 1) {
    std::vector<Integer> big;
    factor_into(m, big);
    std::sort(big.begin(), big.end());
    big.erase(std::unique(big.begin(), big.end()), big.end());
    out.insert(out.end(), big.begin(), big.end());
  }
  return out;
}

long omega(const Integer& n) {
  if (n < 1) throw std::invalid_argument("omega needs n >= 1");
  return static_cast<long>(prime_factors(n).size());
}

long floor_log(const Integer& n, const Integer& p) {
  if (n < 1) throw std::invalid_argument("floor_log needs n >= 1");
  long k = 0;
  Integer pk = p;
  while (pk <= n) {
    pk *= p;
    ++k;
  }
  return k;
}

Integer lcm_range(long d) {
  Integer l = 1;
  for (long i = 2; i <= d; ++i) {
    Integer ii = i;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), ii.get_mpz_t());
  }
  return l;
}

Place Place::at(const Integer& p) {
  require_prime(p);
  return Place(Kind::Prime, p);
}

Integer finite_height(std::span<const Rational> coords) {
  Integer l = 1;
  for (const auto& w : coords) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), w.get_den_mpz_t());
  }
  return l;
}

Rational height_tuple(std::span<const Rational> coords, const Place& place) {
  if (coords.empty()) throw std::invalid_argument("height of an empty tuple");
  switch (place.kind()) {
    case Place::Kind::Real: {
      Rational h = 1;
      for (const auto& w : coords) h = std::max<Rational>(h, abs(w));
      return h;
    }
    case Place::Kind::Prime: {
      Rational h = 1;
      for (const auto& w : coords) h = std::max<Rational>(h, abs_p(w, place.prime()));
      return h;
    }
    case Place::Kind::Finite: {
      // Only primes dividing some denominator contribute.
      Integer l = finite_height(coords);
      Rational h = 1;
      if (l == 1) return h;
      for (const auto& p : prime_factors(l)) h *= height_tuple(coords, Place::at(p));
      return h;
    }
    case Place::Kind::Global:
      return height_tuple(coords, Place::real()) * height_tuple(coords, Place::finite());
  }
  throw std::logic_error("unknown place");
}

GmHeights gm_heights(const Rational& t) {
  if (t == 0) throw std::invalid_argument("gm_heights of zero");
  Rational at = abs(t);
  Rational inv = 1 / at;
  return GmHeights{std::max(at, inv), abs(t.get_num() * t.get_den())};
}

}  // namespace heightlab

#include "heightlab/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace heightlab::siegel {

void SiegelParams::validate() const {
  if (omega_bound <= 0) throw std::invalid_argument("Siegel bound c must be positive");
  if (height_floor <= 0) throw std::invalid_argument("Siegel floor t must be positive");
}

void require_sl2(const RationalMatrix& g) {
  if (g.rows() != 2 || g.cols() != 2) throw std::invalid_argument("expected a 2x2 matrix");
  if (g.determinant() != 1) throw std::invalid_argument("determinant is not 1");
}

Iwasawa iwasawa(const RationalMatrix& g) {
  require_sl2(g);
  const Rational& a = g(0, 0);
  const Rational& b = g(0, 1);
  const Rational& c = g(1, 0);
  const Rational& d = g(1, 1);
  const Rational n = c * c + d * d;
  return {Rational((a * c + b * d) / n), Rational(1 / n)};
}

bool siegel_member(const RationalMatrix& g, const SiegelParams& params) {
  params.validate();
  const Iwasawa xy = iwasawa(g);
  return abs(xy.x) <= params.omega_bound && xy.y >= params.height_floor;
}

SiegelPoint SiegelPoint::make(const RationalMatrix& g, const SiegelParams& params) {
  params.validate();
  const Iwasawa xy = iwasawa(g);
  return {g, xy.x, xy.y, abs(xy.x) <= params.omega_bound && xy.y >= params.height_floor};
}

QuadraticForm::QuadraticForm(RationalMatrix gram) : gram_(std::move(gram)) {
  if (!gram_.is_square()) throw std::invalid_argument("Gram matrix must be square");
  if (gram_ != gram_.transpose()) throw std::invalid_argument("Gram matrix must be symmetric");
}

QuadraticForm QuadraticForm::sum_of_squares(std::size_t n) { return QuadraticForm(RationalMatrix::identity(n)); }

QuadraticForm QuadraticForm::averaged(const QuadraticForm& base, const std::vector<RationalMatrix>& group) {
  if (group.empty()) throw std::invalid_argument("empty group");
  RationalMatrix sum(base.gram_.rows(), base.gram_.cols());
  for (const auto& z : group) {
    if (z.rows() != sum.rows() || z.cols() != sum.cols()) throw std::invalid_argument("group element has wrong size");
    sum += z.transpose() * base.gram_ * z;
  }
  return QuadraticForm(sum * make_rational(1, static_cast<long>(group.size())));
}

Rational QuadraticForm::operator()(const std::vector<Rational>& w) const {
  if (w.size() != gram_.rows()) throw std::invalid_argument("vector has wrong length");
  Rational s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[i] * gram_(i, j) * w[j];
  }
  return s;
}

Rational QuadraticForm::on_matrix(const RationalMatrix& m) const { return (*this)(m.entries()); }

bool QuadraticForm::is_positive_definite() const {
  const std::size_t n = gram_.rows();
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix minor(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = gram_(i, j);
    if (minor.determinant() <= 0) return false;
  }
  return true;
}

bool QuadraticForm::is_invariant_under(const RationalMatrix& z) const {
  return z.transpose() * gram_ * z == gram_;
}

RationalMatrix adjoint_matrix(const RationalMatrix& g) {
  if (!g.is_square() || g.determinant() == 0) throw std::invalid_argument("adjoint needs an invertible matrix");
  const std::size_t n = g.rows();
  const RationalMatrix g_inv = g.inverse();
  RationalMatrix out(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const RationalMatrix image = g * RationalMatrix::unit(n, i, j) * g_inv;
      for (std::size_t k = 0; k < n * n; ++k) out(k, i * n + j) = image.entries()[k];
    }
  return out;
}

std::vector<RationalMatrix> finite_group_closure(const std::vector<RationalMatrix>& generators,
                                                 std::size_t max_order) {
  if (generators.empty()) throw std::invalid_argument("no generators");
  const std::size_t n = generators.front().rows();
  std::vector<RationalMatrix> elems{RationalMatrix::identity(n)};
  std::set<std::string> seen{elems.front().to_string()};
  for (std::size_t k = 0; k < elems.size(); ++k) {
    for (const auto& g : generators) {
      RationalMatrix next = elems[k] * g;
      if (seen.insert(next.to_string()).second) {
        elems.push_back(std::move(next));
        if (elems.size() > max_order) throw std::invalid_argument("group is infinite or exceeds the order limit");
      }
    }
  }
  return elems;
}

Rational p_map(const RationalMatrix& g) { return p_map(g, QuadraticForm::sum_of_squares(4)); }

Rational p_map(const RationalMatrix& g, const QuadraticForm& q) {
  require_sl2(g);
  if (q.gram().rows() != 4) throw std::invalid_argument("form must live on the 4 matrix coordinates");
  return q.on_matrix(g.inverse() * RationalMatrix::unit(2, 0, 1) * g);
}

ClaimResult check_siegel_claim(const std::vector<RationalMatrix>& samples, const SiegelParams& params,
                               std::optional<Rational> c_limit) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  ClaimResult out;
  bool first = true;
  for (const auto& g : samples) {
    const SiegelPoint pt = SiegelPoint::make(g, params);
    if (!pt.member) throw std::invalid_argument("sample is outside the Siegel set");
    const Rational p = p_map(g);
    if (p <= 0) out.all_positive = false;
    const Rational c = p * pt.y * pt.y;
    if (first || c > out.c_measured) out.c_measured = c;
    if (first || p < out.min_p) out.min_p = p;
    first = false;
  }
  out.pass = out.all_positive && (!c_limit || out.c_measured <= *c_limit);
  return out;
}

bool torus_ray_strictly_decreasing(const std::vector<Rational>& ts) {
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i] <= 0 || ts[i + 1] <= ts[i]) throw std::invalid_argument("ray parameters must be positive and increasing");
  }
  Rational prev;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const RationalMatrix a = RationalMatrix::diagonal({ts[i], 1 / ts[i]});
    const Rational p = p_map(a);
    if (i > 0 && !(p < prev)) return false;
    prev = p;
  }
  return true;
}

Heights matrix_heights(const RationalMatrix& g) {
  Heights h{Rational(1), Integer(1)};
  for (const auto& e : g.entries()) h.real = std::max(h.real, Rational(abs(e)));
  h.finite = g.denominator_lcm();
  return h;
}

namespace {

// Exact check of hr <= c + a * hf^(k/den).
bool dominated(const Rational& hr, const Integer& hf, const Rational& c, const Rational& a, int k, int den) {
  const Rational lhs = hr - c;
  if (lhs <= 0) return true;
  if (a <= 0) return false;
  const Rational r = lhs / a;
  Rational r_pow = 1;
  for (int i = 0; i < den; ++i) r_pow *= r;
  return r_pow <= Rational(ipow(hf, static_cast<unsigned long>(k)));
}

double to_double_up(const Rational& q) {
  const double v = q.get_d();
  return Rational(v) >= q ? v : std::nextafter(v, INFINITY);
}

}  // namespace

DominationFit fit_domination(const std::vector<std::pair<Rational, Integer>>& samples, const FitOptions& opts) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  if (opts.c < 0 || opts.a_max <= 0 || opts.grid_denominator < 1 || opts.b_max < 0) {
    throw std::invalid_argument("invalid fit options");
  }
  const int den = opts.grid_denominator;
  const int k_max = static_cast<int>(std::floor(opts.b_max * den));
  DominationFit fit;
  fit.n_samples = samples.size();
  fit.c = to_double_up(opts.c);
  for (int k = 0; k <= k_max; ++k) {
    const double b = static_cast<double>(k) / den;
    // Required a from floating estimates, padded upward, then verified exactly.
    double a_est = 0;
    for (const auto& [hr, hf] : samples) {
      const double excess = Rational(hr - opts.c).get_d();
      if (excess <= 0) continue;
      const double need = excess / std::pow(hf.get_d(), b);
      a_est = std::max(a_est, need);
    }
    Rational a(a_est * (1 + 1e-9) + 1e-300);
    if (a_est == 0) a = 0;
    if (a > opts.a_max && Rational(a_est) <= opts.a_max) a = opts.a_max;
    if (a > opts.a_max) {
      if (k == k_max) {
        a = opts.a_max;
      } else {
        continue;
      }
    }
    std::uint64_t violations = 0;
    for (const auto& [hr, hf] : samples)
      if (!dominated(hr, hf, opts.c, a, k, den)) ++violations;
    if (violations == 0 || k == k_max) {
      fit.a = to_double_up(a);
      fit.b = b;
      fit.violations = violations;
      return fit;
    }
  }
  fit.b = static_cast<double>(k_max) / den;
  fit.a = to_double_up(opts.a_max);
  fit.violations = samples.size();
  return fit;
}

namespace {

Rational random_fraction(std::mt19937_64& rng, long max_den, const Rational& lo, const Rational& hi) {
  const long den = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(max_den));
  // Uniform numerator in [ceil(lo*den), floor(hi*den)].
  Rational lo_s = lo * den, hi_s = hi * den;
  Integer a, b;
  mpz_cdiv_q(a.get_mpz_t(), lo_s.get_num_mpz_t(), lo_s.get_den_mpz_t());
  mpz_fdiv_q(b.get_mpz_t(), hi_s.get_num_mpz_t(), hi_s.get_den_mpz_t());
  if (b < a) return lo;
  Integer span = b - a + 1;
  Integer off = Integer(std::to_string(rng())) % span;
  return make_rational(a + off, den);
}

RationalMatrix pythagorean_rotation(long m, long n) {
  const Rational s = m * m + n * n;
  const Rational cs = (m * m - n * n) / s;
  const Rational sn = (2 * m * n) / s;
  return {{cs, -sn}, {sn, cs}};
}

}  // namespace

std::vector<RationalMatrix> sample_siegel_points(const SamplerConfig& config) {
  config.params.validate();
  if (config.n_samples == 0) throw std::invalid_argument("empty sample set");
  if (config.max_denominator < 1 || config.max_rotation < 1) throw std::invalid_argument("invalid sampler sizes");
  std::mt19937_64 rng(config.seed);
  std::vector<RationalMatrix> out;
  out.reserve(config.n_samples);
  const Rational& c = config.params.omega_bound;
  const Rational& t0 = config.params.height_floor;
  // t ranges over [t_min, t_min + 8] with t_min^2 >= t0.
  Rational t_min = 1;
  while (t_min * t_min >= t0 * 4) t_min /= 2;
  while (t_min * t_min < t0) t_min *= 2;
  std::uint64_t attempts = 0;
  while (out.size() < config.n_samples) {
    if (++attempts > config.n_samples * 1000) throw std::runtime_error("sampler cannot meet the height ceiling");
    const Rational x = random_fraction(rng, config.max_denominator, -c, c);
    const Rational t = random_fraction(rng, config.max_denominator, t_min, t_min + 8);
    if (t <= 0 || t * t < t0) continue;
    const RationalMatrix n{{1, x}, {0, 1}};
    const RationalMatrix a{{t, 0}, {0, 1 / t}};
    RationalMatrix g = n * a;
    if (rng() % 4 != 0) {
      const long m = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(config.max_rotation));
      const long k = static_cast<long>(rng() % static_cast<std::uint64_t>(config.max_rotation + 1));
      g = g * pythagorean_rotation(m, k);
    }
    if (g.denominator_lcm() > config.hf_ceiling) continue;
    out.push_back(std::move(g));
  }
  return out;
}

ComparisonResult height_comparison(const std::vector<RationalMatrix>& samples, const FitOptions& opts,
                                   std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  ComparisonResult out;
  std::vector<std::pair<Rational, Integer>> pairs;
  pairs.reserve(samples.size());
  for (const auto& g : samples) {
    const Iwasawa xy = iwasawa(g);
    const Heights h = matrix_heights(g);
    out.rows.push_back({xy.x, xy.y, h.real, h.finite, p_map(g)});
    pairs.emplace_back(h.real, h.finite);
  }
  out.fit = fit_domination(pairs, opts);
  out.fit.seed = seed;
  return out;
}

ComparisonResult height_comparison_experiment(const SamplerConfig& config) {
  return height_comparison(sample_siegel_points(config), config.fit, config.seed);
}

std::string to_csv(const std::vector<SampleRow>& rows) {
  std::ostringstream os;
  os << "x,y,HR_num,HR_den,Hf,p_map_num,p_map_den\n";
  for (const auto& r : rows) {
    os << to_string(r.x) << ',' << to_string(r.y) << ',' << r.hr.get_num() << ',' << r.hr.get_den() << ','
       << r.hf << ',' << r.p.get_num() << ',' << r.p.get_den() << '\n';
  }
  return os.str();
}

}  // namespace heightlab::siegel

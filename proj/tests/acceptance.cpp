// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria (capped at 1).

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "heightlab/exactnum.hpp"
#include "heightlab/experiments.hpp"
#include "heightlab/lattice_heights.hpp"
#include "heightlab/orbit_index.hpp"
#include "heightlab/padic.hpp"
#include "heightlab/siegel.hpp"

using namespace heightlab;
namespace ex = heightlab::experiments;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::mt19937_64 rng_for(std::uint64_t seed, std::size_t i) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(i)};
  return std::mt19937_64(seq);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& fn) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

const std::vector<long> kPrimes{2, 3, 5, 7, 13};
const std::vector<long> kDims{1, 2, 3};
constexpr std::size_t kMatrices = 600;
constexpr long kPrecision = 8;

struct LogSample {
  long p = 0, d = 0;
  RationalMatrix y;
};

// Shared by the log-bound and chi criteria: the same accepted matrices.
std::vector<LogSample> log_samples() {
  std::vector<LogSample> out;
  for (std::size_t i = 0; i < kMatrices; ++i) {
    auto rng = rng_for(202, i);
    const long p = kPrimes[i % kPrimes.size()];
    const long d = kDims[(i / kPrimes.size()) % kDims.size()];
    RationalMatrix y = ex::random_log_admissible(rng, p, d);
    if (padic::log_criterion(y, p, 1)) out.push_back({p, d, std::move(y)});
  }
  return out;
}

Outcome exp_log_roundtrip() {
  const auto t0 = Clock::now();
  std::vector<char> accepted(kMatrices, 0), ok(kMatrices, 0);
  ex::parallel_for(kMatrices, [&](std::size_t i) {
    auto rng = rng_for(101, i);
    const long p = kPrimes[i % kPrimes.size()];
    const long d = kDims[(i / kPrimes.size()) % kDims.size()];
    const RationalMatrix x = ex::random_exp_convergent(rng, p, d);
    if (!padic::exp_converges(x, p)) return;
    accepted[i] = 1;
    ok[i] = padic::log_exp_roundtrip(x, p, kPrecision);
  });
  std::size_t n = 0, bad = 0;
  for (std::size_t i = 0; i < kMatrices; ++i) {
    n += accepted[i];
    if (accepted[i] && !ok[i]) ++bad;
  }
  const double t = seconds_since(t0);
  std::ostringstream s;
  s << n << " matrices, " << bad << " failures, N=" << kPrecision;
  return {n >= 500 && bad == 0 && t < 60, s.str()};
}

Outcome log_bounds(const std::vector<LogSample>& samples) {
  std::vector<char> ok(samples.size(), 0);
  ex::parallel_for(samples.size(), [&](std::size_t i) {
    const auto& s = samples[i];
    const Rational norm = padic::log_matrix(s.y, s.p, kPrecision).norm();
    Rational hp = 1;
    for (long k = 0; k + 1 < s.d; ++k) hp *= local_height(s.y, s.p);
    ok[i] = norm <= s.d * hp && (s.p <= s.d || norm <= hp);
  });
  std::size_t bad = 0;
  for (char c : ok) bad += !c;
  // Equality family: ||log(1 + Y)|| = H_p(Y)^(d-1) for d = 2.
  std::size_t eq_bad = 0, eq_n = 0;
  for (long p : {2L, 3L, 5L, 7L}) {
    for (long k = 1; k <= 6; ++k) {
      const RationalMatrix y{{0, power_of(p, -k)}, {0, 0}};
      ++eq_n;
      if (padic::log_matrix(y, p, kPrecision).norm() != local_height(y, p)) ++eq_bad;
    }
  }
  std::ostringstream s;
  s << samples.size() << " matrices, " << bad << " failures; equality family " << eq_n - eq_bad << "/" << eq_n;
  return {samples.size() >= 500 && bad == 0 && eq_bad == 0, s.str()};
}

Outcome chi_necessity(const std::vector<LogSample>& samples) {
  std::size_t bad = 0;
  for (const auto& s : samples)
    if (!padic::check_log_chi_necessity(s.y, s.p)) ++bad;
  std::ostringstream s;
  s << samples.size() << " matrices, " << bad << " exceptions";
  return {samples.size() >= 500 && bad == 0, s.str()};
}

Outcome cyclic_lemma() {
  const auto t0 = Clock::now();
  std::size_t bad = 0, n = 0;
  for (long p : {2L, 3L, 5L, 7L}) {
    for (long k = 1; k <= 6; ++k) {
      const RationalMatrix x{{0, power_of(p, -k)}, {0, 0}};
      const auto r = orbit::cyclic_exp_index(x, p, 200000);
      const Integer pk = ipow(p, static_cast<unsigned long>(k));
      ++n;
      const bool ok = r.terminated && r.index == pk && 2 * Rational(r.index) >= Rational(pk) &&
                      (p == 2 || r.index >= pk);
      if (!ok) ++bad;
    }
  }
  const double t = seconds_since(t0);
  std::ostringstream s;
  s << n << " cases, " << bad << " mismatches";
  return {bad == 0 && t < 10, s.str()};
}

Outcome unipotent_local() {
  const RationalMatrix e12 = RationalMatrix::unit(2, 0, 1);
  std::size_t bad = 0, n = 0;
  for (long p : {3L, 5L, 7L}) {
    for (long m = -6; m <= -1; ++m) {
      orbit::LocalSetup s;
      s.kind = orbit::LocalCase::Nilpotent;
      s.p = p;
      s.conjugator = RationalMatrix::diagonal({power_of(p, m), 1});
      s.lie_basis = {e12};
      s.cap = 200000;
      const auto res = orbit::verify_local_bound(s);
      const Integer expect = ipow(p, static_cast<unsigned long>(-m));
      ++n;
      const bool ok = res.verdict == orbit::Verdict::Pass && res.report.terminated && res.report.index == expect &&
                      res.height == Rational(expect) && res.slack && *res.slack == 1;
      if (!ok) ++bad;
    }
  }
  std::ostringstream s;
  s << n << " conjugators, " << bad << " mismatches";
  return {bad == 0, s.str()};
}

Outcome global_bound() {
  ex::ExperimentConfig cfg;
  cfg.suite = ex::Suite::GlobalBound;
  const ex::Report r = ex::run(cfg);
  const double c_max = r.body["c_min_max"];
  const double limit = 2.0 * lcm_range(2).get_d();
  std::ostringstream s;
  s << r.body["records"].size() << " families, measured c " << c_max << " vs 2d* = " << limit;
  return {r.status == ex::Status::Pass && c_max <= limit, s.str()};
}

Outcome minkowski() {
  const auto t0 = Clock::now();
  const bool c2 = orbit::minkowski_constant(2) == 48 && orbit::count_invertible_mod(2, 3) == 48;
  const bool c1 = orbit::minkowski_constant(1) == 2 && orbit::count_invertible_mod(1, 3) == 2;
  const bool tf = orbit::minkowski_torsion_check(1) && orbit::minkowski_torsion_check(2);
  const RationalMatrix minus_i = RationalMatrix::identity(2) * Rational(-1);
  const auto mod2 = orbit::minkowski_torsion_search(2, 2, 1);
  const bool flagged = !mod2.torsion_free && congruent_mod(minus_i, RationalMatrix::identity(2), 2, 1) &&
                       minus_i * minus_i == RationalMatrix::identity(2);
  const double t_small = seconds_since(t0);
  const auto t1 = Clock::now();
  const bool c3 = orbit::minkowski_constant(3) == 11232 && orbit::count_invertible_mod(3, 3) == 11232 &&
                  orbit::minkowski_torsion_check(3);
  const double t_big = seconds_since(t1);
  std::ostringstream s;
  s << "C(2)=48 " << (c2 ? "ok" : "bad") << ", torsion N<=2 " << (tf ? "ok" : "bad") << ", -I mod 2 "
    << (flagged ? "flagged" : "missed") << ", N=3 " << (c3 ? "ok" : "bad") << " in " << t_big << "s";
  return {c1 && c2 && tf && flagged && c3 && t_small < 5 && t_big < 600, s.str()};
}

Outcome gm_heights_check() {
  ex::ExperimentConfig cfg;
  cfg.suite = ex::Suite::GmHeights;
  cfg.samples = 1000;
  const ex::Report r = ex::run(cfg);
  std::ostringstream s;
  s << r.body["fractions"] << " fractions, " << r.body["violations"] << " violations";
  return {r.status == ex::Status::Pass && r.body["bound"] == 1000, s.str()};
}

Outcome invariance() {
  ex::ExperimentConfig cfg;
  cfg.suite = ex::Suite::Invariance;
  cfg.samples = 200;
  const ex::Report r = ex::run(cfg);
  std::ostringstream s;
  s << r.body["homs"] << " homs x " << r.body["pairs_per_hom"] << " pairs, " << r.body["violations"] << " violations";
  return {r.status == ex::Status::Pass && r.body["homs"] == 200 && r.body["pairs_per_hom"] == 50, s.str()};
}

Outcome siegel_claims() {
  const auto t0 = Clock::now();
  siegel::SamplerConfig cfg;
  cfg.seed = 1;
  cfg.n_samples = 10000;
  const auto pts = siegel::sample_siegel_points(cfg);
  const auto claim = siegel::check_siegel_claim(pts, cfg.params);
  std::vector<Rational> ray;
  for (long t = 1; t <= 20; ++t) ray.push_back(make_rational(t, 2));
  const bool decreasing = siegel::torus_ray_strictly_decreasing(ray);
  const auto cmp = siegel::height_comparison(pts, cfg.fit, cfg.seed);
  const double t = seconds_since(t0);
  std::ostringstream s;
  s << pts.size() << " points, C=" << to_string(claim.c_measured) << ", fit b=" << cmp.fit.b
    << " violations=" << cmp.fit.violations;
  const bool ok = pts.size() >= 10000 && claim.pass && claim.all_positive && decreasing && cmp.fit.violations == 0 &&
                  cmp.fit.b <= 2 && t < 120;
  return {ok, s.str()};
}

}  // namespace

int main() {
  report(1, "exp/log roundtrip", exp_log_roundtrip);
  const auto samples = log_samples();
  report(2, "log norm bounds", [&] { return log_bounds(samples); });
  report(3, "chi necessity", [&] { return chi_necessity(samples); });
  report(4, "lemma of the exponentials", cyclic_lemma);
  report(5, "unipotent local bound", unipotent_local);
  report(6, "global bound", global_bound);
  report(7, "Minkowski", minkowski);
  report(8, "Gm heights", gm_heights_check);
  report(9, "height invariance", invariance);
  report(10, "Siegel claims", siegel_claims);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

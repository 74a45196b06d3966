#include "heightlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "heightlab/lattice_heights.hpp"
#include "heightlab/orbit_index.hpp"
#include "heightlab/padic.hpp"
#include "heightlab/siegel.hpp"

namespace heightlab::experiments {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct SuiteInfo {
  Suite suite;
  const char* name;
  const char* anchor;
};

constexpr SuiteInfo kSuites[] = {
    {Suite::ExpLog, "exp-log", "log(exp(X)) = X and the norm bound for log(1+Y) on p-adic matrices"},
    {Suite::CyclicIndex, "cyclic-index", "lemma of the exponentials: [exp(X)^Z : exp(X)^Z cap GL_d(Z_p)] >= H_p(X)/d"},
    {Suite::LocalBound, "local-bound", "local orbit-index bounds for exp(2p m), nilpotent and torus cases"},
    {Suite::GlobalBound, "global-bound", "global orbit-index bound H_f(dphi) / c^omega(H_f(dphi))"},
    {Suite::Minkowski, "minkowski", "Minkowski: C(N) = |GL(N, Z/3)| and torsion-free level-3 kernel"},
    {Suite::GmHeights, "gm-heights", "H_R(t) <= H_f(t) on G_m"},
    {Suite::Invariance, "invariance", "H_f(k o Phi o u) = H_f(Phi) for integral automorphisms k, u"},
    {Suite::SiegelClaim, "siegel-claim", "0 < p(g) <= C chi(alpha)^-2 on a Siegel set"},
    {Suite::SiegelCompare, "siegel-compare", "H_R polynomially dominated by H_f on a Siegel set"},
};

const SuiteInfo& info(Suite s) {
  for (const auto& i : kSuites)
    if (i.suite == s) return i;
  throw std::logic_error("unknown suite");
}

json int_json(const Integer& n) {
  if (n.fits_slong_p()) return n.get_si();
  return to_string(n);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
  return std::mt19937_64(seq);
}

Rational pow_p(long p, long e) { return power_of(Integer(p), e); }

// Short "a/b" form of each entry, row-major.
std::string flat(const RationalMatrix& m) {
  std::string s;
  for (const auto& q : m.entries()) {
    if (!s.empty()) s += ' ';
    s += to_string(q);
  }
  return s;
}

void merge_status(Status& into, Status s) {
  if (s == Status::Error || into == Status::Error) into = Status::Error;
  else if (s == Status::Inconclusive) into = Status::Inconclusive;
}

// ---------------------------------------------------------------- exp-log

Report run_exp_log(const ExperimentConfig& cfg) {
  const std::vector<long> primes = cfg.p ? std::vector<long>{*cfg.p} : std::vector<long>{2, 3, 5, 7, 13};
  const std::vector<long> dims = cfg.d ? std::vector<long>{*cfg.d} : std::vector<long>{1, 2, 3};
  const std::size_t n = cfg.samples.value_or(100);
  struct Outcome {
    bool roundtrip = false;
    bool log_bound = false;
    bool chi = false;
    std::string error;
  };
  std::vector<Outcome> results(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = sample_rng(cfg.seed, i);
    const long p = primes[i % primes.size()];
    const long d = dims[(i / primes.size()) % dims.size()];
    Outcome& o = results[i];
    try {
      const RationalMatrix x = random_exp_convergent(rng, p, d);
      o.roundtrip = padic::log_exp_roundtrip(x, p, cfg.precision);
      const RationalMatrix y = random_log_admissible(rng, p, d);
      const padic::PadicMatrix l = padic::log_matrix(y, p, cfg.precision);
      Rational h_pow = 1;
      for (long k = 0; k + 1 < d; ++k) h_pow *= local_height(y, p);
      const Rational norm = l.norm();
      o.log_bound = norm <= d * h_pow && (p <= d || norm <= h_pow);
      o.chi = padic::check_log_chi_necessity(y, p);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });
  Report r;
  long rt = 0, lb = 0, chi = 0;
  json failed = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = results[i];
    if (!o.roundtrip) ++rt;
    if (!o.log_bound) ++lb;
    if (!o.chi) ++chi;
    if (!o.roundtrip || !o.log_bound || !o.chi) {
      json f = {{"id", i}};
      if (!o.error.empty()) f["error"] = o.error;
      failed.push_back(f);
    }
  }
  r.body = {{"samples", n},       {"precision", cfg.precision}, {"primes", primes},
            {"dims", dims},       {"roundtrip_failures", rt},   {"log_bound_failures", lb},
            {"chi_failures", chi}, {"failed", failed}};
  r.status = (rt || lb || chi) ? Status::Error : Status::Pass;
  return r;
}

// ----------------------------------------------------------- cyclic-index

Report run_cyclic(const ExperimentConfig& cfg) {
  const std::vector<long> primes = cfg.p ? std::vector<long>{*cfg.p} : std::vector<long>{2, 3, 5, 7};
  const long d = cfg.d.value_or(2);
  if (d < 2) throw std::invalid_argument("cyclic-index needs d >= 2");
  Report r;
  json records = json::array();
  for (long p : primes) {
    for (long k = 1; k <= 6; ++k) {
      RationalMatrix x(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
      x(0, static_cast<std::size_t>(d - 1)) = pow_p(p, -k);
      const orbit::OrbitReport rep = orbit::cyclic_exp_index(x, p, cfg.cap);
      const Rational h = local_height(x, p);
      const Rational bound = p > d ? h : h / d;
      json rec = {{"p", p}, {"k", k}, {"H_p", to_string(h)}, {"bound", to_string(bound)}};
      if (rep.terminated) {
        const Rational slack = Rational(rep.index) / bound;
        rec["index"] = int_json(rep.index);
        rec["slack"] = to_string(slack);
        rec["pass"] = slack >= 1;
        if (slack < 1) merge_status(r.status, Status::Error);
      } else {
        rec["at_least"] = rep.cap;
        rec["pass"] = nullptr;
        merge_status(r.status, Status::Inconclusive);
      }
      records.push_back(rec);
    }
  }
  r.body = {{"d", d}, {"cap", cfg.cap}, {"records", records}};
  return r;
}

// ------------------------------------------------------------ local-bound

json local_record(const orbit::LocalSetup& s, const orbit::LocalBoundResult& res) {
  json rec = {{"case", orbit::to_string(s.kind)},
              {"p", int_json(s.p)},
              {"conjugator", flat(s.conjugator)},
              {"H_p", int_json(res.height)},
              {"bound", to_string(res.bound)},
              {"verdict", orbit::to_string(res.verdict)}};
  if (res.report.terminated) rec["index"] = int_json(res.report.index);
  else rec["at_least"] = res.report.cap;
  if (res.report.precision_used) rec["precision_used"] = res.report.precision_used;
  if (res.slack) rec["slack"] = to_string(*res.slack);
  if (res.quotient) rec["quotient"] = to_string(*res.quotient);
  if (res.measured_c2) rec["c2_required"] = to_string(*res.measured_c2);
  rec["pass"] = res.verdict == orbit::Verdict::Pass;
  return rec;
}

Status verdict_status(orbit::Verdict v) {
  switch (v) {
    case orbit::Verdict::Pass: return Status::Pass;
    case orbit::Verdict::Fail: return Status::Error;
    case orbit::Verdict::Inconclusive: return Status::Inconclusive;
  }
  return Status::Error;
}

orbit::LocalSetup make_setup(orbit::LocalCase kind, long p, RationalMatrix g, std::vector<RationalMatrix> basis,
                             std::uint64_t cap) {
  orbit::LocalSetup s;
  s.kind = kind;
  s.p = p;
  s.conjugator = std::move(g);
  s.lie_basis = std::move(basis);
  s.cap = cap;
  return s;
}

Report run_local(const ExperimentConfig& cfg) {
  Report r;
  json records = json::array();
  if (!cfg.descriptor.empty()) {
    orbit::LocalSetup s = orbit::parse_descriptor(cfg.descriptor);
    if (cfg.p) s.p = *cfg.p;
    const auto res = orbit::verify_local_bound(s);
    records.push_back(local_record(s, res));
    merge_status(r.status, verdict_status(res.verdict));
    r.body = {{"records", records}};
    return r;
  }
  const std::vector<long> primes = cfg.p ? std::vector<long>{*cfg.p} : std::vector<long>{3, 5, 7};
  const RationalMatrix e12 = RationalMatrix::unit(2, 0, 1);
  std::vector<orbit::LocalSetup> setups;
  for (long p : primes)
    for (long m = -6; m <= -1; ++m)
      setups.push_back(make_setup(orbit::LocalCase::Nilpotent, p, RationalMatrix::diagonal({pow_p(p, m), 1}), {e12}, cfg.cap));
  for (long p : primes)
    for (long m = -3; m <= -1; ++m)
      setups.push_back(make_setup(orbit::LocalCase::Exp2p, p, RationalMatrix::diagonal({pow_p(p, m), 1}), {e12}, cfg.cap));
  std::vector<orbit::LocalSetup> torus;
  for (long p : primes)
    for (long k = 1; k <= 2; ++k)
      torus.push_back(make_setup(orbit::LocalCase::Torus, p, RationalMatrix{{1, pow_p(p, -k)}, {0, 1}}, {}, cfg.cap));

  std::vector<json> out(setups.size());
  std::vector<Status> st(setups.size(), Status::Pass);
  parallel_for(setups.size(), [&](std::size_t i) {
    const auto res = orbit::verify_local_bound(setups[i]);
    out[i] = local_record(setups[i], res);
    st[i] = verdict_status(res.verdict);
  });
  for (std::size_t i = 0; i < setups.size(); ++i) {
    records.push_back(out[i]);
    merge_status(r.status, st[i]);
  }
  // The torus constant is not explicit; measure it on the family first.
  json torus_json = json::array();
  std::optional<Rational> c2;
  try {
    c2 = orbit::measure_torus_constant(torus);
  } catch (const std::runtime_error&) {
    merge_status(r.status, Status::Inconclusive);
  }
  if (c2) {
    for (const auto& s : torus) {
      const auto res = orbit::verify_local_bound(s, *c2);
      torus_json.push_back(local_record(s, res));
      merge_status(r.status, verdict_status(res.verdict));
    }
  }
  r.body = {{"cap", cfg.cap},
            {"records", records},
            {"torus_c2", c2 ? json(to_string(*c2)) : json(nullptr)},
            {"torus_records", torus_json}};
  return r;
}

// ----------------------------------------------------------- global-bound

Report run_global(const ExperimentConfig& cfg) {
  const long d = 2;
  const Rational c = cfg.c.value_or(Rational(2 * lcm_range(d)));
  const RationalMatrix e12 = RationalMatrix::unit(2, 0, 1);
  struct Family {
    const char* name;
    orbit::LocalCase kind;
    RationalMatrix g;
    std::vector<RationalMatrix> basis;
  };
  const std::vector<Family> families = {
      {"unipotent diag(1/12, 1)", orbit::LocalCase::Nilpotent, RationalMatrix::diagonal({make_rational(1, 12), 1}), {e12}},
      {"unipotent diag(1/72, 1)", orbit::LocalCase::Nilpotent, RationalMatrix::diagonal({make_rational(1, 72), 1}), {e12}},
      {"unipotent diag(1/216, 1)", orbit::LocalCase::Nilpotent, RationalMatrix::diagonal({make_rational(1, 216), 1}), {e12}},
      {"torus [[1,1/6],[0,1]]", orbit::LocalCase::Torus, RationalMatrix{{1, make_rational(1, 6)}, {0, 1}}, {}},
      {"torus [[1,1/12],[0,1]]", orbit::LocalCase::Torus, RationalMatrix{{1, make_rational(1, 12)}, {0, 1}}, {}},
      {"torus [[1,1/36],[0,1]]", orbit::LocalCase::Torus, RationalMatrix{{1, make_rational(1, 36)}, {0, 1}}, {}},
      {"borel [[1,1/6],[0,1]]", orbit::LocalCase::Mixed, RationalMatrix{{1, make_rational(1, 6)}, {0, 1}}, {e12}},
  };
  Report r;
  json records = json::array();
  double worst = 1;
  for (const auto& f : families) {
    orbit::GlobalSetup s;
    s.kind = f.kind;
    s.conjugator = f.g;
    s.lie_basis = f.basis;
    s.primes = {2, 3};
    s.cap = cfg.cap;
    s.c = c;
    const auto res = orbit::verify_global_bound(s);
    json per = json::object();
    for (const auto& [q, rep] : res.per_prime) per[to_string(q)] = rep.index_string();
    records.push_back({{"family", f.name},
                       {"H_f", int_json(res.finite_height)},
                       {"omega", res.omega},
                       {"index_product", int_json(res.index_product)},
                       {"per_prime", per},
                       {"bound", to_string(res.bound)},
                       {"c_min", res.measured_c},
                       {"verdict", orbit::to_string(res.verdict)}});
    worst = std::max(worst, res.measured_c);
    merge_status(r.status, verdict_status(res.verdict));
  }
  r.body = {{"c", to_string(c)}, {"d_star", int_json(lcm_range(d))}, {"c_min_max", worst}, {"records", records}};
  return r;
}

// -------------------------------------------------------------- minkowski

Report run_minkowski(const ExperimentConfig& cfg) {
  const long max_n = std::clamp(cfg.minkowski_max_n, 1L, 3L);
  json cs = json::array();
  bool match = true, torsion_free = true;
  for (long n = 1; n <= max_n; ++n) {
    const Integer c = orbit::minkowski_constant(n);
    cs.push_back(int_json(c));
    if (Integer(std::to_string(orbit::count_invertible_mod(n, 3))) != c) match = false;
    if (!orbit::minkowski_torsion_check(n)) torsion_free = false;
  }
  Report r;
  r.body = {{"C", cs}, {"enumeration_match", match}, {"torsion_free", torsion_free}};
  r.status = match && torsion_free ? Status::Pass : Status::Error;
  return r;
}

// ------------------------------------------------------------- gm-heights

Report run_gm(const ExperimentConfig& cfg) {
  const long bound = static_cast<long>(cfg.samples.value_or(1000));
  if (bound < 1) throw std::invalid_argument("gm-heights bound must be positive");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bound), 0), bad(static_cast<std::size_t>(bound), 0);
  parallel_for(static_cast<std::size_t>(bound), [&](std::size_t i) {
    const long m = static_cast<long>(i) + 1;
    for (long n = -bound; n <= bound; ++n) {
      if (n == 0 || std::gcd(n, m) != 1) continue;
      ++counts[i];
      const GmHeights h = gm_heights(make_rational(n, m));
      if (h.real > Rational(h.finite)) ++bad[i];
    }
  });
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  const auto violations = std::accumulate(bad.begin(), bad.end(), std::uint64_t{0});
  Report r;
  r.body = {{"bound", bound}, {"fractions", total}, {"violations", violations}};
  r.status = violations == 0 ? Status::Pass : Status::Error;
  return r;
}

// ------------------------------------------------------------- invariance

Report run_invariance(const ExperimentConfig& cfg) {
  const long d = cfg.d.value_or(2);
  const std::size_t homs = cfg.samples.value_or(200);
  const std::size_t pairs = 50;
  std::vector<std::uint64_t> bad(homs, 0);
  parallel_for(homs, [&](std::size_t i) {
    auto rng = sample_rng(cfg.seed, i);
    const std::size_t rows = static_cast<std::size_t>(d * d);
    const std::size_t cols = static_cast<std::size_t>(uniform(rng, 1, d * d));
    RationalMatrix m(rows, cols);
    for (auto r = 0u; r < rows; ++r)
      for (auto c = 0u; c < cols; ++c) m(r, c) = make_rational(uniform(rng, -20, 20), uniform(rng, 1, 36));
    const LatticeHom phi(m);
    const Integer h = hom_height_f(phi);
    for (std::size_t j = 0; j < pairs; ++j) {
      const auto k = IntegralAutomorphism::global(random_unimodular(rng, rows));
      const auto u = IntegralAutomorphism::global(random_unimodular(rng, cols));
      if (hom_height_f(compose_with_automorphisms(phi, k, u)) != h) ++bad[i];
    }
  });
  const auto violations = std::accumulate(bad.begin(), bad.end(), std::uint64_t{0});
  Report r;
  r.body = {{"homs", homs}, {"pairs_per_hom", pairs}, {"d", d}, {"violations", violations}};
  r.status = violations == 0 ? Status::Pass : Status::Error;
  return r;
}

// ----------------------------------------------------------------- siegel

siegel::SamplerConfig sampler(const ExperimentConfig& cfg) {
  siegel::SamplerConfig s;
  s.seed = cfg.seed;
  s.n_samples = cfg.samples.value_or(10000);
  return s;
}

Report run_siegel_claim(const ExperimentConfig& cfg) {
  const auto sc = sampler(cfg);
  const auto pts = siegel::sample_siegel_points(sc);
  const auto claim = siegel::check_siegel_claim(pts, sc.params);
  std::vector<Rational> ray;
  for (long t = 1; t <= 10; ++t) ray.emplace_back(t);
  const bool decreasing = siegel::torus_ray_strictly_decreasing(ray);
  Report r;
  r.body = {{"samples", pts.size()},
            {"c_measured", to_string(claim.c_measured)},
            {"min_p", to_string(claim.min_p)},
            {"all_positive", claim.all_positive},
            {"torus_ray_decreasing", decreasing}};
  r.status = claim.pass && decreasing ? Status::Pass : Status::Error;
  return r;
}

Report run_siegel_compare(const ExperimentConfig& cfg) {
  const auto res = siegel::height_comparison_experiment(sampler(cfg));
  Report r;
  r.body = {{"a", res.fit.a},
            {"b", res.fit.b},
            {"c", res.fit.c},
            {"violations", res.fit.violations},
            {"n_samples", res.fit.n_samples},
            {"seed", res.fit.seed}};
  r.csv = siegel::to_csv(res.rows);
  r.status = res.fit.violations == 0 ? Status::Pass : Status::Error;
  return r;
}

}  // namespace

std::string to_string(Suite s) { return info(s).name; }

Suite parse_suite(const std::string& name) {
  for (const auto& i : kSuites)
    if (name == i.name) return i.suite;
  throw std::invalid_argument("unknown suite '" + name + "'");
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> v = [] {
    std::vector<Suite> out;
    for (const auto& i : kSuites) out.push_back(i.suite);
    return out;
  }();
  return v;
}

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Error: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

ExperimentConfig merge_config(ExperimentConfig base, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  auto need_uint = [](const json& v, const std::string& key) {
    if (!v.is_number_unsigned()) throw std::invalid_argument("config '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  };
  auto need_int = [](const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw std::invalid_argument("config '" + key + "' must be an integer");
    return v.get<long>();
  };
  auto need_str = [](const json& v, const std::string& key) {
    if (!v.is_string()) throw std::invalid_argument("config '" + key + "' must be a string");
    return v.get<std::string>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "suite") base.suite = parse_suite(need_str(v, key));
    else if (key == "seed") base.seed = need_uint(v, key);
    else if (key == "cap") base.cap = need_uint(v, key);
    else if (key == "samples") base.samples = need_uint(v, key);
    else if (key == "p") base.p = need_int(v, key);
    else if (key == "d") base.d = need_int(v, key);
    else if (key == "precision") base.precision = need_int(v, key);
    else if (key == "out") base.out = need_str(v, key);
    else if (key == "format") {
      const std::string f = need_str(v, key);
      if (f == "json") base.format = Format::Json;
      else if (f == "csv") base.format = Format::Csv;
      else throw std::invalid_argument("config 'format' must be json or csv");
    } else if (key == "descriptor") base.descriptor = need_str(v, key);
    else if (key == "c") base.c = parse_rational(v.is_string() ? v.get<std::string>() : std::to_string(need_int(v, key)));
    else if (key == "minkowski_max_n") base.minkowski_max_n = need_int(v, key);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return base;
}

Report run(const ExperimentConfig& cfg) {
  if (cfg.cap < 1) throw std::invalid_argument("cap must be at least 1");
  if (cfg.samples && *cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (cfg.precision < 1 || cfg.precision > padic::kMaxPrecision) throw std::invalid_argument("precision out of range");
  if (cfg.p && !is_prime(*cfg.p)) throw std::invalid_argument("p must be prime");
  if (cfg.d && (*cfg.d < 1 || *cfg.d > 4)) throw std::invalid_argument("d must be in [1, 4]");
  if (cfg.format == Format::Csv && cfg.suite != Suite::SiegelCompare) {
    throw std::invalid_argument("CSV output is only produced by siegel-compare");
  }
  Report r;
  switch (cfg.suite) {
    case Suite::ExpLog: r = run_exp_log(cfg); break;
    case Suite::CyclicIndex: r = run_cyclic(cfg); break;
    case Suite::LocalBound: r = run_local(cfg); break;
    case Suite::GlobalBound: r = run_global(cfg); break;
    case Suite::Minkowski: r = run_minkowski(cfg); break;
    case Suite::GmHeights: r = run_gm(cfg); break;
    case Suite::Invariance: r = run_invariance(cfg); break;
    case Suite::SiegelClaim: r = run_siegel_claim(cfg); break;
    case Suite::SiegelCompare: r = run_siegel_compare(cfg); break;
  }
  r.suite = cfg.suite;
  r.anchor = info(cfg.suite).anchor;
  return r;
}

std::string render_json(const Report& report) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["suite"] = to_string(report.suite);
  j["anchor"] = report.anchor;
  j["status"] = status_name(report.status);
  j["body"] = ordered_json::parse(report.body.dump());
  return j.dump(2) + "\n";
}

long uniform(std::mt19937_64& rng, long lo, long hi) {
  if (hi < lo) throw std::invalid_argument("empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

namespace {

// Unipotent P = L * U with entries of denominator at most p.
RationalMatrix random_conjugator(std::mt19937_64& rng, long p, long d) {
  RationalMatrix lower = RationalMatrix::identity(static_cast<std::size_t>(d));
  RationalMatrix upper = lower;
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      if (i == j) continue;
      const Rational v = Rational(uniform(rng, -2, 2)) * pow_p(p, -uniform(rng, 0, 1));
      (i > j ? lower : upper)(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
    }
  return lower * upper;
}

RationalMatrix triangular_core(std::mt19937_64& rng, long p, long d, long k) {
  RationalMatrix u(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (long i = 0; i < d; ++i) {
    u(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = Rational(uniform(rng, -3, 3)) * pow_p(p, k);
    for (long j = i + 1; j < d; ++j)
      u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          Rational(uniform(rng, -4, 4)) * pow_p(p, -uniform(rng, 0, 2));
  }
  return u;
}

}  // namespace

RationalMatrix random_exp_convergent(std::mt19937_64& rng, long p, long d) {
  const long k = d / (p - 1) + 1;
  const RationalMatrix pm = random_conjugator(rng, p, d);
  return pm * triangular_core(rng, p, d, k) * pm.inverse();
}

RationalMatrix random_log_admissible(std::mt19937_64& rng, long p, long d) {
  const RationalMatrix pm = random_conjugator(rng, p, d);
  return pm * triangular_core(rng, p, d, 1) * pm.inverse();
}

RationalMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
  RationalMatrix m = RationalMatrix::identity(n);
  if (n == 1) {
    if (rng() % 2) m(0, 0) = -1;
    return m;
  }
  const long ops = 3 * static_cast<long>(n);
  for (long t = 0; t < ops; ++t) {
    const auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
    auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 2));
    if (j >= i) ++j;
    switch (uniform(rng, 0, 3)) {
      case 0:
        for (std::size_t c = 0; c < n; ++c) std::swap(m(i, c), m(j, c));
        break;
      case 1:
        for (std::size_t c = 0; c < n; ++c) m(i, c) = -m(i, c);
        break;
      default: {
        const Rational f(uniform(rng, -2, 2));
        for (std::size_t c = 0; c < n; ++c) m(i, c) += f * m(j, c);
      }
    }
  }
  return m;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace heightlab::experiments

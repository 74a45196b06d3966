#pragma once

// Batch verification suites with deterministic, seed-driven reports.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "heightlab/exactnum.hpp"
#include "heightlab/matrix.hpp"

namespace heightlab::experiments {

inline constexpr int kSchemaVersion = 1;

enum class Suite {
  ExpLog,
  CyclicIndex,
  LocalBound,
  GlobalBound,
  Minkowski,
  GmHeights,
  Invariance,
  SiegelClaim,
  SiegelCompare,
};

using heightlab::to_string;
std::string to_string(Suite s);
Suite parse_suite(const std::string& name);
const std::vector<Suite>& all_suites();

enum class Format { Json, Csv };

struct ExperimentConfig {
  Suite suite = Suite::Minkowski;
  std::uint64_t seed = 1;
  std::uint64_t cap = 200000;
  std::optional<std::uint64_t> samples;  // per-suite default when empty
  std::optional<long> p;
  std::optional<long> d;
  long precision = 8;
  std::string out;  // empty: standard output
  Format format = Format::Json;
  std::string descriptor;  // local-bound experiment descriptor text
  std::optional<Rational> c;  // global-bound constant
  long minkowski_max_n = 3;
};

/// Overlays the keys present in a JSON object onto base. Unknown keys and
/// ill-typed values throw std::invalid_argument.
ExperimentConfig merge_config(ExperimentConfig base, const nlohmann::json& j);

enum class Status { Pass = 0, Error = 1, Inconclusive = 2 };

struct Report {
  Suite suite = Suite::Minkowski;
  Status status = Status::Pass;
  std::string anchor;
  nlohmann::json body;
  std::string csv;  // scatter data, siegel-compare only
};

Report run(const ExperimentConfig& config);

/// {"schema_version", "suite", "anchor", "status", "body"} with stable key order.
std::string render_json(const Report& report);
std::string status_name(Status s);

// Generators shared with the test programs. All randomness flows from an
// mt19937_64, whose output sequence is fixed by the standard.

/// Uniform integer in [lo, hi].
long uniform(std::mt19937_64& rng, long lo, long hi);

/// X = P U P^-1 with U upper triangular, diagonal in p^k Z where
/// d < k(p - 1), and P with p-power denominators. exp(X) converges.
RationalMatrix random_exp_convergent(std::mt19937_64& rng, long p, long d);

/// Y = P U P^-1 with diagonal of U in pZ, so chi_Y = T^d mod p.
RationalMatrix random_log_admissible(std::mt19937_64& rng, long p, long d);

/// Random product of elementary integer matrices, sign flips and swaps.
RationalMatrix random_unimodular(std::mt19937_64& rng, std::size_t n);

/// Runs fn(i) for i in [0, n) on worker threads; fn writes to slot i only.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace heightlab::experiments

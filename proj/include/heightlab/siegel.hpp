#pragma once

// Siegel sets, the p-map and height comparison on SL_2(Q).
//
// Coordinates come from the Moebius action: g.i = x + iy. The Siegel set
// with parameters (c, t) is |x| <= c, y >= t.

#include <cstdint>
#include <string>
#include <vector>

#include "heightlab/exactnum.hpp"
#include "heightlab/matrix.hpp"

namespace heightlab::siegel {

struct SiegelParams {
  Rational omega_bound = make_rational(1, 2);   // c
  Rational height_floor = make_rational(1, 2);  // t

  /// Throws unless c > 0 and t > 0.
  void validate() const;
};

struct Iwasawa {
  Rational x;
  Rational y;
};

/// Throws unless g is 2x2 with det exactly 1.
void require_sl2(const RationalMatrix& g);

/// x = (ac + bd)/(c^2 + d^2), y = 1/(c^2 + d^2) for g = [[a, b], [c, d]].
Iwasawa iwasawa(const RationalMatrix& g);

bool siegel_member(const RationalMatrix& g, const SiegelParams& params);

struct SiegelPoint {
  RationalMatrix g;
  Rational x;
  Rational y;
  bool member = false;

  static SiegelPoint make(const RationalMatrix& g, const SiegelParams& params);
};

/// Quadratic form on Q^n given by a symmetric Gram matrix.
class QuadraticForm {
 public:
  explicit QuadraticForm(RationalMatrix gram);
  static QuadraticForm sum_of_squares(std::size_t n);
  /// (1/|Z|) sum_z z^T G z: invariant under the finite group Z.
  static QuadraticForm averaged(const QuadraticForm& base, const std::vector<RationalMatrix>& group);

  const RationalMatrix& gram() const { return gram_; }
  Rational operator()(const std::vector<Rational>& w) const;
  /// Value on the row-major coordinates of a square matrix.
  Rational on_matrix(const RationalMatrix& m) const;

  /// Sylvester's criterion: every leading principal minor is positive.
  bool is_positive_definite() const;
  bool is_invariant_under(const RationalMatrix& z) const;

 private:
  RationalMatrix gram_;
};

/// X -> g X g^-1 on row-major coordinates of M_n, as an n^2 x n^2 matrix.
RationalMatrix adjoint_matrix(const RationalMatrix& g);

/// All products of the generators; throws once more than max_order elements
/// appear (the group is then not finite or too large).
std::vector<RationalMatrix> finite_group_closure(const std::vector<RationalMatrix>& generators,
                                                 std::size_t max_order = 1024);

/// Q(g^-1 E_12 g) with Q the sum of squares of the four coordinates.
Rational p_map(const RationalMatrix& g);
Rational p_map(const RationalMatrix& g, const QuadraticForm& q);

struct ClaimResult {
  Rational c_measured = 0;  // max over samples of p(g) * y^2
  Rational min_p = 0;
  bool all_positive = true;
  bool pass = false;
};

/// Verifies 0 < p(g) <= C * chi^-2 with chi = y on member samples; C is the
/// least constant over the sample. Passes when every value is positive and,
/// if given, C_measured <= c_limit. Throws on a non-member sample.
ClaimResult check_siegel_claim(const std::vector<RationalMatrix>& samples, const SiegelParams& params,
                               std::optional<Rational> c_limit = std::nullopt);

/// p_map along diag(t, 1/t) is strictly decreasing for increasing t > 0.
bool torus_ray_strictly_decreasing(const std::vector<Rational>& ts);

struct Heights {
  Rational real;   // max(1, |entries|)
  Integer finite;  // lcm of entry denominators
};
Heights matrix_heights(const RationalMatrix& g);

struct DominationFit {
  double a = 0;
  double b = 0;
  double c = 0;
  std::uint64_t violations = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct FitOptions {
  Rational c = 0;
  Rational a_max = 1;
  int grid_denominator = 8;  // b ranges over k / grid_denominator
  double b_max = 4;
};

/// Least grid b admitting a <= a_max with H_R <= c + a H_f^b on every sample.
/// Inequalities are checked exactly; when no grid b works the fit reports
/// b_max and its violation count.
DominationFit fit_domination(const std::vector<std::pair<Rational, Integer>>& samples, const FitOptions& opts);

struct SamplerConfig {
  std::uint64_t seed = 1;
  std::uint64_t n_samples = 1000;
  SiegelParams params;
  Integer hf_ceiling = 1000000;
  long max_denominator = 40;
  long max_rotation = 12;
  FitOptions fit;
};

/// Deterministic n(x) a(t) k samples with |x| <= c, t^2 >= t0 and H_f below
/// the ceiling. k is a rational rotation from a Pythagorean triple.
std::vector<RationalMatrix> sample_siegel_points(const SamplerConfig& config);

struct SampleRow {
  Rational x;
  Rational y;
  Rational hr;
  Integer hf;
  Rational p;
};

struct ComparisonResult {
  DominationFit fit;
  std::vector<SampleRow> rows;
};

ComparisonResult height_comparison(const std::vector<RationalMatrix>& samples, const FitOptions& opts,
                                   std::uint64_t seed);
ComparisonResult height_comparison_experiment(const SamplerConfig& config);

/// "x,y,HR_num,HR_den,Hf,p_map_num,p_map_den" header plus one line per row.
std::string to_csv(const std::vector<SampleRow>& rows);

}  // namespace heightlab::siegel

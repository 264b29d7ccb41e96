#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probmorph/kernels.hpp"
#include "probmorph/learning.hpp"
#include "probmorph/morphisms.hpp"
#include "probmorph/spaces.hpp"

namespace probmorph {

/// Failure probability 2 exp(-m eps^2 / (4 C_K^2)) of the deviation
/// |R_mu(h) - R_S(h)| > eps for one hypothesis, clamped to [0, 1].
double hoeffding_bound(std::size_t m, double eps, double c_k);

/// Two-sided Hoeffding for a statistic with values in an interval of the
/// given length: 2 exp(-2 m eps^2 / range^2), clamped to [0, 1].
double hoeffding_range_bound(std::size_t m, double eps, double range);

/// Failure probability 4 N exp(-m eps^2 / (4 C_K^2)) of the uniform
/// deviation over a class with an (eps / 8 C_K)-cover of size N.
double covering_bound(std::size_t n_cover, std::size_t m, double eps, double c_k);

/// sup_x mmd(f(x), g(x)) in the target Gram norm.
double sup_distance(const MarkovKernel& f, const MarkovKernel& g, const GramMatrix& g_y);

/// Size of a greedy cover of a finite class by balls centred at members,
/// scanning members in order; the smallest such cover over radii t <= s.
/// Never below the minimal cover and nonincreasing in s.
std::size_t covering_number(const HypothesisClass& cls, double s, const GramMatrix& g_y);

/// Minimal cover by exhaustive search; classes of at most 12 members.
std::size_t covering_number_exact(const HypothesisClass& cls, double s, const GramMatrix& g_y);

/// Radius 2 sqrt(k_diag_mean / n) + sqrt(2 ln(1/delta) / n) that the MMD
/// between an n-sample empirical measure and its source exceeds with
/// probability at most delta, for kernels with sup K(y, y) <= 1.
double mmd_concentration_bound(std::size_t n, double delta, double k_diag_mean);

struct DeviationCheck {
  double lhs = 0.0;  // |(R_mu(f) - R_S(f)) - (R_mu(g) - R_S(g))|
  double rhs = 0.0;  // 8 C_K sup_x mmd(f(x), g(x))
  bool holds = false;
};

DeviationCheck lipschitz_deviation_check(const MarkovKernel& f, const MarkovKernel& g, const ProbMeasure& mu,
                                         const Dataset& data, double c_k, const GramMatrix& g_y);

/// 95% Wilson score interval of a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct BoundReport {
  std::string bound_name;
  std::map<std::string, double> parameters;
  double theoretical_bound = 0.0;
  double empirical_failure_rate = 0.0;
  std::size_t failures = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  /// Harness-specific checks, e.g. the count of per-trial implication failures.
  std::map<std::string, double> diagnostics;
};

/// Inputs of a Monte Carlo run. Which fields matter depends on the bound:
///
///   hoeffding          joint ground truth, g_y, hypotheses[0], eps
///   covering           joint ground truth, g_y, all hypotheses, eps, c_m
///   mmd_concentration  ground truth on Y, g_y, delta
struct MonteCarloSetup {
  std::string bound_name;
  ProbMeasure ground_truth;
  GramMatrix g_y;
  std::vector<MarkovKernel> hypotheses;
  std::size_t n = 100;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double eps = 0.1;
  double delta = 0.05;
  double c_m = 0.0;
};

/// Draws `trials` i.i.d. samples of size n from the ground truth and counts
/// how often the bound's failure event happens. Deterministic given the seed.
BoundReport monte_carlo_verify(const MonteCarloSetup& setup);

/// Names accepted by monte_carlo_verify.
const std::vector<std::string>& known_bounds();

}  // namespace probmorph

#include "probmorph/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>

#include "detail.hpp"
#include "probmorph/errors.hpp"
#include "probmorph/losses.hpp"
#include "probmorph/tolerances.hpp"

namespace probmorph {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || std::isnan(v)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

double hoeffding_bound(std::size_t m, double eps, double c_k) {
  if (m == 0) throw DomainError("sample size must be >= 1");
  require_positive(eps, "eps");
  require_positive(c_k, "C_K");
  const double md = static_cast<double>(m);
  return clamp01(2.0 * std::exp(-md * eps * eps / (4.0 * c_k * c_k)));
}

double hoeffding_range_bound(std::size_t m, double eps, double range) {
  if (m == 0) throw DomainError("sample size must be >= 1");
  require_positive(eps, "eps");
  require_positive(range, "range");
  const double md = static_cast<double>(m);
  return clamp01(2.0 * std::exp(-2.0 * md * eps * eps / (range * range)));
}

double covering_bound(std::size_t n_cover, std::size_t m, double eps, double c_k) {
  if (n_cover == 0) throw DomainError("covering number must be >= 1");
  if (m == 0) throw DomainError("sample size must be >= 1");
  require_positive(eps, "eps");
  require_positive(c_k, "C_K");
  const double md = static_cast<double>(m);
  return clamp01(4.0 * static_cast<double>(n_cover) * std::exp(-md * eps * eps / (4.0 * c_k * c_k)));
}

double sup_distance(const MarkovKernel& f, const MarkovKernel& g, const GramMatrix& g_y) {
  require_same_space(f.source(), g.source(), "sup distance");
  double best = 0.0;
  for (std::size_t x = 0; x < f.source().size(); ++x) {
    best = std::max(best, mmd(g_y, f.kernel().row(x), g.kernel().row(x)));
  }
  return best;
}

namespace {

std::vector<std::vector<double>> distance_table(const HypothesisClass& cls, double s, const GramMatrix& g_y) {
  if (cls.kind() != HypothesisKind::Finite) throw DomainError("covering numbers are computed for finite classes");
  require_positive(s, "covering radius");
  const auto& h = cls.members();
  std::vector<std::vector<double>> d(h.size(), std::vector<double>(h.size(), 0.0));
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) d[i][j] = d[j][i] = sup_distance(h[i], h[j], g_y);
  }
  return d;
}

std::size_t greedy_cover(const std::vector<std::vector<double>>& d, double radius) {
  std::vector<bool> covered(d.size(), false);
  std::size_t centres = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (covered[i]) continue;
    ++centres;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d[i][j] <= radius) covered[j] = true;
    }
  }
  return centres;
}

}  // namespace

std::size_t covering_number(const HypothesisClass& cls, double s, const GramMatrix& g_y) {
  // A cover at any radius t <= s is also an s-cover, and the greedy count
  // only changes at pairwise distances, so scanning those keeps the result
  // nonincreasing in s.
  const auto d = distance_table(cls, s, g_y);
  std::size_t best = greedy_cover(d, s);
  best = std::min(best, greedy_cover(d, 0.0));
  for (const auto& row : d) {
    for (double t : row) {
      if (t > 0.0 && t < s) best = std::min(best, greedy_cover(d, t));
    }
  }
  return best;
}

std::size_t covering_number_exact(const HypothesisClass& cls, double s, const GramMatrix& g_y) {
  const auto d = distance_table(cls, s, g_y);
  const std::size_t n = d.size();
  if (n > 12) throw DomainError("exact covering numbers are limited to 12 hypotheses");
  std::vector<unsigned> ball(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i][j] <= s) ball[i] |= 1u << j;
    }
  }
  const unsigned all = (1u << n) - 1u;
  std::size_t best = n;
  for (unsigned subset = 1; subset <= all; ++subset) {
    const auto size = static_cast<std::size_t>(std::popcount(subset));
    if (size >= best) continue;
    unsigned cover = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (subset & (1u << i)) cover |= ball[i];
    }
    if (cover == all) best = size;
  }
  return best;
}

double mmd_concentration_bound(std::size_t n, double delta, double k_diag_mean) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(k_diag_mean >= 0.0)) throw DomainError("mean kernel diagonal must be >= 0");
  const double nd = static_cast<double>(n);
  return 2.0 * std::sqrt(k_diag_mean / nd) + std::sqrt(2.0 * std::log(1.0 / delta) / nd);
}

DeviationCheck lipschitz_deviation_check(const MarkovKernel& f, const MarkovKernel& g, const ProbMeasure& mu,
                                         const Dataset& data, double c_k, const GramMatrix& g_y) {
  const double df = expected_risk(f, mu, g_y).value - empirical_risk(f, data, g_y).value;
  const double dg = expected_risk(g, mu, g_y).value - empirical_risk(g, data, g_y).value;
  DeviationCheck out;
  out.lhs = std::abs(df - dg);
  out.rhs = 8.0 * c_k * sup_distance(f, g, g_y);
  out.holds = out.lhs <= out.rhs + 1e-10;
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw DomainError("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {clamp01(centre - half), clamp01(centre + half)};
}

const std::vector<std::string>& known_bounds() {
  static const std::vector<std::string> names{"hoeffding", "covering", "mmd_concentration"};
  return names;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> draw(std::mt19937_64& rng, const ProbMeasure& mu, std::size_t n) {
  std::discrete_distribution<std::size_t> dist(mu.weights().data(), mu.weights().data() + mu.weights().size());
  std::vector<std::size_t> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

Dataset draw_dataset(std::mt19937_64& rng, const ProbMeasure& joint, std::size_t n) {
  const std::size_t ny = joint.space().right().size();
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t k : draw(rng, joint, n)) samples.push_back({k / ny, k % ny});
  return {joint.space(), std::move(samples)};
}

void require_joint_truth(const MonteCarloSetup& s) {
  if (!s.ground_truth.space().is_product()) throw DomainError(s.bound_name + " harness needs a joint ground truth");
  require_same_space(s.ground_truth.space().right(), s.g_y.points(), s.bound_name + " harness (target Gram)");
  if (s.hypotheses.empty()) throw DomainError(s.bound_name + " harness needs at least one hypothesis");
}

}  // namespace

BoundReport monte_carlo_verify(const MonteCarloSetup& setup) {
  if (setup.trials == 0) throw DomainError("trials must be >= 1");
  if (setup.n == 0) throw DomainError("sample size must be >= 1");

  BoundReport report;
  report.bound_name = setup.bound_name;
  report.trials = setup.trials;
  report.seed = setup.seed;
  report.parameters["n"] = static_cast<double>(setup.n);
  std::vector<char> failed(setup.trials, 0);
  std::vector<char> violated(setup.trials, 0);

  if (setup.bound_name == "hoeffding") {
    require_joint_truth(setup);
    const MarkovKernel& h = setup.hypotheses.front();
    const double ck = c_k(setup.g_y);
    const double risk = expected_risk(h, setup.ground_truth, setup.g_y).value;
    report.parameters["eps"] = setup.eps;
    report.parameters["c_k"] = ck;
    report.parameters["expected_risk"] = risk;
    report.theoretical_bound = hoeffding_bound(setup.n, setup.eps, ck);
    report.diagnostics["hoeffding_range_4ck2"] = hoeffding_range_bound(setup.n, setup.eps, 4.0 * ck * ck);
    detail::parallel_for(setup.trials, [&](std::size_t t) {
      auto rng = detail::stream(setup.seed, t);
      const Dataset data = draw_dataset(rng, setup.ground_truth, setup.n);
      failed[t] = std::abs(empirical_risk(h, data, setup.g_y).value - risk) > setup.eps;
    });
  } else if (setup.bound_name == "covering") {
    require_joint_truth(setup);
    const auto cls = HypothesisClass::finite(setup.hypotheses);
    const double ck = c_k(setup.g_y);
    const std::size_t cover = covering_number(cls, setup.eps / (8.0 * ck), setup.g_y);
    std::vector<double> risks;
    for (const auto& h : setup.hypotheses) risks.push_back(expected_risk(h, setup.ground_truth, setup.g_y).value);
    const double best_risk = *std::min_element(risks.begin(), risks.end());
    report.parameters["eps"] = setup.eps;
    report.parameters["c_k"] = ck;
    report.parameters["c_m"] = setup.c_m;
    report.parameters["class_size"] = static_cast<double>(setup.hypotheses.size());
    report.parameters["covering_number"] = static_cast<double>(cover);
    report.theoretical_bound = covering_bound(cover, setup.n, setup.eps, ck);
    LearnerConfig config;
    config.c_schedule = {setup.c_m};
    const auto selector = RiskSelector::kernel_quadratic(setup.g_y);
    detail::parallel_for(setup.trials, [&](std::size_t t) {
      auto rng = detail::stream(setup.seed, t);
      const Dataset data = draw_dataset(rng, setup.ground_truth, setup.n);
      double sup_dev = 0.0;
      for (std::size_t i = 0; i < setup.hypotheses.size(); ++i) {
        sup_dev = std::max(sup_dev, std::abs(empirical_risk(setup.hypotheses[i], data, setup.g_y).value - risks[i]));
      }
      failed[t] = sup_dev > setup.eps;
      const auto fit = cerm(cls, data, selector, config);
      const double excess = risks[fit.selected] - best_risk;
      // Uniform deviation within eps and an ERM gap within c_m force the
      // excess risk below 2 eps + c_m.
      if (!failed[t] && fit.certified_gap <= setup.c_m) {
        violated[t] = excess > 2.0 * setup.eps + setup.c_m + 1e-12;
      }
    });
  } else if (setup.bound_name == "mmd_concentration") {
    require_same_space(setup.ground_truth.space(), setup.g_y.points(), "mmd_concentration harness");
    const double ck = c_k(setup.g_y);
    // The radius assumes sup K(y, y) <= 1.
    const GramMatrix g = ck > 1.0 ? setup.g_y.scaled(1.0 / (ck * ck)) : setup.g_y;
    const double kdm = setup.ground_truth.weights().dot(g.entries().diagonal());
    const double radius = mmd_concentration_bound(setup.n, setup.delta, kdm);
    report.parameters["delta"] = setup.delta;
    report.parameters["k_diag_mean"] = kdm;
    report.parameters["radius"] = radius;
    report.parameters["rescale"] = ck > 1.0 ? 1.0 / (ck * ck) : 1.0;
    report.theoretical_bound = setup.delta;
    detail::parallel_for(setup.trials, [&](std::size_t t) {
      auto rng = detail::stream(setup.seed, t);
      const auto idx = draw(rng, setup.ground_truth, setup.n);
      const auto emp = empirical(setup.ground_truth.space(), std::span<const std::size_t>(idx));
      failed[t] = mmd(g, emp, setup.ground_truth) > radius;
    });
  } else {
    throw DomainError("unknown bound '" + setup.bound_name + "'");
  }

  report.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  report.empirical_failure_rate = static_cast<double>(report.failures) / static_cast<double>(report.trials);
  std::tie(report.wilson_low, report.wilson_high) = wilson_interval(report.failures, report.trials);
  if (setup.bound_name == "covering") {
    report.diagnostics["implication_violations"] =
        static_cast<double>(std::count(violated.begin(), violated.end(), 1));
  }
  return report;
}

}  // namespace probmorph

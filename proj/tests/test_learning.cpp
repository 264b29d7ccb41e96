#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "probmorph/errors.hpp"
#include "probmorph/learning.hpp"
#include "probmorph/losses.hpp"
#include "test_support.hpp"

using namespace probmorph;
using namespace probmorph::testing;

namespace {

Dataset sample_from(Rng& rng, const ProbMeasure& joint, std::size_t n) {
  std::discrete_distribution<std::size_t> d(joint.weights().data(), joint.weights().data() + joint.weights().size());
  const auto ny = joint.space().right().size();
  std::vector<Sample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = d(rng);
    s.push_back({k / ny, k % ny});
  }
  return {joint.space(), s};
}

// Lagrange form of the interpolating polynomial, evaluated directly.
Eigen::VectorXd lagrange(const std::vector<double>& xs, const std::vector<Eigen::VectorXd>& ys, double x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ys.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
    }
    out += w * ys[i];
  }
  return out;
}

double sup_row_mmd(const MarkovKernel& a, const MarkovKernel& b, const GramMatrix& g) {
  double s = 0.0;
  for (std::size_t x = 0; x < a.source().size(); ++x) s = std::max(s, mmd(g, a.row(x), b.row(x)));
  return s;
}

LearnerConfig quick_config(std::uint64_t seed) {
  LearnerConfig c;
  c.restarts = 4;
  c.max_iters = 800;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(GammaSchedule, Examples) {
  EXPECT_EQ(gamma_schedule(1), 1.0);
  EXPECT_EQ(gamma_schedule(4), 0.5);
  EXPECT_DOUBLE_EQ(gamma_schedule(100), 0.1);
  LearnerConfig c;
  EXPECT_EQ(c.gamma_at(4), 0.5);
  c.gamma_schedule = {0.3, 0.2};
  EXPECT_EQ(c.gamma_at(1), 0.3);
  EXPECT_EQ(c.gamma_at(50), 0.2);
}

TEST(LearnerConfig, Validation) {
  LearnerConfig c;
  c.c_schedule = {0.1, 0.2};
  EXPECT_THROW(c.validate(), DomainError);
  c.c_schedule = {0.2, 0.1, 0.0};
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.c_at(2), 0.1);
  EXPECT_EQ(c.c_at(9), 0.0);
  c.gamma_schedule = {0.0};
  EXPECT_THROW(c.validate(), DomainError);
  c = LearnerConfig{};
  c.restarts = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(ProjectToSimplex, IsTheNearestSimplexPoint) {
  Rng rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = uniform_size(rng, 1, 6);
    Eigen::VectorXd v(static_cast<Eigen::Index>(k));
    for (auto& e : v) e = n(rng);
    const auto p = project_to_simplex(v);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    for (int c = 0; c < 20; ++c) {
      EXPECT_LE((v - p).norm(), (v - random_simplex(rng, k, 0.3)).norm() + 1e-12);
    }
  }
  EXPECT_EQ(project_to_simplex(vec({0.2, 0.8})), vec({0.2, 0.8}));
}

TEST(SoftmaxKernel, RowsAreNormalizedExponentials) {
  const auto h = softmax_kernel(labelled(1), labelled(3), mat({{0.0, std::log(2.0), std::log(5.0)}}));
  EXPECT_NEAR(h.rows()(0, 0), 0.125, 1e-15);
  EXPECT_NEAR(h.rows()(0, 2), 0.625, 1e-15);
  const auto big = softmax_kernel(labelled(1), labelled(2), mat({{1000.0, 0.0}}));
  EXPECT_EQ(big.rows()(0, 0), 1.0);
}

TEST(EmpiricalSection, Examples) {
  const FiniteSpace x({"x", "z"});
  const FiniteSpace y({"a", "b"});
  const auto xy = FiniteSpace::product(x, y);
  const auto h = empirical_section(Dataset(xy, {{0, 0}, {0, 0}, {0, 1}}));
  EXPECT_NEAR(h.rows()(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(h.rows()(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(h.rows().row(1), mat({{0.5, 0.5}}).row(0));

  EXPECT_EQ(empirical_section(Dataset(xy, {{0, 1}, {1, 0}})).rows(), mat({{0, 1}, {1, 0}}));

  Rng rng(2);
  const auto s = sample_from(rng, random_prob(rng, FiniteSpace::product(labelled(4, "x"), labelled(3, "y")), 0.3), 25);
  const auto mu = empirical(s);
  EXPECT_LT(max_abs_diff(graph_pushforward(empirical_section(s), marginal(mu, Axis::Left)), mu), 1e-15);
}

TEST(Cerm, FiniteClassPicksLowerEmpiricalRisk) {
  Rng rng(3);
  const auto x = labelled(3, "x");
  const auto y = labelled(3, "y");
  const auto mu = random_prob(rng, FiniteSpace::product(x, y));
  const auto g = gram(KernelSpec::delta(), y);
  const auto cond = disintegrate(mu).conditional;
  const auto u = MarkovKernel::uniform(x, y);
  for (int t = 0; t < 20; ++t) {
    const auto s = sample_from(rng, mu, 60);
    const auto r = cerm(HypothesisClass::finite({cond, u}), s, RiskSelector::kernel_quadratic(g), quick_config(t));
    const double rc = empirical_risk(cond, s, g).value;
    const double ru = empirical_risk(u, s, g).value;
    EXPECT_EQ(r.selected, rc <= ru ? 0u : 1u);
    EXPECT_EQ(r.certified_gap, 0.0);
    EXPECT_DOUBLE_EQ(r.objective, std::min(rc, ru));
  }
  const auto only = cerm(HypothesisClass::finite({u}), sample_from(rng, mu, 5), RiskSelector::kernel_quadratic(g), quick_config(0));
  EXPECT_EQ(only.h.rows(), u.rows());
  EXPECT_EQ(only.certified_gap, 0.0);
}

TEST(Cerm, ParametricRecoversEmpiricalConditionalAtSingleSource) {
  const FiniteSpace x({"x"});
  const auto y = labelled(3, "y");
  const auto xy = FiniteSpace::product(x, y);
  const Dataset s(xy, {{0, 0}, {0, 1}, {0, 1}, {0, 2}, {0, 2}, {0, 2}});
  auto cfg = quick_config(4);
  cfg.warm_start = false;
  const auto r = cerm(HypothesisClass::parametric(x, y), s, RiskSelector::kernel_quadratic(gram(KernelSpec::delta(), y)), cfg);
  const Eigen::VectorXd nu = vec({1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0});
  EXPECT_LT((r.h.rows().row(0).transpose() - nu).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_GE(r.certified_gap, 0.0);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Cerm, LipschitzGridStaysWithinBudget) {
  Rng rng(5);
  const auto x = FiniteSpace::line(std::vector<double>{0.0, 1.0, 2.0});
  const auto y = labelled(2, "y");
  const auto g = gram(KernelSpec::delta(), y);
  // Opposite Dirac rows at neighbouring x: unconstrained fit has Lipschitz constant sqrt(2).
  const Dataset s(FiniteSpace::product(x, y), {{0, 0}, {1, 1}, {2, 0}});
  const auto cls = HypothesisClass::lipschitz_grid(x, y, 0.5, g);
  const auto r = cerm(cls, s, RiskSelector::kernel_quadratic(g), quick_config(5));
  EXPECT_LE(lipschitz_constant(r.h, g), 0.5 + 1e-9);
  EXPECT_TRUE(cls.admits(r.h));
  EXPECT_FALSE(cls.admits(empirical_section(s)));
}

TEST(WFunctional, ConstantKernelSupTerm) {
  const auto x = FiniteSpace::line(std::vector<double>{0.0, 1.0, 3.0});
  const auto y = labelled(3, "y");
  const ProbMeasure nu(y, vec({0.2, 0.3, 0.5}));
  const auto h = MarkovKernel::constant(x, nu);
  WFunctionalSpec spec{true, false, false, gram(KernelSpec::delta(), FiniteSpace::product(x, y)),
                       gram(KernelSpec::delta(), y), std::nullopt};
  // Row norm |nu|_2 and graph row norm |delta_x (x) nu|_2 = |nu|_2.
  const double s = nu.weights().norm() + nu.weights().norm();
  EXPECT_NEAR(w_functional(h, spec), s * s, 1e-14);
  spec.include_lipschitz = true;
  const auto terms = w_functional_terms(h, spec);
  EXPECT_EQ(terms.lipschitz, 0.0);
}

TEST(WFunctional, LipschitzTermHalvesWhenCoordsDouble) {
  Rng rng(6);
  const auto y = random_points(rng, 3, 1, "y");
  const auto g = gram(KernelSpec::gaussian(1.0), y);
  const std::vector<double> pts{0.0, 0.4, 1.1, 2.0, 2.3};
  std::vector<double> pts2;
  for (double p : pts) pts2.push_back(2.0 * p);
  const auto h = random_markov(rng, FiniteSpace::line(pts), y);
  const MarkovKernel h2(FiniteSpace::line(pts2), y, h.rows());
  EXPECT_NEAR(lipschitz_constant(h2, g), 0.5 * lipschitz_constant(h, g), 1e-12);

  // All-pairs oracle.
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) best = std::max(best, mmd(g, h.row(i), h.row(j)) / std::abs(pts[i] - pts[j]));
  }
  EXPECT_NEAR(lipschitz_constant(h, g), best, 1e-12);
}

TEST(WFunctional, DuplicateCoordsWithDifferentRowsIsAnError) {
  const FiniteSpace x({"a", "b"}, {{1.0}, {1.0}});
  const auto y = labelled(2, "y");
  EXPECT_THROW(lipschitz_constant(MarkovKernel::identity(FiniteSpace({"a", "b"}, {{1.0}, {1.0}})), gram(KernelSpec::delta(), x)),
               DomainError);
  EXPECT_NO_THROW(lipschitz_constant(MarkovKernel::uniform(x, y), gram(KernelSpec::delta(), y)));
}

TEST(WFunctional, TermsCombineAsSquaredSumAndOperatorTermMatchesNorm) {
  Rng rng(7);
  const auto x = FiniteSpace::line(std::vector<double>{0.0, 0.5, 1.5, 2.0});
  const auto y = random_points(rng, 3, 1, "y");
  const auto xy = FiniteSpace::product(x, y);
  const auto spec = WFunctionalSpec::defaults(gram(KernelSpec::gaussian(1.0), xy), gram(KernelSpec::gaussian(1.0), y),
                                              gram(KernelSpec::gaussian(1.0), x));
  ASSERT_TRUE(spec.include_operator_norm);
  const auto h = random_markov(rng, x, y);
  const auto t = w_functional_terms(h, spec);
  EXPECT_NEAR(t.value, std::pow(t.sup + t.lipschitz + t.operator_norm, 2), 1e-12);
  EXPECT_NEAR(t.operator_norm, embedded_operator_norm(h, *spec.g_x, spec.g_xy), 1e-12);
  EXPECT_NEAR(t.lipschitz, lipschitz_constant(h, spec.g_y), 1e-12);
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto row = h.row(i);
    const auto graph_row = graph(h).row(i);
    sup = std::max(sup, std::sqrt(embed_inner(spec.g_y, row, row)) + std::sqrt(embed_inner(spec.g_xy, graph_row, graph_row)));
  }
  EXPECT_NEAR(t.sup, sup, 1e-12);
  WFunctionalSpec none = spec;
  none.include_sup = none.include_lipschitz = none.include_operator_norm = false;
  EXPECT_THROW(none.validate(), DomainError);
}

TEST(RegularizedEstimate, RepeatedSampleFitsPointMass) {
  const auto x = FiniteSpace::line(std::vector<double>{0.0});
  const auto y = FiniteSpace::line(std::vector<double>{0.0, 1.0, 2.0});
  const auto xy = FiniteSpace::product(x, y);
  const Dataset s(xy, std::vector<Sample>(10, Sample{0, 2}));
  const auto spec = WFunctionalSpec::defaults(gram(KernelSpec::gaussian(1.0), xy), gram(KernelSpec::gaussian(1.0), y), std::nullopt);
  double previous = 1.0;
  for (double gamma : {1e-2, 1e-3, 1e-4}) {
    const auto est = regularized_estimate(s, gamma, spec, quick_config(8));
    const double err = 1.0 - est.h.rows()(0, 2);
    EXPECT_LE(err, previous + 1e-12);
    previous = err;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(RegularizedEstimate, ObjectiveIsConsistentAndTraceMonotone) {
  Rng rng(9);
  const auto x = FiniteSpace::line(std::vector<double>{0.0, 0.5, 1.0, 1.5});
  const auto y = FiniteSpace::line(std::vector<double>{0.0, 1.0, 2.0});
  const auto xy = FiniteSpace::product(x, y);
  const auto s = sample_from(rng, random_prob(rng, xy), 40);
  const auto spec = WFunctionalSpec::defaults(gram(KernelSpec::gaussian(1.0), xy), gram(KernelSpec::gaussian(1.0), y),
                                              gram(KernelSpec::gaussian(1.0), x));
  const double gamma = 0.1;
  const auto est = regularized_estimate(s, gamma, spec, quick_config(10));
  EXPECT_NEAR(est.objective, regularized_objective(est.h, s, gamma, spec), 1e-10);
  EXPECT_NEAR(est.objective, est.fidelity + gamma * est.penalty, 1e-10);
  EXPECT_LE(est.objective, regularized_objective(empirical_section(s), s, gamma, spec) + est.eps_certificate + 1e-12);
  EXPECT_EQ(est.meets_target, est.eps_certificate <= gamma * gamma);
  EXPECT_EQ(est.restart_objectives.size(), 4u);
  ASSERT_FALSE(est.trace.empty());
  for (std::size_t i = 1; i < est.trace.size(); ++i) EXPECT_LE(est.trace[i], est.trace[i - 1]);
  EXPECT_THROW(regularized_estimate(s, 0.0, spec, quick_config(10)), DomainError);
}

TEST(RegularizedEstimate, SmallGammaApproachesEmpiricalConditional) {
  Rng rng(11);
  const auto x = FiniteSpace::line(std::vector<double>{0.0, 1.0, 2.0});
  const auto y = FiniteSpace::line(std::vector<double>{0.0, 1.0});
  const auto xy = FiniteSpace::product(x, y);
  const auto s = sample_from(rng, ProbMeasure(xy, vec({0.2, 0.1, 0.1, 0.2, 0.25, 0.15})), 60);
  const auto spec = WFunctionalSpec::defaults(gram(KernelSpec::gaussian(1.0), xy), gram(KernelSpec::gaussian(1.0), y), std::nullopt);
  const auto g = gram(KernelSpec::gaussian(1.0), y);
  const auto section = empirical_section(s);
  const double coarse = sup_row_mmd(regularized_estimate(s, 1e-1, spec, quick_config(12)).h, section, g);
  const double fine = sup_row_mmd(regularized_estimate(s, 1e-4, spec, quick_config(12)).h, section, g);
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 0.02);
}

TEST(NewtonInterpolant, Examples) {
  const auto y = labelled(2, "y");
  const std::vector<std::pair<double, ProbMeasure>> two{{0.0, dirac(y, 0)}, {1.0, dirac(y, 1)}};
  const auto f = newton_interpolant(two);
  EXPECT_EQ(f(0.5).weights(), vec({0.5, 0.5}));

  const ProbMeasure nu(y, vec({0.3, 0.7}));
  const std::vector<std::pair<double, ProbMeasure>> one{{2.0, nu}};
  EXPECT_EQ(newton_interpolant(one)(-7.0).weights(), nu.weights());

  const std::vector<std::pair<double, ProbMeasure>> same{{0.0, nu}, {1.0, nu}, {3.0, nu}};
  const auto c = newton_interpolant(same);
  EXPECT_EQ(c.coefficients().bottomRows(2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_LT((c(10.0).weights() - nu.weights()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NewtonInterpolant, Errors) {
  const auto y = labelled(2, "y");
  const std::vector<std::pair<double, ProbMeasure>> dup{{0.0, dirac(y, 0)}, {0.0, dirac(y, 1)}};
  EXPECT_THROW(newton_interpolant(dup), DomainError);
  std::vector<std::pair<double, ProbMeasure>> many;
  for (int i = 0; i < 13; ++i) many.emplace_back(i, dirac(y, 0));
  try {
    newton_interpolant(many);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("split"), std::string::npos);
  }
}

TEST(NewtonInterpolant, MatchesLagrangeFormAndSumsToOne) {
  Rng rng(13);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const auto y = labelled(uniform_size(rng, 1, 5), "y");
    const std::size_t k = uniform_size(rng, 1, 8);
    std::vector<double> xs;
    while (xs.size() < k) {
      const double c = ux(rng);
      if (std::all_of(xs.begin(), xs.end(), [&](double v) { return std::abs(v - c) > 0.05; })) xs.push_back(c);
    }
    std::vector<std::pair<double, ProbMeasure>> nodes;
    std::vector<Eigen::VectorXd> ys;
    for (double v : xs) {
      nodes.emplace_back(v, random_prob(rng, y, 0.3));
      ys.push_back(nodes.back().second.weights());
    }
    const auto f = newton_interpolant(nodes);
    for (std::size_t i = 0; i < k; ++i) EXPECT_LT((f(xs[i]).weights() - ys[i]).cwiseAbs().maxCoeff(), 1e-8);
    for (int q = 0; q < 20; ++q) {
      const double at = ux(rng);
      const auto v = f(at).weights();
      const auto oracle = lagrange(xs, ys, at);
      EXPECT_LT((v - oracle).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
      EXPECT_NEAR(v.sum(), 1.0, 1e-10);
      EXPECT_NEAR(f.projected(at).weights().sum(), 1.0, 1e-12);
    }
  }
}

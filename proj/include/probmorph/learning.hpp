#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "probmorph/kernels.hpp"
#include "probmorph/morphisms.hpp"
#include "probmorph/spaces.hpp"

namespace probmorph {

/// Row-wise normalized exponential of a logit matrix.
MarkovKernel softmax_kernel(const FiniteSpace& source, const FiniteSpace& target, const Eigen::MatrixXd& logits);

/// Euclidean projection of a vector onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

enum class HypothesisKind { Finite, Parametric, LipschitzGrid };

/// Set of candidate Markov kernels X ~> Y.
///
/// Finite holds an explicit list. Parametric is every kernel whose rows are
/// normalized exponentials of free logits. LipschitzGrid is the parametric
/// family restricted to kernels whose Lipschitz constant, measured in the
/// target Gram norm against Euclidean distance of source coordinates, stays
/// within a budget.
class HypothesisClass {
 public:
  static HypothesisClass finite(std::vector<MarkovKernel> members);
  static HypothesisClass parametric(FiniteSpace source, FiniteSpace target);
  static HypothesisClass lipschitz_grid(FiniteSpace source, FiniteSpace target, double budget, GramMatrix g_y);

  HypothesisKind kind() const noexcept { return kind_; }
  const FiniteSpace& source() const noexcept { return source_; }
  const FiniteSpace& target() const noexcept { return target_; }
  const std::vector<MarkovKernel>& members() const noexcept { return members_; }
  double lipschitz_budget() const noexcept { return budget_; }

  MarkovKernel realize(const Eigen::MatrixXd& logits) const;
  /// Whether h satisfies the class constraint (always true for Parametric).
  bool admits(const MarkovKernel& h) const;

 private:
  HypothesisClass(HypothesisKind kind, FiniteSpace source, FiniteSpace target)
      : kind_(kind), source_(std::move(source)), target_(std::move(target)) {}

  HypothesisKind kind_;
  FiniteSpace source_;
  FiniteSpace target_;
  std::vector<MarkovKernel> members_;
  double budget_ = 0.0;
  std::optional<GramMatrix> g_y_;
};

struct LearnerConfig {
  /// Tolerated empirical-risk gap c_n at sample size n = index + 1; the last
  /// entry extends to larger n; empty means zero.
  std::vector<double> c_schedule;
  /// gamma_n at sample size n = index + 1; empty selects n^{-1/2}.
  std::vector<double> gamma_schedule;
  int restarts = 8;
  int max_iters = 2000;
  double step_size = 1.0;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  /// Use the empirical conditional as the starting point of restart 0.
  bool warm_start = true;

  void validate() const;
  double c_at(std::size_t n) const;
  double gamma_at(std::size_t n) const;
};

/// Default regularization weight, n^{-1/2}.
double gamma_schedule(std::size_t n);

enum class EmpiricalLoss {
  /// Mean of |M_K(h(x)) - K_y|^2 over the sample, Gram matrix on Y.
  KernelQuadratic,
  /// |(Gamma_h)_* mu_{S,X} - mu_S|^2, Gram matrix on X x Y.
  JointMmdSquared,
};

struct RiskSelector {
  EmpiricalLoss loss;
  GramMatrix gram;

  static RiskSelector kernel_quadratic(GramMatrix g_y) { return {EmpiricalLoss::KernelQuadratic, std::move(g_y)}; }
  static RiskSelector joint_mmd_squared(GramMatrix g_xy) { return {EmpiricalLoss::JointMmdSquared, std::move(g_xy)}; }
};

/// Empirical objective of a selector evaluated at h.
double empirical_objective(const MarkovKernel& h, const Dataset& data, const RiskSelector& risk);

struct CermResult {
  MarkovKernel h;
  /// Estimated R_S(h) - inf over the class. Exact (0) for finite classes;
  /// for parametric classes measured against a coarse random-lattice probe.
  double certified_gap = 0.0;
  double objective = 0.0;
  /// Index of the chosen member (finite) or winning restart (parametric).
  std::size_t selected = 0;
  std::vector<double> trace;
};

CermResult cerm(const HypothesisClass& cls, const Dataset& data, const RiskSelector& risk, const LearnerConfig& config);

/// Which terms of the regularizer W(f) = (sup + Lipschitz + operator)^2 are on.
struct WFunctionalSpec {
  bool include_sup = true;
  bool include_lipschitz = true;
  bool include_operator_norm = false;
  GramMatrix g_xy;                 // K1 on X x Y
  GramMatrix g_y;                  // K2 on Y
  std::optional<GramMatrix> g_x;   // K3 on X, needed for the operator term

  /// Sup and Lipschitz on; the operator term on when |X| <= 32 and g_x given.
  static WFunctionalSpec defaults(GramMatrix g_xy, GramMatrix g_y, std::optional<GramMatrix> g_x);
  void validate() const;
};

struct WTerms {
  double sup = 0.0;
  double lipschitz = 0.0;
  double operator_norm = 0.0;
  double value = 0.0;
};

WTerms w_functional_terms(const MarkovKernel& h, const WFunctionalSpec& spec);
double w_functional(const MarkovKernel& h, const WFunctionalSpec& spec);

/// Lipschitz constant of x -> h(x) from Euclidean source distance to the
/// target Gram norm. Above 256 source points only nearest-neighbour pairs are
/// scanned, which gives a lower bound.
double lipschitz_constant(const MarkovKernel& h, const GramMatrix& g_y);

struct RegularizedEstimate {
  MarkovKernel h;
  double objective = 0.0;
  double fidelity = 0.0;  // mmd_correct_loss^2 against the empirical joint
  double penalty = 0.0;   // W(h)
  double eps_certificate = 0.0;
  double eps_target = 0.0;  // gamma^2
  bool meets_target = false;
  std::vector<double> trace;
  std::vector<double> restart_objectives;
};

/// Minimize |(Gamma_h)_* mu_{S,X} - mu_S|^2_{K1} + gamma * W(h) over the
/// parametric class on the full grids.
RegularizedEstimate regularized_estimate(const Dataset& data, double gamma, const WFunctionalSpec& spec,
                                         const LearnerConfig& config);

/// Regularized objective at an arbitrary kernel.
double regularized_objective(const MarkovKernel& h, const Dataset& data, double gamma, const WFunctionalSpec& spec);

/// Rows at observed x are the empirical conditional, other rows uniform.
MarkovKernel empirical_section(const Dataset& data);

/// Componentwise Newton divided-difference polynomial through probability
/// vectors placed at real abscissas.
class NewtonInterpolant {
 public:
  static constexpr std::size_t kMaxNodes = 12;

  NewtonInterpolant(std::vector<double> nodes, std::vector<ProbMeasure> values);

  const FiniteSpace& target() const noexcept { return target_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  /// Row k holds the order-k divided differences of every component.
  const Eigen::MatrixXd& coefficients() const noexcept { return coef_; }

  /// Raw polynomial value; components sum to one, entries may be negative.
  SignedMeasure operator()(double x) const;
  /// Raw value projected onto the simplex.
  ProbMeasure projected(double x) const;

 private:
  FiniteSpace target_;
  std::vector<double> nodes_;
  Eigen::MatrixXd coef_;
};

NewtonInterpolant newton_interpolant(std::span<const std::pair<double, ProbMeasure>> nodes);

}  // namespace probmorph

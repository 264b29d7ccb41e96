#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "probmorph/kernels.hpp"
#include "probmorph/spaces.hpp"

namespace probmorph {

/// Bounded signed kernel X ~> Y: one signed measure over the target per
/// source point, stored as a |X| x |Y| matrix whose row x is T(x).
class SignedKernel {
 public:
  SignedKernel(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd rows);
  static SignedKernel zero(const FiniteSpace& source, const FiniteSpace& target);

  const FiniteSpace& source() const noexcept { return source_; }
  const FiniteSpace& target() const noexcept { return target_; }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  SignedMeasure row(std::size_t x) const;

  SignedKernel& operator+=(const SignedKernel& other);
  SignedKernel& operator*=(double c);

 private:
  FiniteSpace source_;
  FiniteSpace target_;
  Eigen::MatrixXd rows_;
};

SignedKernel operator+(SignedKernel a, const SignedKernel& b);
SignedKernel operator*(double c, SignedKernel a);

/// Probabilistic morphism: every row is a probability measure. Rows whose
/// mass is within tol::kRenormalize of one are renormalized; rows already
/// within tol::kInvariant are kept unchanged.
class MarkovKernel {
 public:
  explicit MarkovKernel(const SignedKernel& k);
  MarkovKernel(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd rows);

  static MarkovKernel identity(const FiniteSpace& space);
  static MarkovKernel uniform(const FiniteSpace& source, const FiniteSpace& target);
  static MarkovKernel constant(const FiniteSpace& source, const ProbMeasure& row);

  const SignedKernel& kernel() const noexcept { return k_; }
  operator const SignedKernel&() const noexcept { return k_; }  // NOLINT
  const FiniteSpace& source() const noexcept { return k_.source(); }
  const FiniteSpace& target() const noexcept { return k_.target(); }
  const Eigen::MatrixXd& rows() const noexcept { return k_.rows(); }
  ProbMeasure row(std::size_t x) const;

 private:
  SignedKernel k_;
};

/// Measure on a product space; the graph pushforward and the data
/// distribution both live here.
using JointMeasure = SignedMeasure;

/// Largest deviation of any row sum from 1 and most negative entry; used to
/// diagnose fixtures that fail MarkovKernel validation.
struct StochasticityDefect {
  double max_row_sum_error = 0.0;
  double min_entry = 0.0;
};
StochasticityDefect stochasticity_defect(const SignedKernel& k) noexcept;

/// (T_* mu)(y) = sum_x mu(x) T(y|x).
SignedMeasure pushforward(const SignedKernel& t, const SignedMeasure& mu);
ProbMeasure pushforward(const MarkovKernel& t, const ProbMeasure& mu);

/// (T^* f)(x) = sum_y T(y|x) f(y).
Eigen::VectorXd pullback(const SignedKernel& t, const Eigen::VectorXd& f);

/// t2 after t1.
SignedKernel compose(const SignedKernel& t2, const SignedKernel& t1);
MarkovKernel compose(const MarkovKernel& t2, const MarkovKernel& t1);

/// x -> t1(x) x t2(x) on the product of the targets.
SignedKernel joint(const SignedKernel& t1, const SignedKernel& t2);
MarkovKernel joint(const MarkovKernel& t1, const MarkovKernel& t2);

/// x -> delta_x x T(x), the joint of the identity with T.
SignedKernel graph(const SignedKernel& t);
MarkovKernel graph(const MarkovKernel& t);

/// (Gamma_T)_* mu_X, weight(x, y) = mu_X(x) T(y|x).
JointMeasure graph_pushforward(const SignedKernel& t, const SignedMeasure& mu_x);
ProbMeasure graph_pushforward(const MarkovKernel& t, const ProbMeasure& mu_x);

enum class ZeroRowPolicy { Uniform, Error };

struct Disintegration {
  ProbMeasure marginal;
  MarkovKernel conditional;
};

/// Factor a joint probability into its left marginal and the regular
/// conditional probability. Rows over massless x follow `policy`.
Disintegration disintegrate(const ProbMeasure& joint, ZeroRowPolicy policy = ZeroRowPolicy::Uniform);

/// Row x = delta at targets[x].
MarkovKernel deterministic(const FiniteSpace& source, const FiniteSpace& target, std::span<const std::size_t> targets);
MarkovKernel deterministic(const FiniteSpace& source, const FiniteSpace& target,
                           std::span<const std::string> target_labels);

/// Deterministic projection of a product space onto one factor.
MarkovKernel projection(const FiniteSpace& product_space, Axis axis);

/// sup_x |T(x)|_TV.
double sup_tv_norm(const SignedKernel& t) noexcept;

struct OperatorNorm {
  double value = 0.0;
  /// Maximizing sum-zero direction on X, normalized to u^T G_X u = 1.
  /// Empty when |X| = 1.
  Eigen::VectorXd direction;
};

/// sup over A != B in P(X) of |(Gamma_T)_*(A - B)|_{gXY} / |A - B|_{gX},
/// solved as a generalized eigenproblem on the sum-zero subspace.
OperatorNorm embedded_operator_norm_detail(const MarkovKernel& t, const GramMatrix& g_x, const GramMatrix& g_xy);
double embedded_operator_norm(const MarkovKernel& t, const GramMatrix& g_x, const GramMatrix& g_xy);

}  // namespace probmorph

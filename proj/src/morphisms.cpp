#include "probmorph/morphisms.hpp"

#include <algorithm>
#include <cmath>

#include "probmorph/errors.hpp"
#include "probmorph/summation.hpp"
#include "probmorph/tolerances.hpp"

namespace probmorph {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

constexpr Eigen::Index kDenseEigenLimit = 64;

}  // namespace

SignedKernel::SignedKernel(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd rows)
    : source_(std::move(source)), target_(std::move(target)), rows_(std::move(rows)) {
  if (rows_.rows() != idx(source_.size()) || rows_.cols() != idx(target_.size())) {
    throw DomainError("kernel matrix is " + std::to_string(rows_.rows()) + "x" + std::to_string(rows_.cols()) +
                      ", spaces need " + std::to_string(source_.size()) + "x" + std::to_string(target_.size()));
  }
  if (!rows_.allFinite()) throw DomainError("kernel rows must be finite");
}

SignedKernel SignedKernel::zero(const FiniteSpace& source, const FiniteSpace& target) {
  return {source, target, Eigen::MatrixXd::Zero(idx(source.size()), idx(target.size()))};
}

SignedMeasure SignedKernel::row(std::size_t x) const {
  if (x >= source_.size()) throw DomainError("kernel row index out of range");
  return {target_, rows_.row(idx(x)).transpose()};
}

SignedKernel& SignedKernel::operator+=(const SignedKernel& other) {
  require_same_space(source_, other.source_, "kernel addition (source)");
  require_same_space(target_, other.target_, "kernel addition (target)");
  rows_ += other.rows_;
  return *this;
}

SignedKernel& SignedKernel::operator*=(double c) {
  if (!std::isfinite(c)) throw DomainError("non-finite scalar");
  rows_ *= c;
  return *this;
}

SignedKernel operator+(SignedKernel a, const SignedKernel& b) { return a += b; }
SignedKernel operator*(double c, SignedKernel a) { return a *= c; }

// ---------------------------------------------------------------------------

namespace {

SignedKernel normalize_stochastic(const SignedKernel& k) {
  Eigen::MatrixXd r = k.rows();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      if (r(i, j) < -tol::kInvariant) {
        throw DomainError("row-stochastic invariant violated: negative entry " + std::to_string(r(i, j)) +
                          " in row '" + k.source().label(static_cast<std::size_t>(i)) + "'");
      }
      if (r(i, j) < 0.0) r(i, j) = 0.0;
    }
    CompensatedSum acc;
    for (Eigen::Index j = 0; j < r.cols(); ++j) acc += r(i, j);
    const double mass = acc.value();
    if (std::abs(mass - 1.0) >= tol::kRenormalize) {
      throw DomainError("row-stochastic invariant violated: row '" + k.source().label(static_cast<std::size_t>(i)) +
                        "' sums to " + std::to_string(mass));
    }
    if (std::abs(mass - 1.0) > tol::kInvariant) r.row(i) /= mass;
  }
  return {k.source(), k.target(), std::move(r)};
}

}  // namespace

MarkovKernel::MarkovKernel(const SignedKernel& k) : k_(normalize_stochastic(k)) {}

MarkovKernel::MarkovKernel(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd rows)
    : MarkovKernel(SignedKernel(std::move(source), std::move(target), std::move(rows))) {}

MarkovKernel MarkovKernel::identity(const FiniteSpace& space) {
  return {space, space, Eigen::MatrixXd::Identity(idx(space.size()), idx(space.size()))};
}

MarkovKernel MarkovKernel::uniform(const FiniteSpace& source, const FiniteSpace& target) {
  return {source, target,
          Eigen::MatrixXd::Constant(idx(source.size()), idx(target.size()), 1.0 / static_cast<double>(target.size()))};
}

MarkovKernel MarkovKernel::constant(const FiniteSpace& source, const ProbMeasure& row) {
  Eigen::MatrixXd r = row.weights().transpose().replicate(idx(source.size()), 1);
  return {source, row.space(), std::move(r)};
}

ProbMeasure MarkovKernel::row(std::size_t x) const { return ProbMeasure(k_.row(x)); }

StochasticityDefect stochasticity_defect(const SignedKernel& k) noexcept {
  StochasticityDefect d;
  d.min_entry = k.rows().size() > 0 ? k.rows().minCoeff() : 0.0;
  for (Eigen::Index i = 0; i < k.rows().rows(); ++i) {
    d.max_row_sum_error = std::max(d.max_row_sum_error, std::abs(k.rows().row(i).sum() - 1.0));
  }
  return d;
}

// ---------------------------------------------------------------------------

SignedMeasure pushforward(const SignedKernel& t, const SignedMeasure& mu) {
  require_same_space(t.source(), mu.space(), "pushforward");
  return {t.target(), t.rows().transpose() * mu.weights()};
}

ProbMeasure pushforward(const MarkovKernel& t, const ProbMeasure& mu) {
  return ProbMeasure(pushforward(t.kernel(), mu.measure()));
}

Eigen::VectorXd pullback(const SignedKernel& t, const Eigen::VectorXd& f) {
  if (f.size() != idx(t.target().size())) {
    throw DomainError("pullback function has " + std::to_string(f.size()) + " values for a target of " +
                      std::to_string(t.target().size()) + " points");
  }
  return t.rows() * f;
}

SignedKernel compose(const SignedKernel& t2, const SignedKernel& t1) {
  require_same_space(t1.target(), t2.source(), "compose");
  return {t1.source(), t2.target(), t1.rows() * t2.rows()};
}

MarkovKernel compose(const MarkovKernel& t2, const MarkovKernel& t1) {
  return MarkovKernel(compose(t2.kernel(), t1.kernel()));
}

namespace {

SignedKernel joint_on(const SignedKernel& t1, const SignedKernel& t2, const FiniteSpace& target) {
  const Eigen::Index n1 = t1.rows().cols();
  const Eigen::Index n2 = t2.rows().cols();
  Eigen::MatrixXd r(t1.rows().rows(), n1 * n2);
  for (Eigen::Index x = 0; x < r.rows(); ++x) {
    for (Eigen::Index a = 0; a < n1; ++a) r.row(x).segment(a * n2, n2) = t1.rows()(x, a) * t2.rows().row(x);
  }
  return {t1.source(), target, std::move(r)};
}

}  // namespace

SignedKernel joint(const SignedKernel& t1, const SignedKernel& t2) {
  require_same_space(t1.source(), t2.source(), "joint");
  return joint_on(t1, t2, FiniteSpace::product(t1.target(), t2.target()));
}

MarkovKernel joint(const MarkovKernel& t1, const MarkovKernel& t2) {
  return MarkovKernel(joint(t1.kernel(), t2.kernel()));
}

SignedKernel graph(const SignedKernel& t) {
  const auto id = MarkovKernel::identity(t.source());
  return joint_on(id.kernel(), t, FiniteSpace::product(t.source(), t.target()));
}

MarkovKernel graph(const MarkovKernel& t) { return MarkovKernel(graph(t.kernel())); }

JointMeasure graph_pushforward(const SignedKernel& t, const SignedMeasure& mu_x) {
  require_same_space(t.source(), mu_x.space(), "graph pushforward");
  const Eigen::Index nx = t.rows().rows();
  const Eigen::Index ny = t.rows().cols();
  Eigen::VectorXd w(nx * ny);
  for (Eigen::Index x = 0; x < nx; ++x) w.segment(x * ny, ny) = mu_x.weights()[x] * t.rows().row(x).transpose();
  return {FiniteSpace::product(t.source(), t.target()), std::move(w)};
}

ProbMeasure graph_pushforward(const MarkovKernel& t, const ProbMeasure& mu_x) {
  return ProbMeasure(graph_pushforward(t.kernel(), mu_x.measure()));
}

Disintegration disintegrate(const ProbMeasure& joint_measure, ZeroRowPolicy policy) {
  const FiniteSpace& s = joint_measure.space();
  if (!s.is_product()) throw DomainError("disintegration needs a measure on a product space");
  ProbMeasure mu_x = marginal(joint_measure, Axis::Left);
  const auto nx = idx(s.left().size());
  const auto ny = idx(s.right().size());
  Eigen::MatrixXd rows(nx, ny);
  std::string massless;
  for (Eigen::Index x = 0; x < nx; ++x) {
    const double m = mu_x.weights()[x];
    if (m > 0.0) {
      rows.row(x) = joint_measure.weights().segment(x * ny, ny).transpose() / m;
    } else {
      if (!massless.empty()) massless += ", ";
      massless += s.left().label(static_cast<std::size_t>(x));
      rows.row(x).setConstant(1.0 / static_cast<double>(ny));
    }
  }
  if (policy == ZeroRowPolicy::Error && !massless.empty()) {
    throw DomainError("conditional undefined at massless points: " + massless);
  }
  return {std::move(mu_x), MarkovKernel(s.left(), s.right(), std::move(rows))};
}

MarkovKernel deterministic(const FiniteSpace& source, const FiniteSpace& target, std::span<const std::size_t> targets) {
  if (targets.size() != source.size()) throw DomainError("deterministic map must be total on the source");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(idx(source.size()), idx(target.size()));
  for (std::size_t x = 0; x < targets.size(); ++x) {
    if (targets[x] >= target.size()) throw DomainError("deterministic map value outside the target space");
    r(idx(x), idx(targets[x])) = 1.0;
  }
  return {source, target, std::move(r)};
}

MarkovKernel deterministic(const FiniteSpace& source, const FiniteSpace& target,
                           std::span<const std::string> target_labels) {
  std::vector<std::size_t> t;
  t.reserve(target_labels.size());
  for (const auto& l : target_labels) t.push_back(target.index_of(l));
  return deterministic(source, target, std::span<const std::size_t>(t));
}

MarkovKernel projection(const FiniteSpace& product_space, Axis axis) {
  const std::size_t nx = product_space.left().size();
  const std::size_t ny = product_space.right().size();
  std::vector<std::size_t> t(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) t[i * ny + j] = axis == Axis::Left ? i : j;
  }
  return deterministic(product_space, axis == Axis::Left ? product_space.left() : product_space.right(),
                       std::span<const std::size_t>(t));
}

double sup_tv_norm(const SignedKernel& t) noexcept {
  double best = 0.0;
  for (Eigen::Index x = 0; x < t.rows().rows(); ++x) best = std::max(best, t.rows().row(x).cwiseAbs().sum());
  return best;
}

// ---------------------------------------------------------------------------

OperatorNorm embedded_operator_norm_detail(const MarkovKernel& t, const GramMatrix& g_x, const GramMatrix& g_xy) {
  require_same_space(g_x.points(), t.source(), "embedded operator norm (source Gram)");
  const FiniteSpace& xy = g_xy.points();
  if (!xy.is_product()) throw DomainError("embedded operator norm needs a Gram matrix on X x Y");
  require_same_space(xy.left(), t.source(), "embedded operator norm (joint Gram)");
  require_same_space(xy.right(), t.target(), "embedded operator norm (joint Gram)");

  const Eigen::Index n = t.rows().rows();
  const Eigen::Index m = t.rows().cols();
  if (n == 1) return {};

  // M(i, j) = <Gamma(x_i), Gamma(x_j)> in the joint RKHS; only the (i, .) block
  // of a graph row is nonzero.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n * m);
  for (Eigen::Index i = 0; i < n; ++i) gamma.row(i).segment(i * m, m) = t.rows().row(i);
  const Eigen::MatrixXd big_m = gamma * g_xy.entries() * gamma.transpose();

  // Orthonormal basis of the sum-zero subspace.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd q = full_q.rightCols(n - 1);

  Eigen::MatrixXd a = q.transpose() * big_m * q;
  Eigen::MatrixXd b = q.transpose() * g_x.entries() * q;
  a = (0.5 * (a + a.transpose())).eval();
  b = (0.5 * (b + b.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(b, Eigen::EigenvaluesOnly);
  if (bs.eigenvalues().minCoeff() <= 1e-9) {
    throw NumericalError("source Gram matrix is singular on the sum-zero subspace");
  }

  double lambda = 0.0;
  Eigen::VectorXd v;
  if (n - 1 <= kDenseEigenLimit) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b);
    const Eigen::Index top = n - 2;  // eigenvalues ascend
    lambda = ges.eigenvalues()[top];
    v = ges.eigenvectors().col(top);
  } else {
    const Eigen::LLT<Eigen::MatrixXd> llt(b);
    const Eigen::MatrixXd l = llt.matrixL();
    const Eigen::MatrixXd linv_a = l.triangularView<Eigen::Lower>().solve(a);
    const Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(linv_a.transpose()).transpose();
    Eigen::VectorXd z = Eigen::VectorXd::Ones(n - 1).normalized();
    for (int it = 0; it < 10000; ++it) {
      Eigen::VectorXd next = c * z;
      const double norm = next.norm();
      if (norm == 0.0) break;
      next /= norm;
      const double change = (next - z).norm();
      z = std::move(next);
      lambda = z.dot(c * z);
      if (change < 1e-13) break;
    }
    v = l.transpose().triangularView<Eigen::Upper>().solve(z);
  }
  Eigen::VectorXd u = q * v;
  const double un = u.dot(g_x.entries() * u);
  if (un > 0.0) u /= std::sqrt(un);
  return {std::sqrt(std::max(lambda, 0.0)), std::move(u)};
}

double embedded_operator_norm(const MarkovKernel& t, const GramMatrix& g_x, const GramMatrix& g_xy) {
  return embedded_operator_norm_detail(t, g_x, g_xy).value;
}

}  // namespace probmorph

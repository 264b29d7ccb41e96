#include "probmorph/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "probmorph/errors.hpp"
#include "probmorph/tolerances.hpp"

namespace probmorph {

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Laplacian: return "laplacian";
    case KernelKind::Linear: return "linear";
    case KernelKind::Delta: return "delta";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "laplacian") return KernelKind::Laplacian;
  if (name == "linear") return KernelKind::Linear;
  if (name == "delta") return KernelKind::Delta;
  throw DomainError("unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("kernel scale must be positive");
  if ((kind == KernelKind::Gaussian || kind == KernelKind::Laplacian) && (!(sigma > 0.0) || !std::isfinite(sigma))) {
    throw DomainError("kernel sigma must be positive");
  }
}

double eval(const KernelSpec& k, std::span<const double> y, std::span<const double> y2) {
  if (y.size() != y2.size()) throw DomainError("kernel arguments differ in dimension");
  double acc = 0.0;
  switch (k.kind) {
    case KernelKind::Gaussian:
      for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - y2[i]) * (y[i] - y2[i]);
      return k.scale * std::exp(-k.sigma * acc);
    case KernelKind::Laplacian:
      for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - y2[i]);
      return k.scale * std::exp(-k.sigma * acc);
    case KernelKind::Linear:
      for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * y2[i];
      return k.scale * acc;
    case KernelKind::Delta:
      return std::equal(y.begin(), y.end(), y2.begin()) ? k.scale : 0.0;
  }
  return 0.0;
}

double eval(const KernelSpec& k, const FiniteSpace& space, std::size_t i, std::size_t j) {
  if (k.kind == KernelKind::Delta) {
    if (i >= space.size() || j >= space.size()) throw DomainError("kernel point index out of range");
    return i == j ? k.scale : 0.0;
  }
  if (!space.has_coords()) {
    throw DomainError(std::string(to_string(k.kind)) + " kernel needs coordinates on the space");
  }
  return eval(k, space.coords(i), space.coords(j));
}

double eval(const KernelSpec& k, const FiniteSpace& space, std::string_view a, std::string_view b) {
  return eval(k, space, space.index_of(a), space.index_of(b));
}

// ---------------------------------------------------------------------------

GramMatrix::GramMatrix(FiniteSpace points, Eigen::MatrixXd entries)
    : points_(std::move(points)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  if (entries_.rows() != n || entries_.cols() != n) throw DomainError("Gram matrix shape does not match its space");
  if (!entries_.allFinite()) throw DomainError("Gram matrix has non-finite entries");
  entries_ = (0.5 * (entries_ + entries_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  min_eigenvalue_ = es.eigenvalues().minCoeff();
  if (min_eigenvalue_ < tol::kPsd) {
    throw NumericalError("Gram matrix is not positive semidefinite (min eigenvalue " +
                         std::to_string(min_eigenvalue_) + ")");
  }
}

double GramMatrix::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (a.size() != entries_.rows() || b.size() != entries_.rows()) {
    throw DomainError("vector length does not match the Gram matrix");
  }
  return a.dot(entries_ * b);
}

GramMatrix GramMatrix::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("Gram scale factor must be positive");
  return {points_, c * entries_};
}

GramMatrix gram(const KernelSpec& k, const FiniteSpace& space) {
  k.validate();
  const std::size_t n = space.size();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = eval(k, space, i, j);
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return {space, std::move(g)};
}

double embed_inner(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu) {
  require_same_space(g.points(), mu.space(), "embed_inner");
  require_same_space(g.points(), nu.space(), "embed_inner");
  return g.inner(mu.weights(), nu.weights());
}

double mmd_squared(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu) {
  require_same_space(g.points(), mu.space(), "mmd");
  require_same_space(g.points(), nu.space(), "mmd");
  const Eigen::VectorXd d = mu.weights() - nu.weights();
  const double r = g.inner(d, d);
  if (r < -tol::kMmdClamp) {
    throw NumericalError("negative squared MMD " + std::to_string(r) + ": Gram matrix is not PSD");
  }
  return std::max(r, 0.0);
}

double mmd(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu) {
  return std::sqrt(mmd_squared(g, mu, nu));
}

double c_k(const KernelSpec& k, const FiniteSpace& space) {
  double best = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) best = std::max(best, std::sqrt(std::abs(eval(k, space, i, i))));
  return best;
}

double c_k(const GramMatrix& g) noexcept {
  return std::sqrt(g.entries().diagonal().cwiseAbs().maxCoeff());
}

bool embedding_injective(const GramMatrix& g, double tol) noexcept { return g.min_eigenvalue() > tol; }

}  // namespace probmorph

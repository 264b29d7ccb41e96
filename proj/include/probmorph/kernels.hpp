#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "probmorph/spaces.hpp"

namespace probmorph {

enum class KernelKind { Gaussian, Laplacian, Linear, Delta };

std::string_view to_string(KernelKind kind) noexcept;
KernelKind parse_kernel_kind(std::string_view name);

/// Positive-definite symmetric kernel on the points of a finite space.
///
///   gaussian   scale * exp(-sigma * |y - y'|_2^2)
///   laplacian  scale * exp(-sigma * |y - y'|_1)
///   linear     scale * <y, y'>
///   delta      scale * 1[y == y']
///
/// The coordinate-based variants need a space with coordinates; on a product
/// space they see the concatenated coordinates of the pair. Delta compares
/// point identity, which on a product space is pairwise label equality.
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double sigma = 1.0;
  double scale = 1.0;

  static KernelSpec gaussian(double sigma, double scale = 1.0) { return {KernelKind::Gaussian, sigma, scale}; }
  static KernelSpec laplacian(double sigma, double scale = 1.0) { return {KernelKind::Laplacian, sigma, scale}; }
  static KernelSpec linear(double scale = 1.0) { return {KernelKind::Linear, 1.0, scale}; }
  static KernelSpec delta(double scale = 1.0) { return {KernelKind::Delta, 1.0, scale}; }

  bool needs_coords() const noexcept { return kind != KernelKind::Delta; }
  void validate() const;
};

double eval(const KernelSpec& k, std::span<const double> y, std::span<const double> y2);
double eval(const KernelSpec& k, const FiniteSpace& space, std::size_t i, std::size_t j);
double eval(const KernelSpec& k, const FiniteSpace& space, std::string_view a, std::string_view b);

/// Kernel evaluated on all pairs of a point set. Symmetrized on construction
/// and rejected when its smallest eigenvalue falls below tol::kPsd.
class GramMatrix {
 public:
  GramMatrix(FiniteSpace points, Eigen::MatrixXd entries);

  const FiniteSpace& points() const noexcept { return points_; }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// a^T G b on raw weight vectors.
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

  /// Same points, entries multiplied by c > 0.
  GramMatrix scaled(double c) const;

 private:
  FiniteSpace points_;
  Eigen::MatrixXd entries_;
  double min_eigenvalue_ = 0.0;
};

GramMatrix gram(const KernelSpec& k, const FiniteSpace& space);

/// <M_K(mu), M_K(nu)>_H = mu^T G nu.
double embed_inner(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu);

/// |M_K(mu) - M_K(nu)|_H^2, clamped at zero for tiny negative round-off.
double mmd_squared(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu);
double mmd(const GramMatrix& g, const SignedMeasure& mu, const SignedMeasure& nu);

/// sup_y sqrt(|K(y, y)|) over the points of the space.
double c_k(const KernelSpec& k, const FiniteSpace& space);
double c_k(const GramMatrix& g) noexcept;

/// The mean embedding of S(Y) is injective iff the Gram matrix is nonsingular.
bool embedding_injective(const GramMatrix& g, double tol = 1e-9) noexcept;

}  // namespace probmorph

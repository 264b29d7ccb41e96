#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace probmorph {

/// An ordered finite set of labelled points, optionally embedded in R^d.
///
/// Copies share the same immutable storage. A space built by product() also
/// remembers its two factors; its points are ordered row-major over
/// (left, right) and its coordinates are the concatenation of the factors'.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<std::string> labels);
  FiniteSpace(std::vector<std::string> labels, std::vector<std::vector<double>> coords);

  static FiniteSpace product(const FiniteSpace& left, const FiniteSpace& right);

  /// One-dimensional grid whose labels are the printed coordinates.
  static FiniteSpace line(std::span<const double> points);

  std::size_t size() const noexcept;
  const std::vector<std::string>& labels() const noexcept;
  const std::string& label(std::size_t i) const;
  std::size_t index_of(std::string_view label) const;
  std::optional<std::size_t> find(std::string_view label) const;

  bool has_coords() const noexcept;
  /// Coordinate dimension, 0 when the space carries no coordinates.
  std::size_t dimension() const noexcept;
  std::span<const double> coords(std::size_t i) const;

  bool is_product() const noexcept;
  const FiniteSpace& left() const;
  const FiniteSpace& right() const;
  std::size_t pair_index(std::size_t i, std::size_t j) const;

  bool same_as(const FiniteSpace& other) const noexcept;
  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) noexcept { return a.same_as(b); }

 private:
  struct Data;
  static std::shared_ptr<Data> make_data(std::vector<std::string> labels, std::vector<std::vector<double>> coords);
  explicit FiniteSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// Finite signed measure, one weight per point of its space.
class SignedMeasure {
 public:
  SignedMeasure(FiniteSpace space, Eigen::VectorXd weights);
  static SignedMeasure zero(const FiniteSpace& space);

  const FiniteSpace& space() const noexcept { return space_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  double weight(std::string_view label) const;

  /// Compensated sum of the weights.
  double total_mass() const noexcept;

  SignedMeasure operator-() const;
  SignedMeasure& operator+=(const SignedMeasure& other);
  SignedMeasure& operator-=(const SignedMeasure& other);
  SignedMeasure& operator*=(double c);

 private:
  FiniteSpace space_;
  Eigen::VectorXd weights_;
};

SignedMeasure operator+(SignedMeasure a, const SignedMeasure& b);
SignedMeasure operator-(SignedMeasure a, const SignedMeasure& b);
SignedMeasure operator*(double c, SignedMeasure a);

/// Nonnegative measure of total mass one. Construction renormalizes inputs
/// whose mass is within tol::kRenormalize of one (inputs already within
/// tol::kInvariant are kept bit for bit) and rejects the rest.
class ProbMeasure {
 public:
  explicit ProbMeasure(const SignedMeasure& m);
  ProbMeasure(FiniteSpace space, Eigen::VectorXd weights);
  static ProbMeasure uniform(const FiniteSpace& space);

  const SignedMeasure& measure() const noexcept { return m_; }
  operator const SignedMeasure&() const noexcept { return m_; }  // NOLINT
  const FiniteSpace& space() const noexcept { return m_.space(); }
  const Eigen::VectorXd& weights() const noexcept { return m_.weights(); }
  std::size_t size() const noexcept { return m_.size(); }
  double operator[](std::size_t i) const { return m_[i]; }

 private:
  SignedMeasure m_;
};

/// Index pair of a sample (x, y) in a product space.
struct Sample {
  std::size_t x;
  std::size_t y;
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered list of (x, y) observations over a product space.
class Dataset {
 public:
  Dataset(FiniteSpace product_space, std::vector<Sample> samples);
  static Dataset from_labels(const FiniteSpace& product_space,
                             std::span<const std::pair<std::string, std::string>> samples);

  const FiniteSpace& space() const noexcept { return space_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  Dataset concat(const Dataset& other) const;

 private:
  FiniteSpace space_;
  std::vector<Sample> samples_;
};

ProbMeasure dirac(const FiniteSpace& space, std::string_view label);
ProbMeasure dirac(const FiniteSpace& space, std::size_t index);

/// Empirical measure of a list of points, weight = frequency / n.
ProbMeasure empirical(const FiniteSpace& space, std::span<const std::string> labels);
ProbMeasure empirical(const FiniteSpace& space, std::span<const std::size_t> indices);
/// Empirical joint measure of a dataset over its product space.
ProbMeasure empirical(const Dataset& data);

double tv_norm(const SignedMeasure& mu) noexcept;

struct JordanHahn {
  SignedMeasure positive;
  SignedMeasure negative;
};
JordanHahn jordan_hahn(const SignedMeasure& mu);

/// Product measure on left x right, weight(x, y) = mu(x) * nu(y).
SignedMeasure product(const SignedMeasure& mu, const SignedMeasure& nu);
SignedMeasure product(const SignedMeasure& mu, const SignedMeasure& nu, const FiniteSpace& product_space);
ProbMeasure product(const ProbMeasure& mu, const ProbMeasure& nu);

enum class Axis { Left, Right };

SignedMeasure marginal(const SignedMeasure& mu, Axis axis);
ProbMeasure marginal(const ProbMeasure& mu, Axis axis);

/// Max absolute entry difference; spaces must match.
double max_abs_diff(const SignedMeasure& a, const SignedMeasure& b);

void require_same_space(const FiniteSpace& a, const FiniteSpace& b, std::string_view what);

}  // namespace probmorph

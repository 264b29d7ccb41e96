#include "probmorph/spaces.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "probmorph/errors.hpp"
#include "probmorph/summation.hpp"
#include "probmorph/tolerances.hpp"

namespace probmorph {

struct FiniteSpace::Data {
  std::vector<std::string> labels;
  std::vector<double> coords;  // row-major, size() * dim
  std::size_t dim = 0;
  std::unordered_map<std::string, std::size_t> index;
  std::optional<std::pair<FiniteSpace, FiniteSpace>> factors;
};

std::shared_ptr<FiniteSpace::Data> FiniteSpace::make_data(std::vector<std::string> labels,
                                                          std::vector<std::vector<double>> coords) {
  if (labels.empty()) throw DomainError("finite space needs at least one point");
  auto d = std::make_shared<FiniteSpace::Data>();
  d->index.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!d->index.emplace(labels[i], i).second) {
      throw DomainError("duplicate label '" + labels[i] + "' in finite space");
    }
  }
  if (!coords.empty()) {
    if (coords.size() != labels.size()) {
      throw DomainError("coords given for " + std::to_string(coords.size()) + " points, space has " +
                        std::to_string(labels.size()));
    }
    d->dim = coords.front().size();
    if (d->dim == 0) throw DomainError("coordinate vectors must have dimension >= 1");
    d->coords.reserve(d->dim * coords.size());
    for (const auto& c : coords) {
      if (c.size() != d->dim) throw DomainError("coordinate vectors differ in dimension");
      for (double v : c) {
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate");
        d->coords.push_back(v);
      }
    }
  }
  d->labels = std::move(labels);
  return d;
}

FiniteSpace::FiniteSpace(std::vector<std::string> labels) : data_(make_data(std::move(labels), {})) {}

FiniteSpace::FiniteSpace(std::vector<std::string> labels, std::vector<std::vector<double>> coords)
    : data_(make_data(std::move(labels), std::move(coords))) {}

FiniteSpace FiniteSpace::product(const FiniteSpace& left, const FiniteSpace& right) {
  std::vector<std::string> labels;
  labels.reserve(left.size() * right.size());
  const bool with_coords = left.has_coords() && right.has_coords();
  std::vector<std::vector<double>> coords;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      labels.push_back("(" + left.label(i) + "," + right.label(j) + ")");
      if (with_coords) {
        std::vector<double> c(left.coords(i).begin(), left.coords(i).end());
        c.insert(c.end(), right.coords(j).begin(), right.coords(j).end());
        coords.push_back(std::move(c));
      }
    }
  }
  auto d = make_data(std::move(labels), std::move(coords));
  d->factors.emplace(left, right);
  return FiniteSpace(std::shared_ptr<const Data>(std::move(d)));
}

FiniteSpace FiniteSpace::line(std::span<const double> points) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> coords;
  for (double p : points) {
    std::ostringstream os;
    os << p;
    labels.push_back(os.str());
    coords.push_back({p});
  }
  return FiniteSpace(std::move(labels), std::move(coords));
}

std::size_t FiniteSpace::size() const noexcept { return data_->labels.size(); }
const std::vector<std::string>& FiniteSpace::labels() const noexcept { return data_->labels; }

const std::string& FiniteSpace::label(std::size_t i) const {
  if (i >= size()) throw DomainError("point index " + std::to_string(i) + " out of range");
  return data_->labels[i];
}

std::optional<std::size_t> FiniteSpace::find(std::string_view label) const {
  auto it = data_->index.find(std::string(label));
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t FiniteSpace::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw DomainError("unknown label '" + std::string(label) + "'");
}

bool FiniteSpace::has_coords() const noexcept { return data_->dim > 0; }
std::size_t FiniteSpace::dimension() const noexcept { return data_->dim; }

std::span<const double> FiniteSpace::coords(std::size_t i) const {
  if (!has_coords()) throw DomainError("space has no coordinates");
  if (i >= size()) throw DomainError("point index " + std::to_string(i) + " out of range");
  return {data_->coords.data() + i * data_->dim, data_->dim};
}

bool FiniteSpace::is_product() const noexcept { return data_->factors.has_value(); }

const FiniteSpace& FiniteSpace::left() const {
  if (!is_product()) throw DomainError("space is not a product space");
  return data_->factors->first;
}

const FiniteSpace& FiniteSpace::right() const {
  if (!is_product()) throw DomainError("space is not a product space");
  return data_->factors->second;
}

std::size_t FiniteSpace::pair_index(std::size_t i, std::size_t j) const {
  return i * right().size() + j;
}

bool FiniteSpace::same_as(const FiniteSpace& other) const noexcept {
  if (data_ == other.data_) return true;
  const Data& a = *data_;
  const Data& b = *other.data_;
  if (a.labels != b.labels || a.dim != b.dim || a.coords != b.coords) return false;
  if (a.factors.has_value() != b.factors.has_value()) return false;
  if (a.factors) {
    return a.factors->first.same_as(b.factors->first) && a.factors->second.same_as(b.factors->second);
  }
  return true;
}

void require_same_space(const FiniteSpace& a, const FiniteSpace& b, std::string_view what) {
  if (!a.same_as(b)) throw DomainError("space mismatch in " + std::string(what));
}

// ---------------------------------------------------------------------------

SignedMeasure::SignedMeasure(FiniteSpace space, Eigen::VectorXd weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.size()) != space_.size()) {
    throw DomainError("measure has " + std::to_string(weights_.size()) + " weights for a space of " +
                      std::to_string(space_.size()) + " points");
  }
  if (!weights_.allFinite()) throw DomainError("measure weights must be finite");
}

SignedMeasure SignedMeasure::zero(const FiniteSpace& space) {
  return {space, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()))};
}

double SignedMeasure::weight(std::string_view label) const {
  return weights_[static_cast<Eigen::Index>(space_.index_of(label))];
}

double SignedMeasure::total_mass() const noexcept {
  return compensated_sum(std::span<const double>(weights_.data(), static_cast<std::size_t>(weights_.size())));
}

SignedMeasure SignedMeasure::operator-() const { return {space_, -weights_}; }

SignedMeasure& SignedMeasure::operator+=(const SignedMeasure& other) {
  require_same_space(space_, other.space_, "measure addition");
  weights_ += other.weights_;
  return *this;
}

SignedMeasure& SignedMeasure::operator-=(const SignedMeasure& other) {
  require_same_space(space_, other.space_, "measure subtraction");
  weights_ -= other.weights_;
  return *this;
}

SignedMeasure& SignedMeasure::operator*=(double c) {
  if (!std::isfinite(c)) throw DomainError("non-finite scalar");
  weights_ *= c;
  return *this;
}

SignedMeasure operator+(SignedMeasure a, const SignedMeasure& b) { return a += b; }
SignedMeasure operator-(SignedMeasure a, const SignedMeasure& b) { return a -= b; }
SignedMeasure operator*(double c, SignedMeasure a) { return a *= c; }

// ---------------------------------------------------------------------------

namespace {

SignedMeasure normalize_probability(const SignedMeasure& m) {
  Eigen::VectorXd w = m.weights();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < -tol::kInvariant) {
      throw DomainError("probability weight " + std::to_string(w[i]) + " at '" +
                        m.space().label(static_cast<std::size_t>(i)) + "' is negative");
    }
    if (w[i] < 0.0) w[i] = 0.0;
  }
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < w.size(); ++i) acc += w[i];
  const double mass = acc.value();
  if (std::abs(mass - 1.0) >= tol::kRenormalize) {
    throw DomainError("probability weights sum to " + std::to_string(mass) + ", not 1");
  }
  if (std::abs(mass - 1.0) > tol::kInvariant) w /= mass;
  return {m.space(), std::move(w)};
}

}  // namespace

ProbMeasure::ProbMeasure(const SignedMeasure& m) : m_(normalize_probability(m)) {}

ProbMeasure::ProbMeasure(FiniteSpace space, Eigen::VectorXd weights)
    : ProbMeasure(SignedMeasure(std::move(space), std::move(weights))) {}

ProbMeasure ProbMeasure::uniform(const FiniteSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  return ProbMeasure(space, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------

Dataset::Dataset(FiniteSpace product_space, std::vector<Sample> samples)
    : space_(std::move(product_space)), samples_(std::move(samples)) {
  if (!space_.is_product()) throw DomainError("dataset requires a product space");
  const std::size_t nx = space_.left().size();
  const std::size_t ny = space_.right().size();
  for (const auto& s : samples_) {
    if (s.x >= nx || s.y >= ny) throw DomainError("sample index outside the product space");
  }
}

Dataset Dataset::from_labels(const FiniteSpace& product_space,
                             std::span<const std::pair<std::string, std::string>> samples) {
  if (!product_space.is_product()) throw DomainError("dataset requires a product space");
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const auto& [x, y] : samples) {
    out.push_back({product_space.left().index_of(x), product_space.right().index_of(y)});
  }
  return {product_space, std::move(out)};
}

Dataset Dataset::concat(const Dataset& other) const {
  require_same_space(space_, other.space_, "dataset concatenation");
  auto all = samples_;
  all.insert(all.end(), other.samples_.begin(), other.samples_.end());
  return {space_, std::move(all)};
}

// ---------------------------------------------------------------------------

ProbMeasure dirac(const FiniteSpace& space, std::string_view label) {
  return dirac(space, space.index_of(label));
}

ProbMeasure dirac(const FiniteSpace& space, std::size_t index) {
  if (index >= space.size()) throw DomainError("dirac index out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return ProbMeasure(space, std::move(w));
}

ProbMeasure empirical(const FiniteSpace& space, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DomainError("empirical measure of an empty sample");
  std::vector<std::size_t> counts(space.size(), 0);
  for (std::size_t i : indices) {
    if (i >= space.size()) throw DomainError("sample index out of range");
    ++counts[i];
  }
  const double n = static_cast<double>(indices.size());
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) w[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / n;
  return ProbMeasure(space, std::move(w));
}

ProbMeasure empirical(const FiniteSpace& space, std::span<const std::string> labels) {
  std::vector<std::size_t> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(space.index_of(l));
  return empirical(space, std::span<const std::size_t>(idx));
}

ProbMeasure empirical(const Dataset& data) {
  std::vector<std::size_t> idx;
  idx.reserve(data.size());
  for (const auto& s : data.samples()) idx.push_back(data.space().pair_index(s.x, s.y));
  return empirical(data.space(), std::span<const std::size_t>(idx));
}

double tv_norm(const SignedMeasure& mu) noexcept {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < mu.weights().size(); ++i) acc += std::abs(mu.weights()[i]);
  return acc.value();
}

JordanHahn jordan_hahn(const SignedMeasure& mu) {
  return {SignedMeasure(mu.space(), mu.weights().cwiseMax(0.0)),
          SignedMeasure(mu.space(), (-mu.weights()).cwiseMax(0.0))};
}

SignedMeasure product(const SignedMeasure& mu, const SignedMeasure& nu, const FiniteSpace& product_space) {
  require_same_space(product_space.left(), mu.space(), "product (left factor)");
  require_same_space(product_space.right(), nu.space(), "product (right factor)");
  const auto nx = static_cast<Eigen::Index>(mu.size());
  const auto ny = static_cast<Eigen::Index>(nu.size());
  Eigen::VectorXd w(nx * ny);
  for (Eigen::Index i = 0; i < nx; ++i) w.segment(i * ny, ny) = mu.weights()[i] * nu.weights();
  return {product_space, std::move(w)};
}

SignedMeasure product(const SignedMeasure& mu, const SignedMeasure& nu) {
  return product(mu, nu, FiniteSpace::product(mu.space(), nu.space()));
}

ProbMeasure product(const ProbMeasure& mu, const ProbMeasure& nu) {
  return ProbMeasure(product(mu.measure(), nu.measure()));
}

SignedMeasure marginal(const SignedMeasure& mu, Axis axis) {
  const FiniteSpace& s = mu.space();
  if (!s.is_product()) throw DomainError("marginal of a measure that does not live on a product space");
  const std::size_t nx = s.left().size();
  const std::size_t ny = s.right().size();
  const auto& w = mu.weights();
  if (axis == Axis::Left) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(nx));
    for (std::size_t i = 0; i < nx; ++i) {
      CompensatedSum acc;
      for (std::size_t j = 0; j < ny; ++j) acc += w[static_cast<Eigen::Index>(i * ny + j)];
      out[static_cast<Eigen::Index>(i)] = acc.value();
    }
    return {s.left(), std::move(out)};
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(ny));
  for (std::size_t j = 0; j < ny; ++j) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nx; ++i) acc += w[static_cast<Eigen::Index>(i * ny + j)];
    out[static_cast<Eigen::Index>(j)] = acc.value();
  }
  return {s.right(), std::move(out)};
}

ProbMeasure marginal(const ProbMeasure& mu, Axis axis) {
  return ProbMeasure(marginal(mu.measure(), axis));
}

double max_abs_diff(const SignedMeasure& a, const SignedMeasure& b) {
  require_same_space(a.space(), b.space(), "measure comparison");
  return (a.weights() - b.weights()).cwiseAbs().maxCoeff();
}

}  // namespace probmorph

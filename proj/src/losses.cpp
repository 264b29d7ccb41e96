#include "probmorph/losses.hpp"

#include <cmath>
#include <limits>

#include "probmorph/errors.hpp"
#include "probmorph/summation.hpp"
#include "probmorph/tolerances.hpp"

namespace probmorph {

namespace {

void require_joint(const MarkovKernel& h, const FiniteSpace& joint_space, std::string_view what) {
  if (!joint_space.is_product()) throw DomainError(std::string(what) + " needs a measure on X x Y");
  require_same_space(joint_space.left(), h.source(), what);
  require_same_space(joint_space.right(), h.target(), what);
}

// Row x of h: |h(x)|_K^2 and the vector G h(x).
struct RowEmbedding {
  double self = 0.0;
  Eigen::VectorXd cross;
};

RowEmbedding embed_row(const MarkovKernel& h, Eigen::Index x, const GramMatrix& g_y) {
  Eigen::VectorXd r = h.rows().row(x).transpose();
  Eigen::VectorXd gr = g_y.entries() * r;
  return {r.dot(gr), std::move(gr)};
}

double loss_from(const RowEmbedding& e, Eigen::Index y, const GramMatrix& g_y) {
  return e.self + g_y.entries()(y, y) - 2.0 * e.cross[y];
}

}  // namespace

double instantaneous_loss(const MarkovKernel& h, std::size_t x, std::size_t y, const GramMatrix& g_y) {
  require_same_space(g_y.points(), h.target(), "instantaneous loss");
  if (x >= h.source().size()) throw DomainError("unknown source point index " + std::to_string(x));
  if (y >= h.target().size()) throw DomainError("unknown target point index " + std::to_string(y));
  return loss_from(embed_row(h, static_cast<Eigen::Index>(x), g_y), static_cast<Eigen::Index>(y), g_y);
}

double instantaneous_loss(const MarkovKernel& h, std::string_view x, std::string_view y, const GramMatrix& g_y) {
  return instantaneous_loss(h, h.source().index_of(x), h.target().index_of(y), g_y);
}

RiskReport expected_risk(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_y) {
  require_joint(h, mu.space(), "expected risk");
  require_same_space(g_y.points(), h.target(), "expected risk");
  const Eigen::Index nx = h.rows().rows();
  const Eigen::Index ny = h.rows().cols();
  CompensatedSum acc;
  for (Eigen::Index x = 0; x < nx; ++x) {
    const auto e = embed_row(h, x, g_y);
    for (Eigen::Index y = 0; y < ny; ++y) {
      const double w = mu.weights()[x * ny + y];
      if (w != 0.0) acc += w * loss_from(e, y, g_y);
    }
  }
  return {acc.value(), std::nullopt};
}

RiskReport empirical_risk(const MarkovKernel& h, const Dataset& data, const GramMatrix& g_y) {
  if (data.empty()) throw DomainError("empirical risk of an empty dataset");
  require_joint(h, data.space(), "empirical risk");
  require_same_space(g_y.points(), h.target(), "empirical risk");
  std::vector<RowEmbedding> rows;
  rows.reserve(h.source().size());
  for (Eigen::Index x = 0; x < h.rows().rows(); ++x) rows.push_back(embed_row(h, x, g_y));
  std::vector<double> losses;
  losses.reserve(data.size());
  CompensatedSum acc;
  for (const auto& s : data.samples()) {
    losses.push_back(loss_from(rows[s.x], static_cast<Eigen::Index>(s.y), g_y));
    acc += losses.back();
  }
  return {acc.value() / static_cast<double>(data.size()), std::move(losses)};
}

double excess_risk(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_y, ZeroRowPolicy policy) {
  require_joint(h, mu.space(), "excess risk");
  const auto d = disintegrate(mu, policy);
  CompensatedSum acc;
  for (std::size_t x = 0; x < h.source().size(); ++x) {
    const double w = d.marginal[x];
    if (w == 0.0) continue;
    acc += w * mmd_squared(g_y, h.kernel().row(x), d.conditional.kernel().row(x));
  }
  return acc.value();
}

double tv_correct_loss(const MarkovKernel& h, const ProbMeasure& mu, int k) {
  if (k < 1) throw DomainError("loss exponent must be a positive integer");
  require_joint(h, mu.space(), "TV correct loss");
  const auto mu_x = marginal(mu.measure(), Axis::Left);
  const double tv = tv_norm(graph_pushforward(h.kernel(), mu_x) - mu.measure());
  return std::pow(tv, k);
}

double mmd_correct_loss(const MarkovKernel& h, const ProbMeasure& mu, const GramMatrix& g_xy) {
  require_joint(h, mu.space(), "MMD correct loss");
  const auto mu_x = marginal(mu.measure(), Axis::Left);
  return mmd(g_xy, graph_pushforward(h.kernel(), mu_x), mu.measure());
}

BretagnolleHuber kl_and_bh_check(const ProbMeasure& p, const ProbMeasure& f) {
  require_same_space(p.space(), f.space(), "Bretagnolle-Huber check");
  BretagnolleHuber out;
  out.l1 = tv_norm(p.measure() - f.measure());
  CompensatedSum kl;
  bool infinite = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (f[i] == 0.0) {
      infinite = true;
      break;
    }
    kl += p[i] * std::log(p[i] / f[i]);
  }
  if (infinite) {
    out.kl = std::numeric_limits<double>::infinity();
    out.bound = 2.0;
  } else {
    // KL >= 0 analytically; tiny negative sums are round-off.
    out.kl = std::max(kl.value(), 0.0);
    out.bound = 2.0 * std::sqrt(-std::expm1(-out.kl));
  }
  out.holds = out.l1 <= out.bound + tol::kInvariant;
  return out;
}

}  // namespace probmorph

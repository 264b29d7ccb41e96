#include "probmorph/learning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "detail.hpp"
#include "probmorph/errors.hpp"
#include "probmorph/losses.hpp"
#include "probmorph/summation.hpp"

namespace probmorph {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Matrix softmax_rows(const Matrix& logits) {
  Matrix r(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    r.row(i) = (logits.row(i).array() - top).exp();
    r.row(i) /= r.row(i).sum();
  }
  return r;
}

Matrix logits_of(const Matrix& rows) { return rows.array().max(1e-12).log().matrix(); }

// d f / d logits from d f / d rows through the row-wise normalized exponential.
Matrix chain_softmax(const Matrix& rows, const Matrix& grad_rows) {
  Matrix g(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double mean = rows.row(i).dot(grad_rows.row(i));
    g.row(i) = rows.row(i).array() * (grad_rows.row(i).array() - mean);
  }
  return g;
}

// Objective over row matrices; fills `grad` (same shape) when non-null.
using RowObjective = std::function<double(const Matrix& rows, Matrix* grad)>;
using Feasible = std::function<bool(const Matrix& rows)>;

struct Descent {
  Matrix rows;
  double value = 0.0;
  std::vector<double> trace;
};

std::string trace_tail(const std::vector<double>& trace) {
  std::ostringstream os;
  const std::size_t from = trace.size() > 5 ? trace.size() - 5 : 0;
  for (std::size_t i = from; i < trace.size(); ++i) os << (i == from ? "" : ", ") << "[" << i << "] " << trace[i];
  return os.str();
}

// Monotone gradient descent on logits with Armijo backtracking. The step
// doubles after every accepted move.
Descent descend(const RowObjective& f, Matrix logits, const LearnerConfig& cfg, const Feasible& feasible) {
  Descent out;
  Matrix rows = softmax_rows(logits);
  Matrix grad_rows(rows.rows(), rows.cols());
  double value = f(rows, &grad_rows);
  out.trace.push_back(value);
  if (!std::isfinite(value)) {
    throw ConvergenceError("non-finite objective at the starting point; trace: " + trace_tail(out.trace));
  }
  double step = cfg.step_size;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix g = chain_softmax(rows, grad_rows);
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) < cfg.tol) break;
    bool accepted = false;
    double t = step;
    Matrix next_logits;
    Matrix next_rows;
    double next_value = value;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      next_logits = logits - t * g;
      next_rows = softmax_rows(next_logits);
      if (feasible && !feasible(next_rows)) continue;
      next_value = f(next_rows, nullptr);
      if (!std::isfinite(next_value)) {
        out.trace.push_back(next_value);
        throw ConvergenceError("non-finite objective at iteration " + std::to_string(it) +
                               "; trace: " + trace_tail(out.trace));
      }
      if (next_value <= value - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double decrease = value - next_value;
    logits = std::move(next_logits);
    rows = std::move(next_rows);
    value = f(rows, &grad_rows);
    out.trace.push_back(value);
    step = std::min(2.0 * t, 1e8);
    if (decrease <= 1e-16 * std::max(1.0, std::abs(value))) break;
  }
  out.rows = std::move(rows);
  out.value = value;
  return out;
}

Matrix random_logits(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix l(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) l(i, j) = normal(rng);
  }
  return l;
}

// A kernel whose rows are random points of the simplex lattice {k / res}.
Matrix random_lattice_rows(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, int res) {
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  Matrix r = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < res; ++k) r(i, pick(rng)) += 1.0 / res;
  }
  return r;
}

// Empirical joint as an |X| x |Y| matrix.
Matrix joint_matrix(const Dataset& data) {
  const auto p = empirical(data);
  const auto nx = idx(data.space().left().size());
  const auto ny = idx(data.space().right().size());
  Matrix m(nx, ny);
  for (Eigen::Index x = 0; x < nx; ++x) m.row(x) = p.weights().segment(x * ny, ny).transpose();
  return m;
}

Vector flatten(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) v.segment(i * m.cols(), m.cols()) = m.row(i).transpose();
  return v;
}

// |diag(mu_X) R - P|^2 in the joint Gram norm.
double joint_mmd_sq(const Matrix& rows, const Matrix& p, const Vector& mu_x, const GramMatrix& g_xy, Matrix* grad) {
  const Matrix diff = mu_x.asDiagonal() * rows - p;
  const Vector j = flatten(diff);
  const Vector gj = g_xy.entries() * j;
  if (grad) {
    const auto m = rows.cols();
    for (Eigen::Index x = 0; x < rows.rows(); ++x) {
      grad->row(x) = 2.0 * mu_x[x] * gj.segment(x * m, m).transpose();
    }
  }
  return std::max(j.dot(gj), 0.0);
}

// sum_{x,y} p(x,y) |r_x - delta_y|_G^2.
double kernel_quadratic(const Matrix& rows, const Matrix& p, const GramMatrix& g_y, Matrix* grad) {
  const Matrix& g = g_y.entries();
  const Vector w = p.rowwise().sum();
  CompensatedSum acc;
  for (Eigen::Index x = 0; x < rows.rows(); ++x) {
    if (w[x] == 0.0) {
      if (grad) grad->row(x).setZero();
      continue;
    }
    const Vector r = rows.row(x).transpose();
    const Vector px = p.row(x).transpose();
    const Vector gr = g * r;
    const Vector gp = g * px;
    acc += w[x] * r.dot(gr) - 2.0 * r.dot(gp) + px.dot(g.diagonal());
    if (grad) grad->row(x) = (2.0 * w[x] * gr - 2.0 * gp).transpose();
  }
  return acc.value();
}

RowObjective make_empirical_objective(const Dataset& data, const RiskSelector& risk) {
  Matrix p = joint_matrix(data);
  if (risk.loss == EmpiricalLoss::KernelQuadratic) {
    require_same_space(risk.gram.points(), data.space().right(), "kernel quadratic risk");
    return [p = std::move(p), g = risk.gram](const Matrix& rows, Matrix* grad) {
      return kernel_quadratic(rows, p, g, grad);
    };
  }
  require_same_space(risk.gram.points(), data.space(), "joint MMD risk");
  Vector mu_x = p.rowwise().sum();
  return [p = std::move(p), mu_x = std::move(mu_x), g = risk.gram](const Matrix& rows, Matrix* grad) {
    return joint_mmd_sq(rows, p, mu_x, g, grad);
  };
}

Matrix source_coords(const FiniteSpace& s) {
  Matrix c(idx(s.size()), idx(s.dimension()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = s.coords(i);
    for (std::size_t d = 0; d < v.size(); ++d) c(idx(i), idx(d)) = v[d];
  }
  return c;
}

// Source pairs scanned for the Lipschitz constant.
std::vector<std::pair<Eigen::Index, Eigen::Index>> lipschitz_pairs(const Matrix& coords) {
  const Eigen::Index n = coords.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  if (n <= 256) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = (coords.row(i) - coords.row(j)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    pairs.emplace_back(std::min(i, best), std::max(i, best));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

struct Lipschitz {
  double value = 0.0;
  Eigen::Index i = -1;
  Eigen::Index j = -1;
  double dist = 0.0;
};

Lipschitz lipschitz_of(const Matrix& rows, const Matrix& coords, const GramMatrix& g_y,
                       const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs) {
  Lipschitz best;
  for (const auto& [i, j] : pairs) {
    const Vector d = (rows.row(i) - rows.row(j)).transpose();
    const double num = std::sqrt(std::max(d.dot(g_y.entries() * d), 0.0));
    const double dist = (coords.row(i) - coords.row(j)).norm();
    if (dist == 0.0) {
      if (num > 1e-12) {
        throw DomainError("source points " + std::to_string(i) + " and " + std::to_string(j) +
                          " share coordinates but have different rows: Lipschitz constant is infinite");
      }
      continue;
    }
    if (num / dist > best.value) best = {num / dist, i, j, dist};
  }
  return best;
}

double block_quad(const GramMatrix& g_xy, Eigen::Index x, Eigen::Index m, const Vector& r, Vector* grad_dir) {
  const auto block = g_xy.entries().block(x * m, x * m, m, m);
  const Vector br = block * r;
  if (grad_dir) *grad_dir = br;
  return std::max(r.dot(br), 0.0);
}

// W(h) with its gradient in row space. Max terms contribute the gradient of
// their first maximizer.
WTerms w_terms(const Matrix& rows, const WFunctionalSpec& spec, const FiniteSpace& source, const FiniteSpace& target,
               const Matrix* coords, const std::vector<std::pair<Eigen::Index, Eigen::Index>>* pairs, Matrix* grad) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index m = rows.cols();
  WTerms t;
  Matrix gs = Matrix::Zero(n, m);
  Matrix gl = Matrix::Zero(n, m);
  Matrix go = Matrix::Zero(n, m);

  if (spec.include_sup) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      const Vector r = rows.row(x).transpose();
      const double a = std::sqrt(std::max(r.dot(spec.g_y.entries() * r), 0.0));
      const double b = std::sqrt(block_quad(spec.g_xy, x, m, r, nullptr));
      if (a + b > best) {
        best = a + b;
        arg = x;
      }
    }
    t.sup = best;
    if (grad) {
      const Vector r = rows.row(arg).transpose();
      Vector br;
      const double b2 = block_quad(spec.g_xy, arg, m, r, &br);
      const Vector gr = spec.g_y.entries() * r;
      const double a = std::sqrt(std::max(r.dot(gr), 0.0));
      Vector g = Vector::Zero(m);
      if (a > 0.0) g += gr / a;
      if (b2 > 0.0) g += br / std::sqrt(b2);
      gs.row(arg) = g.transpose();
    }
  }

  if (spec.include_lipschitz && n > 1) {
    const auto l = lipschitz_of(rows, *coords, spec.g_y, *pairs);
    t.lipschitz = l.value;
    if (grad && l.i >= 0 && l.value > 0.0) {
      const Vector d = (rows.row(l.i) - rows.row(l.j)).transpose();
      const Vector gd = spec.g_y.entries() * d / (l.value * l.dist * l.dist);
      gl.row(l.i) += gd.transpose();
      gl.row(l.j) -= gd.transpose();
    }
  }

  if (spec.include_operator_norm) {
    const MarkovKernel h(source, target, rows);
    const auto op = embedded_operator_norm_detail(h, *spec.g_x, spec.g_xy);
    t.operator_norm = op.value;
    if (grad && op.value > 0.0 && op.direction.size() == n) {
      const Vector& u = op.direction;
      for (Eigen::Index i = 0; i < n; ++i) {
        Vector acc = Vector::Zero(m);
        for (Eigen::Index j = 0; j < n; ++j) {
          acc += u[j] * spec.g_xy.entries().block(i * m, j * m, m, m) * rows.row(j).transpose();
        }
        // d sqrt(lambda) = d lambda / (2 sqrt(lambda)), d lambda / d r_i = 2 u_i acc.
        go.row(i) = (u[i] * acc / op.value).transpose();
      }
    }
  }

  const double base = t.sup + t.lipschitz + t.operator_norm;
  t.value = base * base;
  if (grad) *grad = 2.0 * base * (gs + gl + go);
  return t;
}

void require_learning_data(const Dataset& data) {
  if (data.empty()) throw DomainError("learning needs a nonempty dataset");
}

struct RestartOutcome {
  Descent descent;
  double probe = std::numeric_limits<double>::infinity();
};

constexpr int kProbesPerRestart = 16;
constexpr int kLatticeResolution = 4;

}  // namespace

// ---------------------------------------------------------------------------

MarkovKernel softmax_kernel(const FiniteSpace& source, const FiniteSpace& target, const Eigen::MatrixXd& logits) {
  if (!logits.allFinite()) throw DomainError("logits must be finite");
  return {source, target, softmax_rows(logits)};
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw DomainError("cannot project an empty vector");
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    running += s[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (s[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

HypothesisClass HypothesisClass::finite(std::vector<MarkovKernel> members) {
  if (members.empty()) throw DomainError("finite hypothesis class must be nonempty");
  HypothesisClass c(HypothesisKind::Finite, members.front().source(), members.front().target());
  for (const auto& h : members) {
    require_same_space(h.source(), c.source_, "hypothesis class (source)");
    require_same_space(h.target(), c.target_, "hypothesis class (target)");
  }
  c.members_ = std::move(members);
  return c;
}

HypothesisClass HypothesisClass::parametric(FiniteSpace source, FiniteSpace target) {
  return {HypothesisKind::Parametric, std::move(source), std::move(target)};
}

HypothesisClass HypothesisClass::lipschitz_grid(FiniteSpace source, FiniteSpace target, double budget, GramMatrix g_y) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw DomainError("Lipschitz budget must be finite and >= 0");
  if (!source.has_coords()) throw DomainError("Lipschitz grid needs coordinates on the source space");
  require_same_space(g_y.points(), target, "Lipschitz grid (target Gram)");
  HypothesisClass c(HypothesisKind::LipschitzGrid, std::move(source), std::move(target));
  c.budget_ = budget;
  c.g_y_ = std::move(g_y);
  return c;
}

MarkovKernel HypothesisClass::realize(const Eigen::MatrixXd& logits) const {
  if (kind_ == HypothesisKind::Finite) throw DomainError("finite classes are not parametrized by logits");
  return softmax_kernel(source_, target_, logits);
}

bool HypothesisClass::admits(const MarkovKernel& h) const {
  if (!h.source().same_as(source_) || !h.target().same_as(target_)) return false;
  switch (kind_) {
    case HypothesisKind::Finite:
      return std::any_of(members_.begin(), members_.end(),
                         [&](const MarkovKernel& m) { return m.rows() == h.rows(); });
    case HypothesisKind::Parametric:
      return true;
    case HypothesisKind::LipschitzGrid:
      return lipschitz_constant(h, *g_y_) <= budget_;
  }
  return false;
}

// ---------------------------------------------------------------------------

void LearnerConfig::validate() const {
  for (std::size_t i = 0; i < c_schedule.size(); ++i) {
    if (!(c_schedule[i] >= 0.0)) throw DomainError("c schedule entries must be >= 0");
    if (i > 0 && c_schedule[i] > c_schedule[i - 1]) throw DomainError("c schedule must be nonincreasing");
  }
  for (double g : gamma_schedule) {
    if (!(g > 0.0)) throw DomainError("gamma schedule entries must be > 0");
  }
  if (restarts < 1) throw DomainError("restarts must be positive");
  if (max_iters < 0) throw DomainError("max_iters must be >= 0");
  if (!(step_size > 0.0)) throw DomainError("step size must be positive");
  if (!(tol >= 0.0)) throw DomainError("tolerance must be >= 0");
}

double LearnerConfig::c_at(std::size_t n) const {
  if (n == 0) throw DomainError("sample size must be >= 1");
  if (c_schedule.empty()) return 0.0;
  return c_schedule[std::min(n, c_schedule.size()) - 1];
}

double LearnerConfig::gamma_at(std::size_t n) const {
  if (n == 0) throw DomainError("sample size must be >= 1");
  if (gamma_schedule.empty()) return probmorph::gamma_schedule(n);
  return gamma_schedule[std::min(n, gamma_schedule.size()) - 1];
}

double gamma_schedule(std::size_t n) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

double empirical_objective(const MarkovKernel& h, const Dataset& data, const RiskSelector& risk) {
  require_learning_data(data);
  require_same_space(h.source(), data.space().left(), "empirical objective (source)");
  require_same_space(h.target(), data.space().right(), "empirical objective (target)");
  return make_empirical_objective(data, risk)(h.rows(), nullptr);
}

CermResult cerm(const HypothesisClass& cls, const Dataset& data, const RiskSelector& risk, const LearnerConfig& config) {
  require_learning_data(data);
  config.validate();
  require_same_space(cls.source(), data.space().left(), "cerm (source)");
  require_same_space(cls.target(), data.space().right(), "cerm (target)");
  const RowObjective objective = make_empirical_objective(data, risk);

  if (cls.kind() == HypothesisKind::Finite) {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cls.members().size(); ++i) {
      const double v = objective(cls.members()[i].rows(), nullptr);
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    return {cls.members()[best], 0.0, best_value, best, {}};
  }

  const auto n = idx(cls.source().size());
  const auto m = idx(cls.target().size());
  Feasible feasible;
  if (cls.kind() == HypothesisKind::LipschitzGrid) {
    feasible = [&cls](const Matrix& rows) {
      return cls.admits(MarkovKernel(cls.source(), cls.target(), rows));
    };
  }
  const Matrix warm = logits_of(empirical_section(data).rows());

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  detail::parallel_for(outcomes.size(), [&](std::size_t r) {
    auto rng = detail::stream(config.seed, r);
    Matrix start = (r == 0 && config.warm_start) ? warm : random_logits(rng, n, m);
    if (feasible) {
      for (int k = 0; k < 60 && !feasible(softmax_rows(start)); ++k) start *= 0.5;
      if (!feasible(softmax_rows(start))) start.setZero();
    }
    outcomes[r].descent = descend(objective, std::move(start), config, feasible);
    for (int p = 0; p < kProbesPerRestart; ++p) {
      const Matrix rows = random_lattice_rows(rng, n, m, kLatticeResolution);
      if (feasible && !feasible(rows)) continue;
      outcomes[r].probe = std::min(outcomes[r].probe, objective(rows, nullptr));
    }
  });

  std::size_t best = 0;
  double probe = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].descent.value < outcomes[best].descent.value) best = r;
    probe = std::min(probe, outcomes[r].probe);
  }
  const double value = outcomes[best].descent.value;
  const double gap = std::isfinite(probe) ? std::max(0.0, value - probe) : 0.0;
  return {MarkovKernel(cls.source(), cls.target(), outcomes[best].descent.rows), gap, value, best,
          std::move(outcomes[best].descent.trace)};
}

// ---------------------------------------------------------------------------

WFunctionalSpec WFunctionalSpec::defaults(GramMatrix g_xy, GramMatrix g_y, std::optional<GramMatrix> g_x) {
  WFunctionalSpec s{true, true, false, std::move(g_xy), std::move(g_y), std::move(g_x)};
  s.include_operator_norm = s.g_x.has_value() && s.g_x->size() <= 32;
  return s;
}

void WFunctionalSpec::validate() const {
  if (!include_sup && !include_lipschitz && !include_operator_norm) {
    throw DomainError("W functional needs at least one enabled term");
  }
  if (!g_xy.points().is_product()) throw DomainError("W functional needs a joint Gram matrix on X x Y");
  require_same_space(g_xy.points().right(), g_y.points(), "W functional (target Gram)");
  if (include_operator_norm) {
    if (!g_x) throw DomainError("operator-norm term needs a Gram matrix on X");
    require_same_space(g_xy.points().left(), g_x->points(), "W functional (source Gram)");
  }
}

double lipschitz_constant(const MarkovKernel& h, const GramMatrix& g_y) {
  require_same_space(g_y.points(), h.target(), "Lipschitz constant");
  if (!h.source().has_coords()) throw DomainError("Lipschitz constant needs coordinates on the source space");
  const Matrix coords = source_coords(h.source());
  return lipschitz_of(h.rows(), coords, g_y, lipschitz_pairs(coords)).value;
}

WTerms w_functional_terms(const MarkovKernel& h, const WFunctionalSpec& spec) {
  spec.validate();
  require_same_space(spec.g_xy.points().left(), h.source(), "W functional (source)");
  require_same_space(spec.g_y.points(), h.target(), "W functional (target)");
  std::optional<Matrix> coords;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  if (spec.include_lipschitz) {
    if (!h.source().has_coords()) throw DomainError("Lipschitz term needs coordinates on the source space");
    coords = source_coords(h.source());
    pairs = lipschitz_pairs(*coords);
  }
  return w_terms(h.rows(), spec, h.source(), h.target(), coords ? &*coords : nullptr, &pairs, nullptr);
}

double w_functional(const MarkovKernel& h, const WFunctionalSpec& spec) { return w_functional_terms(h, spec).value; }

namespace {

RowObjective make_regularized_objective(const Dataset& data, double gamma, const WFunctionalSpec& spec) {
  const FiniteSpace& source = data.space().left();
  const FiniteSpace& target = data.space().right();
  Matrix p = joint_matrix(data);
  Vector mu_x = p.rowwise().sum();
  auto coords = std::make_shared<Matrix>();
  auto pairs = std::make_shared<std::vector<std::pair<Eigen::Index, Eigen::Index>>>();
  if (spec.include_lipschitz) {
    if (!source.has_coords()) throw DomainError("Lipschitz term needs coordinates on the source space");
    *coords = source_coords(source);
    *pairs = lipschitz_pairs(*coords);
  }
  return [=](const Matrix& rows, Matrix* grad) {
    Matrix gf;
    Matrix gw;
    if (grad) {
      gf.resize(rows.rows(), rows.cols());
      gw.resize(rows.rows(), rows.cols());
    }
    const double fid = joint_mmd_sq(rows, p, mu_x, spec.g_xy, grad ? &gf : nullptr);
    const WTerms w = w_terms(rows, spec, source, target, coords.get(), pairs.get(), grad ? &gw : nullptr);
    if (grad) *grad = gf + gamma * gw;
    return fid + gamma * w.value;
  };
}

void require_regularized_inputs(const Dataset& data, double gamma, const WFunctionalSpec& spec) {
  require_learning_data(data);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  spec.validate();
  require_same_space(spec.g_xy.points(), data.space(), "regularized estimate (joint Gram)");
}

}  // namespace

double regularized_objective(const MarkovKernel& h, const Dataset& data, double gamma, const WFunctionalSpec& spec) {
  require_regularized_inputs(data, gamma, spec);
  require_same_space(h.source(), data.space().left(), "regularized objective (source)");
  require_same_space(h.target(), data.space().right(), "regularized objective (target)");
  return make_regularized_objective(data, gamma, spec)(h.rows(), nullptr);
}

RegularizedEstimate regularized_estimate(const Dataset& data, double gamma, const WFunctionalSpec& spec,
                                         const LearnerConfig& config) {
  require_regularized_inputs(data, gamma, spec);
  config.validate();
  const FiniteSpace& source = data.space().left();
  const FiniteSpace& target = data.space().right();
  const auto n = idx(source.size());
  const auto m = idx(target.size());
  const RowObjective objective = make_regularized_objective(data, gamma, spec);
  const Matrix section = empirical_section(data).rows();

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  detail::parallel_for(outcomes.size(), [&](std::size_t r) {
    auto rng = detail::stream(config.seed, r);
    Matrix start = (r == 0 && config.warm_start) ? logits_of(section) : random_logits(rng, n, m);
    outcomes[r].descent = descend(objective, std::move(start), config, {});
    for (int p = 0; p < kProbesPerRestart; ++p) {
      outcomes[r].probe = std::min(outcomes[r].probe, objective(random_lattice_rows(rng, n, m, kLatticeResolution), nullptr));
    }
  });

  RegularizedEstimate out{MarkovKernel::uniform(source, target), 0.0, 0.0, 0.0, 0.0, 0.0, false, {}, {}};
  std::size_t best = 0;
  double lower = objective(section, nullptr);
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    out.restart_objectives.push_back(outcomes[r].descent.value);
    if (outcomes[r].descent.value < outcomes[best].descent.value) best = r;
    lower = std::min({lower, outcomes[r].descent.value, outcomes[r].probe});
  }
  out.h = MarkovKernel(source, target, outcomes[best].descent.rows);
  out.objective = outcomes[best].descent.value;
  const Matrix p = joint_matrix(data);
  out.fidelity = joint_mmd_sq(out.h.rows(), p, p.rowwise().sum(), spec.g_xy, nullptr);
  out.penalty = w_functional(out.h, spec);
  out.eps_certificate = std::max(0.0, out.objective - lower);
  out.eps_target = gamma * gamma;
  out.meets_target = out.eps_certificate <= out.eps_target;
  out.trace = std::move(outcomes[best].descent.trace);
  return out;
}

MarkovKernel empirical_section(const Dataset& data) {
  require_learning_data(data);
  return disintegrate(empirical(data), ZeroRowPolicy::Uniform).conditional;
}

// ---------------------------------------------------------------------------

NewtonInterpolant::NewtonInterpolant(std::vector<double> nodes, std::vector<ProbMeasure> values)
    : target_(values.empty() ? throw DomainError("interpolation needs at least one node") : values.front().space()),
      nodes_(std::move(nodes)) {
  if (nodes_.size() != values.size()) throw DomainError("node and value counts differ");
  if (nodes_.size() > kMaxNodes) {
    throw DomainError("at most " + std::to_string(kMaxNodes) +
                      " interpolation nodes are supported; split the nodes into smaller groups");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw DomainError("interpolation abscissas must be finite");
    require_same_space(values[i].space(), target_, "interpolation values");
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes_[i] == nodes_[j]) throw DomainError("duplicate interpolation abscissa " + std::to_string(nodes_[i]));
    }
  }
  const auto k = idx(nodes_.size());
  const auto m = idx(target_.size());
  // Divided-difference table, overwritten in place column by column.
  Matrix table(k, m);
  for (Eigen::Index i = 0; i < k; ++i) table.row(i) = values[static_cast<std::size_t>(i)].weights().transpose();
  coef_.resize(k, m);
  coef_.row(0) = table.row(0);
  for (Eigen::Index order = 1; order < k; ++order) {
    for (Eigen::Index i = k - 1; i >= order; --i) {
      table.row(i) = (table.row(i) - table.row(i - 1)) /
                     (nodes_[static_cast<std::size_t>(i)] - nodes_[static_cast<std::size_t>(i - order)]);
    }
    coef_.row(order) = table.row(order);
    // Divided differences of order >= 1 of probability vectors sum to zero;
    // removing the rounding residue keeps off-node values on the affine hull.
    coef_.row(order).array() -= coef_.row(order).mean();
  }
}

SignedMeasure NewtonInterpolant::operator()(double x) const {
  const auto k = coef_.rows();
  Vector acc = coef_.row(k - 1).transpose();
  for (Eigen::Index i = k - 2; i >= 0; --i) {
    acc = coef_.row(i).transpose() + (x - nodes_[static_cast<std::size_t>(i)]) * acc;
  }
  return {target_, std::move(acc)};
}

ProbMeasure NewtonInterpolant::projected(double x) const {
  return ProbMeasure(target_, project_to_simplex((*this)(x).weights()));
}

NewtonInterpolant newton_interpolant(std::span<const std::pair<double, ProbMeasure>> nodes) {
  std::vector<double> xs;
  std::vector<ProbMeasure> ys;
  for (const auto& [x, y] : nodes) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return {std::move(xs), std::move(ys)};
}

}  // namespace probmorph

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "probmorph/bounds.hpp"
#include "probmorph/errors.hpp"
#include "probmorph/learning.hpp"
#include "probmorph/losses.hpp"
#include "probmorph/serialization.hpp"

namespace pmorph {

using namespace probmorph;

namespace {

constexpr double kLawTolerance = 1e-10;

using Rng = std::mt19937_64;

// Output -------------------------------------------------------------------

class Output {
 public:
  Output(const Config& c, std::ostream& out) : out_(out) {
    if (c.has("out")) {
      dir_ = c.text("out");
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      if (ec) throw UsageError("cannot create output directory '" + dir_->string() + "': " + ec.message());
    }
  }

  bool to_files() const { return dir_.has_value(); }

  void write(const std::string& name, const std::string& content) const {
    const auto path = *dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    f << content;
  }

  std::ostream& stream() const { return out_; }

 private:
  std::ostream& out_;
  std::optional<std::filesystem::path> dir_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

template <class F>
auto from_json_file(const std::string& path, F&& parse) {
  const Json j = load_json(path);
  try {
    return parse(j);
  } catch (const Json::exception& e) {
    throw DataError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Random instances ----------------------------------------------------------

FiniteSpace labelled(std::size_t n, const std::string& prefix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return FiniteSpace(labels);
}

std::size_t draw_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Eigen::VectorXd random_simplex(Rng& rng, std::size_t n, double zero_prob) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(zero_prob);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = zero(rng) ? 0.0 : e(rng);
  if (v.sum() == 0.0) v[static_cast<Eigen::Index>(draw_size(rng, 0, n - 1))] = 1.0;
  return v / v.sum();
}

ProbMeasure random_prob(Rng& rng, const FiniteSpace& s, double zero_prob) {
  return {s, random_simplex(rng, s.size(), zero_prob)};
}

SignedMeasure random_signed(Rng& rng, const FiniteSpace& s) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(rng);
  return {s, v};
}

MarkovKernel random_markov(Rng& rng, const FiniteSpace& x, const FiniteSpace& y, double zero_prob) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) = random_simplex(rng, y.size(), zero_prob).transpose();
  return {x, y, rows};
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// laws ------------------------------------------------------------------------

struct Law {
  std::string name;
  double max_violation = 0.0;
  std::optional<Json> failure;
};

class LawBook {
 public:
  explicit LawBook(std::vector<std::string> names) {
    for (auto& n : names) laws_.push_back(Law{std::move(n), 0.0, std::nullopt});
  }

  void record(const std::string& name, double violation, const std::function<Json()>& instance) {
    auto it = std::find_if(laws_.begin(), laws_.end(), [&](const Law& l) { return l.name == name; });
    if (it == laws_.end()) it = laws_.insert(laws_.end(), Law{name, 0.0, std::nullopt});
    if (!(violation <= it->max_violation)) it->max_violation = violation;
    if (!(violation <= kLawTolerance) && !it->failure) {
      it->failure = Json{{"law", name}, {"violation", violation}, {"instance", instance()}};
    }
  }

  bool passed() const {
    return std::all_of(laws_.begin(), laws_.end(), [](const Law& l) { return !l.failure; });
  }

  const std::vector<Law>& laws() const { return laws_; }

 private:
  std::vector<Law> laws_;
};

void random_trial(LawBook& book, std::uint64_t seed, std::size_t trial, std::size_t max_size) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(trial)};
  Rng rng(seq);
  const auto a = labelled(draw_size(rng, 2, max_size), "a");
  const auto b = labelled(draw_size(rng, 2, max_size), "b");
  const auto c = labelled(draw_size(rng, 2, max_size), "c");
  const auto d = labelled(draw_size(rng, 2, max_size), "d");
  const auto t1 = random_markov(rng, a, b, 0.2);
  const auto t2 = random_markov(rng, b, c, 0.2);
  const auto t3 = random_markov(rng, c, d, 0.2);
  const auto mu = random_prob(rng, a, 0.2);
  const auto mu_pos = random_prob(rng, a, 0.0);
  const auto s1 = random_signed(rng, a);
  const auto s2 = random_signed(rng, a);
  const auto joint_m = random_prob(rng, FiniteSpace::product(a, b), 0.3);

  const auto instance = [&] {
    return Json{{"trial", trial},    {"t1", to_json(t1.kernel())}, {"t2", to_json(t2.kernel())},
                {"t3", to_json(t3.kernel())}, {"mu", to_json(mu.measure())}, {"mu_positive", to_json(mu_pos.measure())},
                {"signed_a", to_json(s1)}, {"signed_b", to_json(s2)}, {"joint", to_json(joint_m.measure())}};
  };

  book.record("associativity", max_diff(compose(compose(t3, t2), t1).rows(), compose(t3, compose(t2, t1)).rows()),
              instance);
  book.record("left_unit", max_diff(compose(MarkovKernel::identity(b), t1).rows(), t1.rows()), instance);
  book.record("right_unit", max_diff(compose(t1, MarkovKernel::identity(a)).rows(), t1.rows()), instance);
  book.record("functoriality", max_abs_diff(pushforward(compose(t2, t1), mu), pushforward(t2, pushforward(t1, mu))),
              instance);
  book.record("pushforward_mass", std::abs(pushforward(t1, mu).measure().total_mass() - 1.0), instance);
  book.record("adjointness",
              [&] {
                const Eigen::VectorXd f = random_signed(rng, b).weights();
                const double lhs = pushforward(t1.kernel(), s1).weights().dot(f);
                const double rhs = s1.weights().dot(pullback(t1, f));
                return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
              }(),
              instance);

  const auto g = graph(t1);
  book.record("graph_projection", max_diff(compose(projection(g.target(), Axis::Right), g).rows(), t1.rows()),
              instance);
  const auto gp = graph_pushforward(t1, mu);
  book.record("graph_marginal", max_abs_diff(marginal(gp, Axis::Left), mu), instance);
  book.record("graph_pushforward", max_abs_diff(gp, pushforward(g, mu)), instance);
  book.record("graph_linearity",
              max_abs_diff(graph_pushforward(t1.kernel(), 2.0 * s1 + s2),
                           2.0 * graph_pushforward(t1.kernel(), s1) + graph_pushforward(t1.kernel(), s2)),
              instance);
  book.record("tv_nonexpansive",
              std::max(0.0, tv_norm(pushforward(t1.kernel(), s1 - s2)) - tv_norm(s1 - s2) -
                                1e-14 * std::max(1.0, tv_norm(s1 - s2))),
              instance);

  const auto dis = disintegrate(joint_m);
  book.record("disintegration_round_trip", max_abs_diff(graph_pushforward(dis.conditional, dis.marginal), joint_m),
              instance);
  book.record("disintegration_uniqueness",
              max_diff(disintegrate(graph_pushforward(t1, mu_pos)).conditional.rows(), t1.rows()), instance);
}

void fixture_checks(LawBook& book, const std::string& path) {
  const auto json = load_json(path);
  const auto k = from_json_file(path, [](const Json& j) { return signed_kernel_from_json(j); });
  const auto instance = [&] { return Json{{"fixture", path}, {"kernel", json}}; };
  const auto defect = stochasticity_defect(k);
  const double violation = std::max(defect.max_row_sum_error, std::max(0.0, -defect.min_entry));
  book.record("row-stochastic", violation, instance);
  if (violation > kLawTolerance) return;
  const MarkovKernel t(k);
  const auto& x = t.source();
  book.record("left_unit", max_diff(compose(MarkovKernel::identity(t.target()), t).rows(), t.rows()), instance);
  book.record("right_unit", max_diff(compose(t, MarkovKernel::identity(x)).rows(), t.rows()), instance);
  const auto g = graph(t);
  book.record("graph_projection", max_diff(compose(projection(g.target(), Axis::Right), g).rows(), t.rows()),
              instance);
  book.record("disintegration_uniqueness",
              max_diff(disintegrate(graph_pushforward(t, ProbMeasure::uniform(x))).conditional.rows(), t.rows()),
              instance);
}

int cmd_laws(const Config& c, const Output& out, std::ostream& err) {
  const auto seed = c.seed();
  const auto trials = c.count_or("trials", 1000);
  if (trials == 0) throw UsageError("--trials must be at least 1");
  const auto max_size = c.count_or("max_size", 6);
  if (max_size < 2) throw UsageError("max_size must be at least 2");

  LawBook book({"associativity", "left_unit", "right_unit", "functoriality", "pushforward_mass", "adjointness",
                "graph_projection", "graph_marginal", "graph_pushforward", "graph_linearity", "tv_nonexpansive",
                "disintegration_round_trip", "disintegration_uniqueness"});
  if (c.has("fixture")) fixture_checks(book, c.text("fixture"));
  for (std::size_t t = 0; t < trials; ++t) random_trial(book, seed, t, max_size);

  Json laws = Json::array();
  Json failures = Json::array();
  for (const auto& l : book.laws()) {
    laws.push_back({{"name", l.name}, {"max_violation", l.max_violation}, {"passed", !l.failure}});
    if (l.failure) failures.push_back(*l.failure);
  }
  const Json report{{"seed", seed},     {"trials", trials},    {"tolerance", kLawTolerance},
                    {"passed", book.passed()}, {"laws", laws}, {"failures", failures}};
  if (out.to_files()) {
    out.write("laws.json", dump(report));
    for (const auto& l : book.laws()) {
      out.stream() << (l.failure ? "FAIL " : "ok   ") << l.name << " " << l.max_violation << "\n";
    }
  } else {
    out.stream() << dump(report);
  }
  for (const auto& l : book.laws()) {
    if (l.failure) err << "invariant violated: " << l.name << " (violation " << l.max_violation << ")\n";
  }
  return book.passed() ? kExitOk : kExitInvariant;
}

// estimate --------------------------------------------------------------------

GramMatrix gram_for(const KernelSpec& k, const FiniteSpace& s, const std::string& what) {
  if (k.needs_coords() && !s.has_coords()) {
    throw UsageError("kernel '" + std::string(to_string(k.kind)) + "' needs coordinates on " + what);
  }
  return gram(k, s);
}

MarkovKernel load_kernel_on(const std::string& path, const FiniteSpace& x, const FiniteSpace& y) {
  const auto k = from_json_file(path, [](const Json& j) { return markov_kernel_from_json(j); });
  if (k.source().labels() != x.labels() || k.target().labels() != y.labels()) {
    throw DataError(path + ": kernel labels do not match the configured spaces");
  }
  return {x, y, k.rows()};
}

int cmd_estimate(const Config& c, const Output& out) {
  const auto x = space_from_config(c, "x");
  const auto y = space_from_config(c, "y");
  const auto xy = FiniteSpace::product(x, y);
  const auto kernel = kernel_from_config(c);
  const auto data = read_dataset(c.text("data"), xy);

  const auto g_y = gram_for(kernel, y, "y");
  const auto g_xy = gram_for(kernel, xy, "x and y");
  std::optional<GramMatrix> g_x;
  if (!kernel.needs_coords() || x.has_coords()) g_x = gram(kernel, x);
  auto spec = WFunctionalSpec::defaults(g_xy, g_y, g_x);
  if (!x.has_coords()) spec.include_lipschitz = false;
  if (c.has("operator_norm")) {
    spec.include_operator_norm = c.flag_or("operator_norm", false);
    if (spec.include_operator_norm && !g_x) throw UsageError("operator_norm needs a kernel usable on x");
  }

  LearnerConfig lc;
  lc.seed = c.seed();
  lc.restarts = static_cast<int>(c.count_or("restarts", static_cast<std::uint64_t>(lc.restarts)));
  lc.max_iters = static_cast<int>(c.count_or("max_iters", static_cast<std::uint64_t>(lc.max_iters)));
  lc.step_size = c.number_or("step_size", lc.step_size);
  lc.tol = c.number_or("tol", lc.tol);
  lc.warm_start = c.flag_or("warm_start", lc.warm_start);
  try {
    lc.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const double gamma = c.has("gamma") ? c.number("gamma") : gamma_schedule(data.size());
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw UsageError("gamma must be a nonnegative number");

  const auto r = regularized_estimate(data, gamma, spec, lc);
  Json trace{{"n", data.size()},
             {"seed", lc.seed},
             {"gamma", gamma},
             {"objective", r.objective},
             {"fidelity", r.fidelity},
             {"penalty", r.penalty},
             {"eps_certificate", r.eps_certificate},
             {"eps_target", r.eps_target},
             {"meets_target", r.meets_target},
             {"trace", r.trace},
             {"restart_objectives", r.restart_objectives}};
  if (c.has("truth")) {
    const auto truth = load_kernel_on(c.text("truth"), x, y);
    trace["sup_mmd_error"] = sup_distance(r.h, truth, g_y);
  }
  const Json estimate = to_json(r.h.kernel());
  if (out.to_files()) {
    out.write("estimate.json", dump(estimate));
    out.write("trace.json", dump(trace));
    Json summary{{"objective", r.objective}, {"eps_certificate", r.eps_certificate}};
    if (trace.contains("sup_mmd_error")) summary["sup_mmd_error"] = trace["sup_mmd_error"];
    out.stream() << summary.dump() << "\n";
  } else {
    out.stream() << dump(Json{{"estimate", estimate}, {"trace", trace}});
  }
  return kExitOk;
}

// sample ----------------------------------------------------------------------

int cmd_sample(const Config& c, const Output& out) {
  const auto truth = from_json_file(c.text("truth"), [](const Json& j) { return markov_kernel_from_json(j); });
  const auto& x = truth.source();
  Rng rng(c.seed());
  const auto n = c.count("n");
  if (n == 0) throw UsageError("--n must be at least 1");
  Eigen::VectorXd wx = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(x.size()), 1.0 / x.size());
  if (c.has("x_weights")) {
    const auto w = c.numbers("x_weights");
    if (w.size() != x.size()) throw UsageError("x_weights needs one weight per source point");
    wx = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  }
  const ProbMeasure mu_x = [&] {
    try {
      return ProbMeasure(x, wx);
    } catch (const DomainError& e) {
      throw UsageError(std::string("x_weights: ") + e.what());
    }
  }();
  const auto joint = graph_pushforward(truth, mu_x);
  const auto& w = joint.weights();
  std::discrete_distribution<std::size_t> d(w.data(), w.data() + w.size());
  const auto ny = truth.target().size();
  std::ostringstream csv;
  csv << "x,y\n";
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto k = d(rng);
    csv << x.label(k / ny) << "," << truth.target().label(k % ny) << "\n";
  }
  if (out.to_files()) {
    out.write("sample.csv", csv.str());
  } else {
    out.stream() << csv.str();
  }
  return kExitOk;
}

// bounds ----------------------------------------------------------------------

struct Preset {
  ProbMeasure truth;
  GramMatrix g_y;
  std::vector<MarkovKernel> hypotheses;
  std::vector<std::size_t> n;
  std::size_t trials;
  double eps;
};

Preset joint_preset(std::size_t class_size, std::vector<std::size_t> n, double eps) {
  const auto x = labelled(4, "x");
  const std::vector<double> pts{0.0, 1.0, 2.0};
  const auto y = FiniteSpace::line(pts);
  const auto xy = FiniteSpace::product(x, y);
  Eigen::VectorXd w(12);
  w << 0.10, 0.08, 0.07, 0.02, 0.12, 0.11, 0.09, 0.05, 0.06, 0.04, 0.14, 0.12;
  Rng rng(20240613);
  std::vector<MarkovKernel> hs;
  for (std::size_t i = 0; i < class_size; ++i) hs.push_back(random_markov(rng, x, y, 0.0));
  return {ProbMeasure(xy, w), gram(KernelSpec::gaussian(1.0), y), hs, std::move(n), 1000, eps};
}

Preset make_preset(const std::string& bound) {
  if (bound == "hoeffding") return joint_preset(1, {50, 100, 200, 400}, 0.2);
  if (bound == "covering") return joint_preset(6, {100, 200, 500}, 0.4);
  if (bound == "mmd_concentration") {
    const auto y = labelled(10, "y");
    return {ProbMeasure::uniform(y), gram(KernelSpec::delta(), y), {}, {50, 100, 200}, 1000, 0.1};
  }
  std::string names;
  for (const auto& k : known_bounds()) names += (names.empty() ? "" : ", ") + k;
  throw UsageError("unknown bound '" + bound + "' (expected one of: " + names + ")");
}

int cmd_bounds(const Config& c, const Output& out) {
  const auto bound = c.text("bound");
  auto preset = make_preset(bound);
  const auto seed = c.seed();
  if (c.has("n")) {
    preset.n.clear();
    for (const auto v : c.numbers("n")) {
      if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--n expects positive integers");
      preset.n.push_back(static_cast<std::size_t>(v));
    }
  }
  const auto trials = c.count_or("trials", preset.trials);
  if (trials == 0) throw UsageError("--trials must be at least 1");

  Json reports = Json::array();
  std::ostringstream table;
  table << "n,theoretical_bound,empirical_failure_rate,wilson_low,wilson_high\n";
  table.precision(17);
  for (const auto n : preset.n) {
    MonteCarloSetup s{bound, preset.truth, preset.g_y, preset.hypotheses};
    s.n = n;
    s.trials = trials;
    s.seed = seed;
    s.eps = c.number_or("eps", preset.eps);
    s.delta = c.number_or("delta", s.delta);
    s.c_m = c.number_or("c_m", s.c_m);
    BoundReport r = [&] {
      try {
        return monte_carlo_verify(s);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    }();
    reports.push_back(to_json(r));
    table << n << "," << r.theoretical_bound << "," << r.empirical_failure_rate << "," << r.wilson_low << ","
          << r.wilson_high << "\n";
  }
  if (out.to_files()) {
    out.write(bound + ".json", dump(reports));
    out.write(bound + ".csv", table.str());
  }
  out.stream() << table.str();
  return kExitOk;
}

// embed -----------------------------------------------------------------------

int cmd_embed(const Config& c, const Output& out) {
  const auto y = space_from_config(c, "y");
  const auto x = optional_space(c, "x");
  const auto kernel = kernel_from_config(c);
  const auto a = read_empirical(c.text("a"), x, y);
  const auto b = read_empirical(c.text("b"), x, y);
  if (!a.measure.space().same_as(b.measure.space())) {
    throw DataError("space mismatch: '" + c.text("a") + "' and '" + c.text("b") + "' have different headers");
  }
  const double delta = c.number_or("delta", 0.05);
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");

  const auto g = gram_for(kernel, a.measure.space(), "the sample space");
  const double ck = c_k(g);
  const double rescale = ck > 1.0 ? ck : 1.0;
  const auto unit = g.scaled(1.0 / (rescale * rescale));
  const auto radius = [&](const EmpiricalSample& e) {
    const double kdm = e.measure.weights().dot(unit.entries().diagonal());
    return rescale * mmd_concentration_bound(e.n, delta, kdm);
  };
  const Json report{{"mmd", mmd(g, a.measure, b.measure)},
                    {"n_a", a.n},
                    {"n_b", b.n},
                    {"delta", delta},
                    {"c_k", ck},
                    {"concentration_radius_a", radius(a)},
                    {"concentration_radius_b", radius(b)}};
  if (out.to_files()) out.write("embed.json", dump(report));
  out.stream() << dump(report);
  return kExitOk;
}

// dispatch --------------------------------------------------------------------

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"--seed", "seed", "random seed (mandatory here or in the config)"},
    {"--out", "out", "output directory"},
    {"--trials", "trials", "number of trials"},
    {"--n", "n", "sample size(s), comma separated"},
    {"--gamma", "gamma", "regularization weight"},
    {"--kernel", "kernel", "kernel: gaussian, laplacian, linear or delta"},
    {"--data", "data", "dataset CSV with header x,y"},
    {"--truth", "truth", "ground-truth Markov kernel JSON"},
    {"--fixture", "fixture", "kernel JSON checked by the law suite"},
    {"--bound", "bound", "bound name"},
    {"--a", "a", "first sample CSV"},
    {"--b", "b", "second sample CSV"},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov kernel calculus, kernel mean embeddings and learning bounds on finite spaces", "pmorph"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> given;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"laws", "run the property suite on seeded random instances"},
      {"estimate", "fit the regularized conditional estimator to a dataset"},
      {"sample", "draw a synthetic dataset from a Markov kernel"},
      {"bounds", "Monte Carlo check of a generalization bound"},
      {"embed", "MMD between two empirical samples"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value settings file");
    for (const auto& f : kFlags) {
      given[std::string(name) + f.key] = sub->add_option(f.name, values[f.key], f.help);
    }
  }

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Config c = config_path.empty() ? Config() : Config::load(config_path);
    for (const auto& f : kFlags) {
      if (given[command + f.key]->count() > 0) c.set(f.key, values[f.key]);
    }
    const Output output(c, out);
    if (command == "laws") return cmd_laws(c, output, err);
    if (command == "estimate") return cmd_estimate(c, output);
    if (command == "sample") return cmd_sample(c, output);
    if (command == "bounds") return cmd_bounds(c, output);
    return cmd_embed(c, output);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pmorph

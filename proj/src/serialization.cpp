#include "probmorph/serialization.hpp"

#include "probmorph/errors.hpp"

namespace probmorph {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("JSON document lacks field '") + key + "'");
  return j.at(key);
}

template <class F>
auto parsing(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

Json to_json(const FiniteSpace& space) {
  Json j;
  j["labels"] = space.labels();
  if (space.has_coords()) {
    Json coords = Json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto c = space.coords(i);
      coords.push_back(std::vector<double>(c.begin(), c.end()));
    }
    j["coords"] = std::move(coords);
  } else {
    j["coords"] = nullptr;
  }
  if (space.is_product()) j["factors"] = Json::array({to_json(space.left()), to_json(space.right())});
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  return parsing("space", [&] {
    if (j.contains("factors") && !j.at("factors").is_null()) {
      const auto& f = j.at("factors");
      if (!f.is_array() || f.size() != 2) throw DomainError("product space needs exactly two factors");
      FiniteSpace s = FiniteSpace::product(space_from_json(f[0]), space_from_json(f[1]));
      if (field(j, "labels").get<std::vector<std::string>>() != s.labels()) {
        throw DomainError("product space labels do not match its factors");
      }
      return s;
    }
    auto labels = field(j, "labels").get<std::vector<std::string>>();
    if (j.contains("coords") && !j.at("coords").is_null()) {
      return FiniteSpace(std::move(labels), j.at("coords").get<std::vector<std::vector<double>>>());
    }
    return FiniteSpace(std::move(labels));
  });
}

Json to_json(const SignedMeasure& mu) {
  Json j = to_json(mu.space());
  j["weights"] = std::vector<double>(mu.weights().data(), mu.weights().data() + mu.weights().size());
  return j;
}

SignedMeasure signed_measure_from_json(const Json& j) {
  return parsing("measure", [&] {
    const auto w = field(j, "weights").get<std::vector<double>>();
    return SignedMeasure(space_from_json(j), Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
  });
}

ProbMeasure prob_measure_from_json(const Json& j) { return ProbMeasure(signed_measure_from_json(j)); }

Json to_json(const SignedKernel& k) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < k.rows().rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(k.rows().cols()));
    for (Eigen::Index c = 0; c < k.rows().cols(); ++c) r[static_cast<std::size_t>(c)] = k.rows()(i, c);
    rows.push_back(std::move(r));
  }
  return {{"source", to_json(k.source())}, {"target", to_json(k.target())}, {"rows", std::move(rows)}};
}

SignedKernel signed_kernel_from_json(const Json& j) {
  return parsing("kernel", [&] {
    FiniteSpace source = space_from_json(field(j, "source"));
    FiniteSpace target = space_from_json(field(j, "target"));
    const auto rows = field(j, "rows").get<std::vector<std::vector<double>>>();
    if (rows.size() != source.size()) throw DomainError("kernel has a row count different from its source size");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != target.size()) {
        throw DomainError("kernel row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                          " entries, target has " + std::to_string(target.size()));
      }
      for (std::size_t c = 0; c < rows[i].size(); ++c) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
    return SignedKernel(std::move(source), std::move(target), std::move(m));
  });
}

MarkovKernel markov_kernel_from_json(const Json& j) { return MarkovKernel(signed_kernel_from_json(j)); }

Json to_json(const RiskReport& r) {
  Json j;
  j["value"] = r.value;
  j["per_sample"] = r.per_sample ? Json(*r.per_sample) : Json(nullptr);
  return j;
}

RiskReport risk_report_from_json(const Json& j) {
  return parsing("risk report", [&] {
    RiskReport r;
    r.value = field(j, "value").get<double>();
    if (j.contains("per_sample") && !j.at("per_sample").is_null()) {
      r.per_sample = j.at("per_sample").get<std::vector<double>>();
    }
    return r;
  });
}

Json to_json(const BoundReport& r) {
  return {{"bound_name", r.bound_name},
          {"parameters", r.parameters},
          {"theoretical_bound", r.theoretical_bound},
          {"empirical_failure_rate", r.empirical_failure_rate},
          {"failures", r.failures},
          {"trials", r.trials},
          {"seed", r.seed},
          {"wilson_low", r.wilson_low},
          {"wilson_high", r.wilson_high},
          {"diagnostics", r.diagnostics}};
}

BoundReport bound_report_from_json(const Json& j) {
  return parsing("bound report", [&] {
    BoundReport r;
    r.bound_name = field(j, "bound_name").get<std::string>();
    r.parameters = field(j, "parameters").get<std::map<std::string, double>>();
    r.theoretical_bound = field(j, "theoretical_bound").get<double>();
    r.empirical_failure_rate = field(j, "empirical_failure_rate").get<double>();
    r.failures = field(j, "failures").get<std::size_t>();
    r.trials = field(j, "trials").get<std::size_t>();
    r.seed = field(j, "seed").get<std::uint64_t>();
    r.wilson_low = field(j, "wilson_low").get<double>();
    r.wilson_high = field(j, "wilson_high").get<double>();
    if (j.contains("diagnostics")) r.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    return r;
  });
}

}  // namespace probmorph

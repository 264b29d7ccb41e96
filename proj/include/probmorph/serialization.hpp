#pragma once

#include <json.hpp>

#include "probmorph/bounds.hpp"
#include "probmorph/losses.hpp"
#include "probmorph/morphisms.hpp"
#include "probmorph/spaces.hpp"

namespace probmorph {

using Json = nlohmann::json;

// Spaces: {"labels": [...], "coords": [[...], ...] | null}; product spaces
// additionally carry "factors": [left, right].
Json to_json(const FiniteSpace& space);
FiniteSpace space_from_json(const Json& j);

// Measures: the space fields plus "weights": [...].
Json to_json(const SignedMeasure& mu);
SignedMeasure signed_measure_from_json(const Json& j);
ProbMeasure prob_measure_from_json(const Json& j);

// Kernels: {"source": space, "target": space, "rows": [[...], ...]}.
Json to_json(const SignedKernel& k);
SignedKernel signed_kernel_from_json(const Json& j);
MarkovKernel markov_kernel_from_json(const Json& j);

// {"value": v, "per_sample": [...] | null}
Json to_json(const RiskReport& r);
RiskReport risk_report_from_json(const Json& j);

Json to_json(const BoundReport& r);
BoundReport bound_report_from_json(const Json& j);

}  // namespace probmorph

#pragma once

#include "torusflow/construction.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/verify.hpp"

#include <json.hpp>

#include <vector>

namespace torusflow {

using Json = nlohmann::ordered_json;

Json to_json(const Vec& v);
Json to_json(const FiberDecl& fiber);
Json to_json(const ConstructionManifest& manifest);
Json to_json(const VerificationReport& report);
Json to_json(const std::vector<VerificationReport>& reports);
Json to_json(const CommutantProbeReport& probe);
Json to_json(const BasinCensus& census, bool with_assignment = false);
Json to_json(const SingularityReport& report);
Json to_json(const LimitSetReport& report);

std::string to_string(Comparison comparison);

}  // namespace torusflow

#pragma once

#include <torusflow/flow.hpp>
#include <torusflow/report_json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace torusflow::cli {

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kConfigSchema = "torusflow.config/1";

struct TraceSettings {
    std::optional<Vec> p0;
    double t0 = 0.0;
    double t1 = 10.0;
    int samples = 101;
};

struct ProbeSettings {
    int degree_x = 2;
    int degree_theta = 2;
    int collocation = 500;
};

struct RunConfig {
    std::string scenario = "s5";   ///< s5 | line | circle | planar | product | remark11
    std::string field = "default"; ///< scenario-specific variant
    std::optional<Vec> frequencies;
    int n = 0;                     ///< torus rank when frequencies are not given; 0 = scenario default
    int k = 2;                     ///< base dimension for the product scenario
    IntegratorConfig integrator{1e-10, 1e-12};
    double horizon = 1e24;
    int samples = 0;               ///< census samples; 0 = scenario default
    int equidistribution_samples = 100000;
    std::uint64_t seed = 2024;
    TraceSettings trace;
    ProbeSettings probe;
    bool sabotage = false;
};

/// Parses a config document. Unknown keys, wrong types and out-of-range
/// values raise ConfigError.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

/// Canonical form of a resolved config; its hash identifies a run.
Json config_to_json(const RunConfig& config);
/// FNV-1a (64 bit) of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

bool known_scenario(const std::string& id);

/// Frequencies after defaults: (1, e, e^2) on S^5, otherwise
/// (1, sqrt 2, sqrt 3, ...) truncated to the scenario's torus rank.
Vec resolved_frequencies(const RunConfig& config);

}  // namespace torusflow::cli

#include "torusflow_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace torusflow::cli {

namespace {

const std::set<std::string> kScenarios{"s5", "line", "circle", "planar", "product", "remark11"};

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

double get_number(const Json& obj, const std::string& key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double v = obj[key].get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + "." + key + ": must be finite");
    return v;
}

int get_int(const Json& obj, const std::string& key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return obj[key].get<int>();
}

Vec get_vector(const Json& value, const std::string& where) {
    if (!value.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw ConfigError(where + ": expected an array of numbers");
        v[static_cast<Eigen::Index>(i)] = value[i].get<double>();
        if (!std::isfinite(v[static_cast<Eigen::Index>(i)])) throw ConfigError(where + ": entries must be finite");
    }
    return v;
}

void require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

}  // namespace

bool known_scenario(const std::string& id) { return kScenarios.count(id) > 0; }

RunConfig parse_config(const Json& doc) {
    check_keys(doc,
               {"schema", "scenario", "field", "frequencies", "n", "k", "integrator", "horizon", "samples",
                "equidistribution_samples", "seed", "trace", "probe", "sabotage"},
               "config");
    RunConfig c;
    if (doc.contains("schema")) {
        if (!doc["schema"].is_string() || doc["schema"].get<std::string>() != kConfigSchema) {
            throw ConfigError(std::string("config.schema: expected \"") + kConfigSchema + "\"");
        }
    }
    if (doc.contains("scenario")) {
        if (!doc["scenario"].is_string()) throw ConfigError("config.scenario: expected a string");
        c.scenario = doc["scenario"].get<std::string>();
    }
    if (!known_scenario(c.scenario)) throw ConfigError("unknown scenario \"" + c.scenario + "\"");
    if (doc.contains("field")) {
        if (!doc["field"].is_string()) throw ConfigError("config.field: expected a string");
        c.field = doc["field"].get<std::string>();
    }
    if (doc.contains("frequencies")) c.frequencies = get_vector(doc["frequencies"], "config.frequencies");
    c.n = get_int(doc, "n", 0, "config");
    c.k = get_int(doc, "k", 2, "config");
    if (c.n < 0 || c.n > 8) throw ConfigError("config.n must be in [0, 8]");
    if (c.k < 0 || c.k > 4) throw ConfigError("config.k must be in [0, 4]");
    if (doc.contains("integrator")) {
        const Json& ic = doc["integrator"];
        check_keys(ic, {"rtol", "atol", "max_steps"}, "config.integrator");
        c.integrator.rtol = get_number(ic, "rtol", c.integrator.rtol, "config.integrator");
        c.integrator.atol = get_number(ic, "atol", c.integrator.atol, "config.integrator");
        c.integrator.max_steps = get_int(ic, "max_steps", static_cast<int>(c.integrator.max_steps), "config.integrator");
        require_positive(c.integrator.rtol, "integrator.rtol");
        require_positive(c.integrator.atol, "integrator.atol");
        require_positive(static_cast<double>(c.integrator.max_steps), "integrator.max_steps");
    }
    c.horizon = get_number(doc, "horizon", c.horizon, "config");
    require_positive(c.horizon, "horizon");
    c.samples = get_int(doc, "samples", 0, "config");
    if (c.samples < 0) throw ConfigError("config.samples must be >= 0");
    c.equidistribution_samples = get_int(doc, "equidistribution_samples", c.equidistribution_samples, "config");
    if (c.equidistribution_samples < 0) throw ConfigError("config.equidistribution_samples must be >= 0");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("trace")) {
        const Json& t = doc["trace"];
        check_keys(t, {"p0", "t_span", "samples"}, "config.trace");
        if (t.contains("p0") && !t["p0"].is_null()) c.trace.p0 = get_vector(t["p0"], "config.trace.p0");
        if (t.contains("t_span")) {
            const Vec span = get_vector(t["t_span"], "config.trace.t_span");
            if (span.size() != 2) throw ConfigError("config.trace.t_span: expected [t0, t1]");
            c.trace.t0 = span[0];
            c.trace.t1 = span[1];
        }
        c.trace.samples = get_int(t, "samples", c.trace.samples, "config.trace");
    }
    if (!(c.trace.t1 > c.trace.t0)) throw ConfigError("trace.t_span must satisfy t0 < t1");
    if (c.trace.samples < 2) throw ConfigError("trace.samples must be >= 2");
    if (doc.contains("probe")) {
        const Json& p = doc["probe"];
        check_keys(p, {"degree_x", "degree_theta", "collocation"}, "config.probe");
        c.probe.degree_x = get_int(p, "degree_x", c.probe.degree_x, "config.probe");
        c.probe.degree_theta = get_int(p, "degree_theta", c.probe.degree_theta, "config.probe");
        c.probe.collocation = get_int(p, "collocation", c.probe.collocation, "config.probe");
        if (c.probe.degree_x < 0 || c.probe.degree_theta < 0 || c.probe.collocation < 1) {
            throw ConfigError("config.probe: degrees must be >= 0 and collocation >= 1");
        }
    }
    if (doc.contains("sabotage")) {
        if (!doc["sabotage"].is_boolean()) throw ConfigError("config.sabotage: expected a boolean");
        c.sabotage = doc["sabotage"].get<bool>();
    }
    if (c.scenario == "s5") {
        if (c.frequencies && c.frequencies->size() != 3) throw ConfigError("s5 needs exactly 3 frequencies");
        if (c.n != 0 && c.n != 3) throw ConfigError("s5 has torus rank 3");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_config(doc);
}

Vec resolved_frequencies(const RunConfig& c) {
    if (c.frequencies) return *c.frequencies;
    if (c.scenario == "s5") return s5_frequencies();
    int n = c.n;
    if (n == 0) n = (c.scenario == "product" || c.scenario == "remark11") ? 2 : 1;
    static const double primes[] = {1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0};
    Vec a(n);
    for (int i = 0; i < n; ++i) a[i] = std::sqrt(primes[i]);
    return a;
}

Json config_to_json(const RunConfig& c) {
    Json j;
    j["schema"] = kConfigSchema;
    j["scenario"] = c.scenario;
    j["field"] = c.field;
    j["frequencies"] = to_json(resolved_frequencies(c));
    j["k"] = c.k;
    j["integrator"] = {{"rtol", c.integrator.rtol}, {"atol", c.integrator.atol}, {"max_steps", c.integrator.max_steps}};
    j["horizon"] = c.horizon;
    j["samples"] = c.samples;
    j["equidistribution_samples"] = c.equidistribution_samples;
    j["seed"] = c.seed;
    Json trace;
    trace["p0"] = c.trace.p0 ? to_json(*c.trace.p0) : Json(nullptr);
    trace["t_span"] = {c.trace.t0, c.trace.t1};
    trace["samples"] = c.trace.samples;
    j["trace"] = trace;
    j["probe"] = {{"degree_x", c.probe.degree_x},
                  {"degree_theta", c.probe.degree_theta},
                  {"collocation", c.probe.collocation}};
    j["sabotage"] = c.sabotage;
    return j;
}

std::string config_hash(const RunConfig& c) {
    const std::string text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace torusflow::cli

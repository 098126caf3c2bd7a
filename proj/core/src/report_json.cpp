#include "torusflow/report_json.hpp"

namespace torusflow {

Json to_json(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Json to_json(const FiberDecl& f) {
    Json j;
    j["id"] = f.id;
    j["role"] = to_string(f.role);
    j["base"] = to_json(f.base);
    j["representative"] = to_json(f.representative);
    j["order"] = f.order;
    j["order_is_lower_bound"] = f.order_is_lower_bound;
    return j;
}

Json to_json(const ConstructionManifest& m) {
    Json j;
    j["scenario"] = m.scenario;
    j["field"] = m.field.name();
    j["chart"] = m.field.chart().tag();
    j["frequencies"] = to_json(m.frequencies);
    j["declared_dense"] = m.declared_dense;
    if (!m.density_warning.empty()) j["density_warning"] = m.density_warning;
    Json inv = Json::array();
    for (const auto& f : m.inventory) inv.push_back(to_json(f));
    j["inventory"] = inv;
    Json fibers = Json::array();
    for (const auto& f : m.field.metadata().fibers) fibers.push_back(to_json(f));
    j["fibers"] = fibers;
    j["provenance"] = m.notes;
    return j;
}

std::string to_string(Comparison c) { return c == Comparison::at_most ? "at_most" : "at_least"; }

Json to_json(const VerificationReport& r) {
    Json j;
    j["name"] = r.name;
    j["passed"] = r.passed;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["comparison"] = to_string(r.comparison);
    j["samples"] = r.samples;
    j["provenance"] = r.property;
    if (!r.detail.empty()) j["detail"] = r.detail;
    if (!r.breakdown.empty()) {
        Json b;
        for (const auto& [key, value] : r.breakdown) b[key] = value;
        j["breakdown"] = b;
    }
    return j;
}

Json to_json(const std::vector<VerificationReport>& reports) {
    Json out = Json::array();
    for (const auto& r : reports) out.push_back(to_json(r));
    return out;
}

Json to_json(const CommutantProbeReport& p) {
    Json j;
    j["ansatz"] = p.ansatz;
    j["k"] = p.k;
    j["n"] = p.n;
    j["degree_x"] = p.degree_x;
    j["degree_theta"] = p.degree_theta;
    j["scalar_terms"] = p.scalar_terms;
    j["unknowns"] = p.unknowns;
    j["collocation"] = p.collocation;
    j["equations"] = p.equations;
    j["estimated_dimension"] = p.estimated_dimension;
    j["gap_ratio"] = p.gap_ratio;
    j["rank_epsilon"] = p.rank_epsilon;
    j["min_gap"] = p.min_gap;
    j["gap_ok"] = p.gap_ok;
    // The tail of the spectrum is what the rank decision rests on.
    const std::size_t keep = std::min<std::size_t>(p.singular_values.size(),
                                                   static_cast<std::size_t>(p.estimated_dimension) + 10);
    j["smallest_singular_values"] =
        std::vector<double>(p.singular_values.end() - static_cast<std::ptrdiff_t>(keep), p.singular_values.end());
    j["largest_singular_value"] = p.singular_values.empty() ? 0.0 : p.singular_values.front();
    return j;
}

Json to_json(const BasinCensus& c, bool with_assignment) {
    Json j;
    j["seed"] = c.seed;
    j["samples"] = c.assignment.size();
    j["classified_fraction"] = c.classified_fraction;
    j["unclassified_fraction"] = c.unclassified_fraction;
    Json counts = Json::object();
    for (const auto& [id, n] : c.counts) counts[id] = n;
    j["counts"] = counts;
    if (with_assignment) j["assignment"] = c.assignment;
    return j;
}

Json to_json(const SingularityReport& r) {
    Json j;
    j["location"] = to_json(r.location);
    j["estimated_order"] = r.estimated_order;
    j["declared_order"] = r.declared_order;
    j["declared_lower_bound"] = r.declared_lower_bound;
    j["r_squared"] = r.r_squared;
    j["radii"] = r.radii;
    j["direction_slopes"] = r.direction_slopes;
    j["degenerate"] = r.degenerate;
    j["passed"] = r.passed;
    return j;
}

Json to_json(const LimitSetReport& r) {
    Json j;
    j["kind"] = to_string(r.kind);
    j["target"] = r.target;
    j["final_distance"] = r.final_distance;
    j["horizon_used"] = r.horizon_used;
    j["final_point"] = to_json(r.final_point);
    j["steps"] = r.steps;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

}  // namespace torusflow

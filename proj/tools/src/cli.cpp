#include "torusflow_cli/cli.hpp"

#include "torusflow_cli/config.hpp"

#include <torusflow/construction.hpp>
#include <torusflow/verify.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef TORUSFLOW_VERSION
#define TORUSFLOW_VERSION "0.0.0"
#endif

namespace torusflow::cli {

namespace {

struct Options {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string scenario;
    bool quiet = false;
};

bool manifest_scenario(const std::string& s) {
    return s == "s5" || s == "line" || s == "circle" || s == "planar";
}

Field undamped_s5(const Vec& a) {
    const auto u = fundamental_fields_s5();
    Field sum = lifted_field_s5();
    for (int r = 0; r < 3; ++r) sum = sum + a[r] * u[static_cast<std::size_t>(r)];
    FieldMetadata meta = describing_field_s5(a).metadata();
    return sum.renamed("Y'+T").with_metadata(meta);
}

/// The field a trace follows.
Field scenario_field(const RunConfig& c) {
    const Vec a = resolved_frequencies(c);
    const std::string& f = c.field;
    if (c.scenario == "s5") {
        if (f == "default" || f == "describing") return describing_field_s5(a);
        if (f == "undamped") return undamped_s5(a);
        if (f == "damped") {
            return apply_effective_damping(undamped_s5(a), [](const Vec& y) { return singular_indicator_s5(y); },
                                           "indicator");
        }
    } else if (c.scenario == "line" || c.scenario == "circle") {
        if (f == "default" || f == "describing") return line_model_fields(parse_line_base(c.scenario), a).describing;
        if (f == "base") return line_model_fields(parse_line_base(c.scenario), a).y;
    } else if (c.scenario == "planar") {
        if (f == "default" || f == "describing") {
            PlanarDemoOptions po;
            po.frequencies = a;
            return build_planar_demo(po).field;
        }
    } else if (c.scenario == "product") {
        const bool dense = !find_integer_relation(a).has_value();
        if (f == "default" || f == "xi_plus_t") return radial_plus_affine(c.k, a, dense);
        if (f == "radial") return radial_field(c.k, static_cast<int>(a.size()));
        if (f == "affine") return affine_torus_field(a, c.k, dense);
        if (f == "zero") return zero_field(Chart::product(c.k, static_cast<int>(a.size())));
    } else if (c.scenario == "remark11") {
        if (f == "default" || f == "affine") return affine_torus_field(a);
    }
    throw ConfigError("field \"" + f + "\" is not available for scenario " + c.scenario);
}

ConstructionManifest scenario_manifest(const RunConfig& c) {
    const Vec a = resolved_frequencies(c);
    if (c.scenario == "s5") return build_s5(a);
    if (c.scenario == "line" || c.scenario == "circle") {
        return build_line_describing(parse_line_base(c.scenario), a, !find_integer_relation(a).has_value());
    }
    if (c.scenario == "planar") {
        PlanarDemoOptions po;
        po.frequencies = a;
        po.declared_dense = !find_integer_relation(a).has_value();
        return build_planar_demo(po);
    }
    const Field field = scenario_field(c);
    ConstructionManifest m{c.scenario, field, {}, a, field.metadata().declared_dense,
                           field.metadata().density_warning, {}};
    for (const auto& f : field.metadata().fibers) {
        if (f.order > 0) m.inventory.push_back(f);
    }
    m.notes = {c.scenario == "product" ? "linear model on R^k x T^n" : "affine field on T^n"};
    return m;
}

Vec default_p0(const RunConfig& c, const Chart& chart) {
    if (c.trace.p0) return *c.trace.p0;
    Vec p = Vec::Zero(chart.dimension());
    switch (chart.kind()) {
        case ChartKind::sphere5: return SpherePoint::from_pairs(0.2, 0.3, 0.5, 0.1, 0.2, 0.3).y;
        case ChartKind::circle: p[0] = 0.5; return p;
        case ChartKind::triangle: return Vec{{0.2, 0.3}};
        case ChartKind::product:
            for (int i = 0; i < chart.k(); ++i) p[i] = 0.5;
            return p;
    }
    return p;
}

std::vector<std::string> coordinate_names(const Chart& chart) {
    std::vector<std::string> names;
    switch (chart.kind()) {
        case ChartKind::sphere5:
            for (int i = 1; i <= 6; ++i) names.push_back("y" + std::to_string(i));
            return names;
        case ChartKind::triangle: return {"x1", "x2"};
        case ChartKind::circle: names.push_back("alpha"); break;
        case ChartKind::product:
            for (int i = 1; i <= chart.k(); ++i) names.push_back("x" + std::to_string(i));
            break;
    }
    for (int r = 1; r <= chart.n(); ++r) names.push_back("theta" + std::to_string(r));
    return names;
}

Json envelope(const std::string& command, const RunConfig& c) {
    Json j;
    j["tool"] = "torusflow";
    j["version"] = TORUSFLOW_VERSION;
    j["command"] = command;
    j["config_hash"] = config_hash(c);
    j["seed"] = c.seed;
    j["scenario"] = c.scenario;
    j["config"] = config_to_json(c);
    return j;
}

void write_output(const Options& opt, const std::string& text, std::ostream& out) {
    if (opt.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + opt.out_path);
    file << text;
    if (!file) throw std::runtime_error("write failed: " + opt.out_path);
}

// --- commands ----------------------------------------------------------------

int cmd_build(const Options& opt, const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ConstructionManifest m = scenario_manifest(c);
    Json j = envelope("build", c);
    j["manifest"] = to_json(m);
    write_output(opt, j.dump(2) + "\n", out);
    if (!opt.quiet) err << "build " << c.scenario << ": " << m.inventory.size() << " singular fibers\n";
    return kSuccess;
}

int cmd_trace(const Options& opt, const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Field field = scenario_field(c);
    const Chart& chart = field.chart();
    const Vec p0 = default_p0(c, chart);
    if (p0.size() != chart.dimension()) {
        throw ConfigError("trace.p0 has " + std::to_string(p0.size()) + " coordinates, chart " + chart.tag() +
                          " needs " + std::to_string(chart.dimension()));
    }
    if (!chart.contains(p0, 1e-9)) throw ConfigError("trace.p0 is outside chart " + chart.tag());
    std::vector<double> times(static_cast<std::size_t>(c.trace.samples));
    for (int i = 0; i < c.trace.samples; ++i) {
        times[static_cast<std::size_t>(i)] =
            i + 1 == c.trace.samples ? c.trace.t1
                                     : c.trace.t0 + (c.trace.t1 - c.trace.t0) * i / (c.trace.samples - 1);
    }
    const Trajectory tr = integrate(field, p0, c.trace.t0, c.trace.t1, c.integrator, times);

    std::ostringstream csv;
    csv << "# tool=torusflow version=" << TORUSFLOW_VERSION << " config_hash=" << config_hash(c)
        << " seed=" << c.seed << " scenario=" << c.scenario << " field=" << field.name()
        << " chart=" << chart.tag() << "\n";
    csv << "t";
    for (const auto& name : coordinate_names(chart)) csv << "," << name;
    csv << "\n";
    char buf[40];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.times[i]);
        csv << buf;
        for (Eigen::Index d = 0; d < tr.points[i].size(); ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", tr.points[i][d]);
            csv << "," << buf;
        }
        csv << "\n";
    }
    write_output(opt, csv.str(), out);
    if (!opt.quiet) {
        err << "trace " << c.scenario << ": " << tr.times.size() << " rows, " << tr.stats.accepted
            << " steps\n";
    }
    return kSuccess;
}

Mat shear_matrix(int n) {
    if (n == 1) return Mat::Constant(1, 1, -1.0);
    Mat s = Mat::Identity(n, n);
    s(0, 1) = 1.0;
    return s;
}

// A report that must show a large residual (the map is not an automorphism).
VerificationReport negative_control(VerificationReport r, double threshold) {
    double infinitesimal = 0.0;
    for (const auto& [key, value] : r.breakdown) {
        if (key == "infinitesimal") infinitesimal = value;
    }
    VerificationReport flipped = make_report(r.name, r.max_residual, threshold, r.samples,
                                             "maps outside the automorphism family fail conjugation",
                                             Comparison::at_least);
    flipped.passed = flipped.passed && infinitesimal >= threshold;
    flipped.breakdown = r.breakdown;
    flipped.detail = r.detail;
    return flipped;
}

std::vector<VerificationReport> product_suite(const RunConfig& c) {
    const Vec a = resolved_frequencies(c);
    const int k = c.k, n = static_cast<int>(a.size());
    if (k < 1 || n < 1) throw ConfigError("product verification needs k >= 1 and at least one frequency");
    const Field x = radial_plus_affine(k, a, !find_integer_relation(a).has_value());
    std::vector<VerificationReport> reports;

    BasisCheckOptions bo;
    bo.seed = Rng::derive(c.seed, 1);
    reports.push_back(commutant_basis_check(x, bo));

    ProbeOptions po;
    po.degree_x = c.probe.degree_x;
    po.degree_theta = c.probe.degree_theta;
    po.collocation = c.probe.collocation;
    po.seed = Rng::derive(c.seed, 2);
    const CommutantProbeReport probe = commutant_dimension_probe(x, po);
    const int expected = k * k + n;
    VerificationReport dim = make_report("commutant_dimension", std::abs(probe.estimated_dimension - expected), 0.0,
                                         probe.collocation, "commutant of xi + T has dimension k^2 + n");
    dim.passed = dim.passed && probe.gap_ok;
    dim.breakdown = {{"estimated_dimension", probe.estimated_dimension},
                     {"expected_dimension", expected},
                     {"gap_ratio", probe.gap_ratio}};
    dim.detail = probe.ansatz;
    reports.push_back(dim);

    ConjugationOptions co;
    co.seed = Rng::derive(c.seed, 3);
    Mat phi = Mat::Identity(k, k);
    phi(0, 0) = 2.0;
    if (k > 1) phi(0, 1) = 0.5;
    Vec lambda(n);
    for (int r = 0; r < n; ++r) lambda[r] = 0.3 + 0.7 * r;
    reports.push_back(conjugation_residual("automorphism:linear_times_translation",
                                           linear_automorphism(phi, lambda), x, co));
    reports.push_back(conjugation_residual("automorphism:own_flow", flow_as_map(x, 0.7), x, co));
    reports.push_back(negative_control(
        conjugation_residual("non_automorphism:torus_matrix", torus_matrix_map(k, shear_matrix(n)), x, co), 1e-2));
    Vec shift = Vec::Zero(k);
    shift[0] = 1.0;
    reports.push_back(negative_control(
        conjugation_residual("non_automorphism:base_translation", base_translation(n, shift), x, co), 1e-2));
    return reports;
}

int cmd_verify(const Options& opt, const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::vector<VerificationReport> reports;
    if (manifest_scenario(c.scenario)) {
        ManifestCheckOptions mo;
        mo.seed = c.seed;
        mo.census_samples = c.samples > 0 ? c.samples : (c.scenario == "s5" ? 64 : 1000);
        mo.census_horizon = c.horizon;
        mo.equidistribution_samples = c.equidistribution_samples;
        reports = verify_manifest(scenario_manifest(c), mo);
    } else if (c.scenario == "product") {
        reports = product_suite(c);
    } else {
        reports.push_back(remark_1_1_demo(static_cast<int>(resolved_frequencies(c).size()), c.seed));
    }
    if (c.sabotage) {
        // Negative control of the harness itself: a torus shear claimed as an automorphism.
        ConjugationOptions co;
        co.samples = 10;
        reports.push_back(conjugation_residual("sabotage:torus_shear_claimed_automorphism",
                                               torus_matrix_map(1, shear_matrix(2)),
                                               radial_plus_affine(1, Vec{{1.0, std::sqrt(2.0)}}), co));
    }
    const bool passed = all_passed(reports);
    Json j = envelope("verify", c);
    j["passed"] = passed;
    j["reports"] = to_json(reports);
    write_output(opt, j.dump(2) + "\n", out);
    if (!opt.quiet) {
        for (const auto& r : reports) {
            err << (r.passed ? "PASS " : "FAIL ") << r.name << "  residual=" << r.max_residual
                << (r.comparison == Comparison::at_most ? " <= " : " >= ") << r.tolerance << "\n";
        }
    }
    return passed ? kSuccess : kVerificationFailure;
}

int cmd_probe(const Options& opt, const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.scenario != "product") throw ConfigError("probe runs on the product scenario");
    const Vec a = resolved_frequencies(c);
    const bool dense = !find_integer_relation(a).has_value();
    ProbeOptions po;
    po.degree_x = c.probe.degree_x;
    po.degree_theta = c.probe.degree_theta;
    po.collocation = c.probe.collocation;
    po.seed = c.seed;
    const CommutantProbeReport probe = commutant_dimension_probe(radial_plus_affine(c.k, a, dense), po);
    Json j = envelope("probe", c);
    j["frequencies_dense"] = dense;
    j["expected_dimension_if_dense"] = c.k * c.k + a.size();
    j["estimated_dimension"] = probe.estimated_dimension;
    j["probe"] = to_json(probe);
    write_output(opt, j.dump(2) + "\n", out);
    if (!opt.quiet) {
        err << "probe product(" << c.k << "," << a.size() << "): dimension " << probe.estimated_dimension
            << ", gap " << probe.gap_ratio << "\n";
    }
    return probe.gap_ok ? kSuccess : kVerificationFailure;
}

int cmd_basin(const Options& opt, const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (!manifest_scenario(c.scenario)) throw ConfigError("basin needs scenario s5, line, circle or planar");
    const ConstructionManifest m = scenario_manifest(c);
    const int samples = c.samples > 0 ? c.samples : (c.scenario == "s5" ? 64 : 1000);
    const BasinCensus census = basin_census(m.field, samples, c.seed, manifest_sampler(m), c.horizon);
    Json j = envelope("basin", c);
    j["census"] = to_json(census);
    write_output(opt, j.dump(2) + "\n", out);
    if (!opt.quiet) {
        err << "basin " << c.scenario << ": " << census.classified_fraction * 100.0
            << "% of samples reach a source fiber backward\n";
    }
    return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"torusflow: describing vector fields for torus actions"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--config", opt.config_path, "JSON run configuration");
    app.add_option("--out", opt.out_path, "output file (default: standard output)");
    app.add_option("--seed", opt.seed, "random seed (overrides the config)");
    app.add_option("--scenario", opt.scenario, "s5 | line | circle | planar | product | remark11");
    app.add_flag("--quiet", opt.quiet, "suppress progress messages");
    const std::vector<std::pair<std::string, std::string>> commands{
        {"build", "write the construction manifest as JSON"},
        {"trace", "integrate one trajectory and write CSV"},
        {"verify", "run the verification suite and write a JSON report"},
        {"probe", "estimate the commutant dimension of xi + T"},
        {"basin", "backward basin census of source fibers"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->callback([&opt, n = name] { opt.command = n; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsageError;
    }

    RunConfig config;
    try {
        if (!opt.config_path.empty()) config = load_config(opt.config_path);
        if (!opt.scenario.empty()) {
            if (!known_scenario(opt.scenario)) throw ConfigError("unknown scenario \"" + opt.scenario + "\"");
            config.scenario = opt.scenario;
        }
        if (opt.seed) config.seed = *opt.seed;
        // Re-validate scenario-dependent constraints after overrides.
        config = parse_config(Json::parse(config_to_json(config).dump()));
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (opt.command == "build") return cmd_build(opt, config, out, err);
        if (opt.command == "trace") return cmd_trace(opt, config, out, err);
        if (opt.command == "verify") return cmd_verify(opt, config, out, err);
        if (opt.command == "probe") return cmd_probe(opt, config, out, err);
        if (opt.command == "basin") return cmd_basin(opt, config, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const IntegrationError& e) {
        err << "integration error: " << e.what() << "\n";
        return kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    err << "usage error: unknown command\n";
    return kUsageError;
}

}  // namespace torusflow::cli

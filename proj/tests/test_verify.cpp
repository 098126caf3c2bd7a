#include <torusflow/report_json.hpp>
#include <torusflow/verify.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace torusflow;

namespace {

const VerificationReport& find(const std::vector<VerificationReport>& reports, const std::string& name) {
    for (const auto& r : reports) {
        if (r.name == name) return r;
    }
    throw std::out_of_range("no report " + name);
}

double breakdown(const VerificationReport& r, const std::string& key) {
    for (const auto& [k, v] : r.breakdown) {
        if (k == key) return v;
    }
    throw std::out_of_range("no breakdown " + key);
}

ProbeOptions small_probe() {
    ProbeOptions o;
    o.collocation = 300;
    return o;
}

}  // namespace

TEST(Report, ComparisonDirection) {
    EXPECT_TRUE(make_report("a", 1e-9, 1e-6, 1, "").passed);
    EXPECT_FALSE(make_report("a", 1e-3, 1e-6, 1, "").passed);
    EXPECT_TRUE(make_report("a", 1.0, 1e-2, 1, "", Comparison::at_least).passed);
    EXPECT_FALSE(make_report("a", 1e-3, 1e-2, 1, "", Comparison::at_least).passed);
    EXPECT_FALSE(make_report("a", std::nan(""), 1e-2, 1, "").passed);
    EXPECT_TRUE(all_passed({}));
    EXPECT_FALSE(all_passed({make_report("a", 1.0, 0.0, 1, "")}));
}

TEST(BasisCheck, SmallAndMediumModels) {
    const VerificationReport r11 = commutant_basis_check(1, Vec{{1.0}});
    EXPECT_TRUE(r11.passed);
    EXPECT_EQ(r11.breakdown.size(), 2u);
    EXPECT_LE(r11.max_residual, 1e-8);
    const VerificationReport r22 = commutant_basis_check(2, Vec{{1.0, std::sqrt(2.0)}});
    EXPECT_TRUE(r22.passed);
    EXPECT_EQ(r22.breakdown.size(), 6u);
    EXPECT_EQ(r22.samples, 1000);
}

TEST(BasisCheck, PerturbedFieldFailsOnDilation) {
    // [X + x1^2 d/dx1, x1 d/dx1] = x1^2 d/dx1 up to sign.
    const Field x = radial_plus_affine(1, Vec{{1.0}}) +
                    Field("x^2", Chart::product(1, 1), [](const Vec& p) -> Vec { return Vec{{p[0] * p[0], 0.0}}; });
    const VerificationReport r = commutant_basis_check(x);
    EXPECT_FALSE(r.passed);
    // Samples lie in the ball of radius 2, so the worst bracket is close to 4.
    EXPECT_GT(breakdown(r, "x1*d/dx1"), 3.0);
    EXPECT_LE(breakdown(r, "x1*d/dx1"), 4.0 + 1e-6);
    EXPECT_LT(breakdown(r, "d/dtheta1"), 1e-8);
}

TEST(Probe, DimensionEqualsKSquaredPlusN) {
    const std::vector<std::pair<int, Vec>> cases{
        {1, Vec{{std::sqrt(2.0)}}},
        {1, Vec{{1.0, std::sqrt(2.0)}}},
        {2, Vec{{1.0}}},
        {2, Vec{{1.0, std::sqrt(2.0)}}},
    };
    for (const auto& [k, a] : cases) {
        const CommutantProbeReport r = commutant_dimension_probe(radial_plus_affine(k, a), small_probe());
        const int n = static_cast<int>(a.size());
        EXPECT_EQ(r.estimated_dimension, k * k + n) << "k=" << k << " n=" << n;
        EXPECT_TRUE(r.gap_ok);
        EXPECT_GE(r.gap_ratio, 1e3);
        EXPECT_EQ(r.unknowns, r.scalar_terms * (k + n));
        EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
    }
}

TEST(Probe, RationalFrequenciesEnlargeTheCommutant) {
    const CommutantProbeReport r =
        commutant_dimension_probe(radial_plus_affine(1, Vec{{1.0, 2.0}}, false), small_probe());
    EXPECT_GT(r.estimated_dimension, 1 + 2);
}

TEST(Probe, UnderdeterminedIsRejected) {
    ProbeOptions o;
    o.collocation = 5;
    try {
        commutant_dimension_probe(radial_plus_affine(2, Vec{{1.0, std::sqrt(2.0)}}), o);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("need at least"), std::string::npos);
    }
}

TEST(Conjugation, AutomorphismFamilyPasses) {
    const Field x = radial_plus_affine(2, Vec{{1.0, std::sqrt(2.0)}});
    Mat phi(2, 2);
    phi << 2.0, 0.5, -0.3, 1.0;
    const VerificationReport r = conjugation_residual("linear", linear_automorphism(phi, Vec{{0.4, 2.0}}), x);
    EXPECT_TRUE(r.passed) << r.max_residual;
    EXPECT_EQ(breakdown(r, "tests_agree"), 1.0);
    for (double s : {0.3, -1.2, 2.5}) {
        const VerificationReport f = conjugation_residual("flow", flow_as_map(x, s), x);
        EXPECT_LE(f.max_residual, 2e-6) << s;
    }
}

TEST(Conjugation, MapsOutsideTheFamilyFail) {
    const Vec a{{1.0, std::sqrt(2.0)}};
    const Field x = radial_plus_affine(2, a);
    Mat shear = Mat::Identity(2, 2);
    shear(0, 1) = 1.0;
    const VerificationReport s = conjugation_residual("shear", torus_matrix_map(2, shear), x);
    EXPECT_FALSE(s.passed);
    // Infinitesimal mismatch C a - a = (a2, 0).
    EXPECT_NEAR(breakdown(s, "infinitesimal"), a[1], 1e-6);
    EXPECT_GE(s.max_residual, 1e-1);
    Mat swap(2, 2);
    swap << 0, 1, 1, 0;
    EXPECT_GE(conjugation_residual("swap", torus_matrix_map(2, swap), x).max_residual, 1e-3);
    const VerificationReport t = conjugation_residual("shift", base_translation(2, Vec{{1.0, 0.0}}), x);
    EXPECT_FALSE(t.passed);
    EXPECT_NEAR(breakdown(t, "infinitesimal"), 1.0, 1e-6);
}

TEST(Remark, DemoPasses) {
    const VerificationReport r = remark_1_1_demo(2);
    EXPECT_TRUE(r.passed) << r.detail;
    EXPECT_LE(breakdown(r, "constant_bracket"), 1e-8);
    EXPECT_GE(breakdown(r, "sine_bracket"), 0.5);
    EXPECT_GT(breakdown(r, "fundamental_commutant_dimension"), 2.0);
}

TEST(Manifest, LineSuitePasses) {
    ManifestCheckOptions o;
    o.census_samples = 200;
    o.equidistribution_samples = 20000;
    const auto reports = verify_manifest(build_line_describing(LineBase::line, Vec{{1.0}}), o);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.max_residual << " " << r.detail;
    EXPECT_NEAR(breakdown(find(reports, "order:sink(1)"), "estimated_order"), 2.0, 0.2);
    EXPECT_NEAR(breakdown(find(reports, "order:sink(3)"), "estimated_order"), 4.0, 0.2);
}

TEST(Manifest, SabotagedOrdersAreCaught) {
    ConstructionManifest m = build_line_describing(LineBase::line, Vec{{1.0}});
    m.inventory[1].order = m.inventory[0].order;
    ManifestCheckOptions o;
    o.census_samples = 10;
    o.equidistribution_samples = 1000;
    const auto reports = verify_manifest(m, o);
    EXPECT_FALSE(find(reports, "distinct_orders").passed);
    EXPECT_FALSE(all_passed(reports));
}

TEST(Manifest, WrongDeclaredOrderIsCaught) {
    ConstructionManifest m = build_line_describing(LineBase::line, Vec{{1.0}});
    m.inventory[0].order = 6;
    ManifestCheckOptions o;
    o.census_samples = 10;
    o.equidistribution_samples = 1000;
    EXPECT_FALSE(find(verify_manifest(m, o), "order:sink(1)").passed);
}

TEST(FiberOrbit, StaysOnTheFiber) {
    const Field x = radial_plus_affine(1, Vec{{1.0, std::sqrt(2.0)}});
    const Trajectory tr = fiber_orbit(x, Vec{{0.0, 0.0, 0.0}}, 500, 0.5);
    ASSERT_EQ(tr.points.size(), 500u);
    for (const auto& p : tr.points) EXPECT_EQ(p[0], 0.0);
}

TEST(Json, ReportsSerialize) {
    const VerificationReport r = commutant_basis_check(1, Vec{{1.0}});
    const Json j = to_json(r);
    EXPECT_EQ(j["name"], r.name);
    EXPECT_EQ(j["passed"], true);
    EXPECT_EQ(j["comparison"], "at_most");
    EXPECT_TRUE(j["breakdown"].is_object());
    const CommutantProbeReport p = commutant_dimension_probe(radial_plus_affine(1, Vec{{std::sqrt(2.0)}}), small_probe());
    EXPECT_EQ(to_json(p)["estimated_dimension"], 2);
}

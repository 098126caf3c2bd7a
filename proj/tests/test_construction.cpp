#include <torusflow/construction.hpp>
#include <torusflow/flow.hpp>
#include <torusflow/report_json.hpp>
#include <torusflow/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace torusflow;

namespace {

std::set<int> inventory_orders(const ConstructionManifest& m) {
    std::set<int> out;
    for (const auto& f : m.inventory) out.insert(f.order);
    return out;
}

}  // namespace

TEST(Manifest, DistinctOrdersEnforced) {
    FiberDecl a, b;
    a.id = "a";
    a.order = 2;
    b.id = "b";
    b.order = 2;
    EXPECT_THROW(require_distinct_orders({a, b}), std::logic_error);
    b.order = 4;
    EXPECT_NO_THROW(require_distinct_orders({a, b}));
}

TEST(LineDescribing, InventoryPerBase) {
    const ConstructionManifest line = build_line_describing(LineBase::line, Vec{{1.0}});
    EXPECT_EQ(inventory_orders(line), (std::set<int>{2, 4}));
    ASSERT_EQ(line.inventory.size(), 2u);
    EXPECT_EQ(line.inventory[0].base[0], 1.0);
    EXPECT_EQ(line.inventory[1].base[0], 3.0);
    EXPECT_TRUE(line.density_warning.empty());

    const ConstructionManifest circle = build_line_describing(LineBase::circle, Vec{{1.0, std::sqrt(2.0)}});
    EXPECT_EQ(inventory_orders(circle), (std::set<int>{2, 4, 6}));
    EXPECT_EQ(circle.field.chart(), Chart::circle(2));

    const ConstructionManifest rational = build_line_describing(LineBase::circle, Vec{{1.0, 2.0}}, false);
    EXPECT_FALSE(rational.density_warning.empty());
}

TEST(LineDescribing, FieldIsBoundedOnWideInterval) {
    // tau Y is bounded, so the field cannot blow up in finite time.
    const ConstructionManifest m = build_line_describing(LineBase::line, Vec{{1.0}});
    double worst = 0.0;
    for (double x = -50.0; x <= 50.0; x += 0.01) worst = std::max(worst, std::abs(m.field(Vec{{x, 0.0}})[0]));
    EXPECT_LT(worst, 1e3);
}

TEST(PlanarDemo, ValidatesInput) {
    PlanarDemoOptions o;
    o.orders = {2, 2, 6};
    EXPECT_THROW(build_planar_demo(o), std::invalid_argument);
    o.orders = {2, 3, 6};
    EXPECT_THROW(build_planar_demo(o), std::invalid_argument);
    o.orders = {2, 4};
    EXPECT_THROW(build_planar_demo(o), std::invalid_argument);
    o = {};
    o.ray_angles = {0.0, 0.0, 1.0};
    EXPECT_THROW(build_planar_demo(o), std::invalid_argument);
    o = {};
    o.radius = 0.0;
    EXPECT_THROW(build_planar_demo(o), std::invalid_argument);
}

TEST(PlanarDemo, ArtificialSingularitiesAndOrders) {
    const ConstructionManifest m = build_planar_demo({});
    ASSERT_EQ(m.inventory.size(), 3u);
    EXPECT_EQ(inventory_orders(m), (std::set<int>{2, 4, 6}));
    for (const auto& f : m.inventory) {
        EXPECT_EQ(m.field(f.representative).norm(), 0.0);
        EXPECT_NEAR(f.base.norm(), 1.0, 1e-15);
        const SingularityReport r = estimate_order(m.field, f.representative);
        EXPECT_NEAR(r.estimated_order, f.order, 0.2) << f.id;
    }
    // The source is not a zero: the torus part survives.
    EXPECT_GT(m.field(Vec::Zero(3)).norm(), 0.0);
}

TEST(PlanarDemo, ForwardOrbitFromRayPointReachesItsArtificialFiber) {
    const ConstructionManifest m = build_planar_demo({});
    for (const auto& f : m.inventory) {
        Vec p = f.representative;
        p.head(2) *= 0.5;
        const LimitSetReport fwd = classify_limit(m.field, p, TimeDirection::forward, 1e24);
        EXPECT_EQ(fwd.target, f.id) << fwd.note;
        const LimitSetReport bwd = classify_limit(m.field, p, TimeDirection::backward, 1e24);
        EXPECT_EQ(bwd.target, "source(0,0)") << bwd.note;
    }
}

TEST(Damping, FlatFunction) {
    EXPECT_EQ(flat_damping(0.0), 0.0);
    EXPECT_EQ(flat_damping(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(flat_damping(1.0), std::exp(-1.0));
    EXPECT_LT(flat_damping(0.01), 1e-40);
}

TEST(Damping, RejectsNegativeGauge) {
    const Field x = radial_plus_affine(1, Vec{{1.0}});
    EXPECT_THROW(apply_effective_damping(x, [](const Vec& p) { return p[0]; }, "x"), std::invalid_argument);
}

TEST(Damping, VanishesOnSingularSetAndScalesElsewhere) {
    const Field base = describing_field_s5();
    const Field damped =
        apply_effective_damping(base, [](const Vec& y) { return singular_indicator_s5(y); }, "indicator");
    EXPECT_EQ(damped(Vec{{1, 0, 0, 0, 0, 0}}).norm(), 0.0);
    EXPECT_EQ(damped(SpherePoint::from_pairs(0.5, 0.5, 0.0).y).norm(), 0.0);
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const Vec p = rng.sphere_point();
        const Vec expected = flat_damping(singular_indicator_s5(p)) * base(p);
        EXPECT_LE((damped(p) - expected).norm(), 1e-15 * (1.0 + expected.norm()));
    }
}

TEST(Damping, SlopeGrowsTowardSingularSet) {
    // Along pair norms (s^2, 1/2, 1/2 - s^2) the indicator is ~ s^2/4. exp(-1/phi)
    // underflows a double well before s = 1e-2, so the gauge is scaled by 1e4;
    // it is still invariant and vanishes exactly on the singular set.
    const auto u = fundamental_fields_s5();
    const Field undamped = lifted_field_s5() + u[0] + u[1] + u[2];
    const Field damped = apply_effective_damping(
        undamped, [](const Vec& y) { return 1e4 * singular_indicator_s5(y); }, "scaled indicator");
    auto norm_at = [&](double s) { return damped(SpherePoint::from_pairs(s * s, 0.5, 0.5 - s * s).y).stableNorm(); };
    auto slope = [&](double r) {
        const double r2 = r * 0.5;
        return (std::log(norm_at(r)) - std::log(norm_at(r2))) / (std::log(r) - std::log(r2));
    };
    const double s1 = slope(1e-1), s2 = slope(1e-2), s3 = slope(2e-3);
    ASSERT_TRUE(std::isfinite(s3));
    EXPECT_GT(s2, s1);
    EXPECT_GT(s3, s2);
    EXPECT_GT(s3, 10.0);
    // The undamped field only vanishes polynomially along the same path.
    const double u1 = undamped(SpherePoint::from_pairs(1e-4, 0.5, 0.5 - 1e-4).y).norm();
    const double u2 = undamped(SpherePoint::from_pairs(2.5e-5, 0.5, 0.5 - 2.5e-5).y).norm();
    EXPECT_LT(std::log(u1 / u2) / std::log(2.0), 3.0);
}

TEST(Damping, PreservesInvariance) {
    const auto u = fundamental_fields_s5();
    const Vec a = s5_frequencies();
    const Field undamped = lifted_field_s5() + a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
    const Field damped =
        apply_effective_damping(undamped, [](const Vec& y) { return singular_indicator_s5(y); }, "indicator");
    Rng rng(14);
    for (int i = 0; i < 10; ++i) {
        EXPECT_LE(flow_commutation_residual(damped, rng.angles(3), rng.sphere_point(), 5.0, {1e-12, 1e-14}), 1e-6);
    }
}

TEST(Haar, SineAveragesToZero) {
    const Chart t2 = Chart::product(0, 2);
    const ScalarFn avg = haar_average_function([](const Vec& p) { return std::sin(p[0]); }, t2, 4);
    Rng rng(1);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(avg(rng.angles(2)), 0.0, 1e-15);
    EXPECT_THROW(haar_average_function([](const Vec&) { return 1.0; }, t2, 3), std::invalid_argument);
    EXPECT_THROW(haar_average_function([](const Vec&) { return 1.0; }, Chart::line(), 8), std::invalid_argument);
}

TEST(Haar, InvariantInputIsAFixedPoint) {
    const Chart s = Chart::sphere5();
    const ScalarFn rho = [](const Vec& y) { return singular_indicator_s5(y) + y[4] * y[4] + y[5] * y[5]; };
    const ScalarFn avg = haar_average_function(rho, s, 8);
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        const Vec p = rng.sphere_point();
        EXPECT_NEAR(avg(p), rho(p), 1e-15);
    }
    const Field x = describing_field_s5();
    const Field z = haar_average_field(x, 8);
    for (int i = 0; i < 20; ++i) {
        const Vec p = rng.sphere_point();
        EXPECT_LE((z(p) - x(p)).norm(), 1e-15 + 1e-13 * x(p).norm());
    }
}

TEST(Haar, AveragingIsIdempotentAndInvariant) {
    const Chart s = Chart::sphere5();
    const Vec q = SpherePoint::normalized(Vec{{1, 0.5, -0.3, 0.2, 0.7, -0.1}}).y;
    const ScalarFn rho = [q](const Vec& y) { return (y - q).squaredNorm(); };
    const ScalarFn once = haar_average_function(rho, s, 16);
    const ScalarFn twice = haar_average_function(once, s, 16);
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const Vec p = rng.sphere_point();
        EXPECT_NEAR(once(p), twice(p), 1e-13);
        EXPECT_NEAR(once(s.act(rng.angles(3), p)), once(p), 1e-13);
    }
}

TEST(Haar, FieldWithMeanZeroCoefficientVanishes) {
    const Chart t2 = Chart::product(0, 2);
    const Field z("sin*d2", t2, [](const Vec& p) -> Vec { return Vec{{0.0, std::sin(p[0])}}; });
    const Field avg = haar_average_field(z, 4);
    Rng rng(4);
    for (int i = 0; i < 10; ++i) EXPECT_LT(avg(rng.angles(2)).norm(), 1e-15);
}

TEST(S5Manifest, InventoryAndNotes) {
    const ConstructionManifest m = build_s5(s5_frequencies());
    std::set<int> interior;
    bool has_singular_set = false;
    for (const auto& f : m.inventory) {
        if (f.role == FiberRole::singular_set) {
            has_singular_set = true;
            EXPECT_TRUE(f.order_is_lower_bound);
            EXPECT_GE(f.order, 10);
        } else {
            interior.insert(f.order);
            // Representatives are rounded coordinates of exact zeros.
            EXPECT_LT(m.field(f.representative).stableNorm(), 1e-30);
        }
    }
    EXPECT_TRUE(has_singular_set);
    EXPECT_EQ(interior, (std::set<int>{2, 4, 6}));
    EXPECT_FALSE(m.notes.empty());
    const Json j = to_json(m);
    EXPECT_EQ(j["scenario"], "s5");
    EXPECT_EQ(j["inventory"].size(), m.inventory.size());
}

#include <torusflow/fields.hpp>
#include <torusflow/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace torusflow;

namespace {

double max_bracket(const Field& a, const Field& b, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec p;
        if (a.chart().kind() == ChartKind::sphere5) {
            p = rng.sphere_point();
        } else {
            p = Vec(a.chart().dimension());
            for (int d = 0; d < p.size(); ++d) {
                p[d] = a.chart().is_angle(d) ? rng.uniform(0, kTwoPi) : rng.uniform(-2, 2);
            }
        }
        worst = std::max(worst, lie_bracket(a, b, p).norm());
    }
    return worst;
}

}  // namespace

TEST(ModelFields, ClosedFormValues) {
    const Vec p{{0.5, -2.0, 1.0, 3.0}};
    const Vec a{{1.0, std::sqrt(2.0)}};
    const Vec xi = radial_field(2, 2)(p);
    EXPECT_EQ(xi, (Vec{{0.5, -2.0, 0.0, 0.0}}));
    const Vec t = affine_torus_field(a, 2)(p);
    EXPECT_EQ(t, (Vec{{0.0, 0.0, 1.0, std::sqrt(2.0)}}));
    EXPECT_EQ(radial_plus_affine(2, a)(p), xi + t);
    EXPECT_EQ(linear_basis_field(2, 2, 1, 0)(p), (Vec{{-2.0, 0.0, 0.0, 0.0}}));
    EXPECT_EQ(angle_field(2, 2, 1)(p), (Vec{{0.0, 0.0, 0.0, 1.0}}));
    EXPECT_EQ(zero_field(Chart::product(2, 2))(p), Vec::Zero(4));
}

TEST(ModelFields, ArithmeticIsPointwise) {
    const Field a = radial_field(1, 1);
    const Field b = affine_torus_field(Vec{{2.0}}, 1);
    const Vec p{{0.7, 1.0}};
    EXPECT_EQ((a + b)(p), a(p) + b(p));
    EXPECT_EQ((3.0 * a)(p), 3.0 * a(p));
    EXPECT_EQ(negated(b)(p), -b(p));
    EXPECT_LT((scaled([](const Vec& q) { return q[0] * q[0]; }, a)(p) - 0.49 * a(p)).norm(), 1e-15);
    EXPECT_THROW(a + radial_field(2, 1), std::invalid_argument);
}

TEST(LieBracket, MatchesClosedFormOnPolynomialFields) {
    // [x d/dx, x^2 d/dx] = x^2 d/dx.
    const Chart line = Chart::line();
    const Field a("x", line, [](const Vec& p) -> Vec { return p; });
    const Field b("x^2", line, [](const Vec& p) -> Vec { return Vec{{p[0] * p[0]}}; });
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
        EXPECT_NEAR(lie_bracket(a, b, Vec{{x}})[0], x * x, 1e-8);
        EXPECT_NEAR(lie_bracket_richardson(a, b, Vec{{x}})[0], x * x, 1e-10);
        EXPECT_NEAR(lie_bracket(b, a, Vec{{x}})[0], -x * x, 1e-8);
    }
}

TEST(LieBracket, CommutantBasisOfLinearModel) {
    const Vec a{{1.0, std::sqrt(2.0)}};
    const Field x = radial_plus_affine(2, a);
    for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) EXPECT_LT(max_bracket(x, linear_basis_field(2, 2, j, l), 100, 1), 1e-8);
    }
    for (int r = 0; r < 2; ++r) EXPECT_LT(max_bracket(x, angle_field(2, 2, r), 100, 2), 1e-12);
}

TEST(Jacobian, LinearFieldGivesItsMatrix) {
    const Mat j = jacobian(radial_plus_affine(2, Vec{{1.0, 3.0}}), Vec{{0.2, -0.4, 1.0, 2.0}});
    Mat expected = Mat::Zero(4, 4);
    expected(0, 0) = expected(1, 1) = 1.0;
    EXPECT_LT((j - expected).norm(), 1e-9);
}

TEST(IntegerRelations, DetectsRationalFrequencies) {
    EXPECT_TRUE(find_integer_relation(Vec{{1.0, 2.0}}).has_value());
    EXPECT_TRUE(find_integer_relation(Vec{{2.0, 3.0, 5.0}}).has_value());
    EXPECT_FALSE(find_integer_relation(Vec{{1.0, std::sqrt(2.0)}}).has_value());
    EXPECT_FALSE(find_integer_relation(s5_frequencies()).has_value());
    const Field t = affine_torus_field(Vec{{1.0, 2.0}}, 0, true);
    EXPECT_FALSE(t.metadata().density_warning.empty());
    const auto rel = *find_integer_relation(Vec{{1.0, 2.0}});
    EXPECT_EQ(rel[0] * 1 + rel[1] * 2, 0);
}

TEST(S5, FrequenciesAndDampingFactor) {
    const Vec a = s5_frequencies();
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], std::exp(1.0));
    EXPECT_DOUBLE_EQ(a[2], std::exp(2.0));
    EXPECT_DOUBLE_EQ(rho_s5(0.25, 0.25), std::pow(0.25 * 0.25 * 0.5, 10));
    std::set<int> orders;
    for (const auto& z : tau_s5_zeros()) {
        EXPECT_EQ(tau_s5(z.x1, z.x2), 0.0);
        orders.insert(z.order);
    }
    EXPECT_EQ(orders, (std::set<int>{2, 4, 6}));
    EXPECT_GT(tau_s5(0.3, 0.3), 0.0);
}

TEST(S5, FundamentalFieldsAreRotationsAndCommute) {
    const auto u = fundamental_fields_s5();
    ASSERT_EQ(u.size(), 3u);
    const Vec y{{1, 2, 3, 4, 5, 6}};
    EXPECT_EQ(u[0](y / y.norm()).head(2), (Vec{{-2, 1}} / y.norm()));
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) EXPECT_LT(max_bracket(u[i], u[j], 50, 3), 1e-10);
    }
}

TEST(S5, DescribingFieldIsTangentAndInvariant) {
    const Field x = describing_field_s5();
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        const Vec p = rng.sphere_point();
        const Vec lambda = rng.angles(3);
        EXPECT_NEAR(x(p).dot(p), 0.0, 1e-15);
        const Vec lhs = x(x.chart().act(lambda, p));
        const Vec rhs = x.chart().act_tangent(lambda, x(p));
        EXPECT_LT((lhs - rhs).norm(), 1e-15 + 1e-12 * x(p).norm());
    }
}

TEST(S5, UndampedFieldCommutesWithAction) {
    // Y' + sum a_r U_r before damping: the invariance does not rely on tau.
    const auto u = fundamental_fields_s5();
    const Vec a = s5_frequencies();
    Field sum = lifted_field_s5();
    for (int r = 0; r < 3; ++r) sum = sum + a[r] * u[static_cast<std::size_t>(r)];
    for (const auto& uj : u) EXPECT_LT(max_bracket(uj, sum, 200, 4), 1e-6);
    // and the bracket is not trivially small because the field is small.
    Rng rng(4);
    double scale = 0.0;
    for (int i = 0; i < 200; ++i) scale = std::max(scale, sum(rng.sphere_point()).norm());
    EXPECT_GT(scale, 1.0);
}

TEST(S5, LiftedFieldProjectsToBaseField) {
    // d pi(V_r) = 2 (1 - x1 - x2) x_r d/dx_r, so pi pushes Y' to Y with each
    // component multiplied by x_r.
    const Field yl = lifted_field_s5();
    const Field y = base_gradient_field();
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const Vec p = rng.sphere_point();
        const Vec b = Chart::sphere5().base(p);
        const double h = 1e-6;
        const Vec p1 = Chart::sphere5().normalize(p + h * yl(p));
        const Vec p0 = Chart::sphere5().normalize(p - h * yl(p));
        const Vec db = (Chart::sphere5().base(p1) - Chart::sphere5().base(p0)) / (2 * h);
        const Vec yb = y(b).cwiseProduct(b);
        EXPECT_LT((db - yb).norm(), 1e-7 * (1.0 + yb.norm()));
    }
}

TEST(S5, ConnectionFieldProjection) {
    const Vec y = SpherePoint::from_pairs(0.5, 0.25, 0.25).y;
    const Vec v = connection_fields_s5()[0](y);
    const Chart s = Chart::sphere5();
    const double h = 1e-6;
    const Vec db = (s.base(s.normalize(y + h * v)) - s.base(s.normalize(y - h * v))) / (2 * h);
    EXPECT_NEAR(db[0], 0.25, 1e-8);
    EXPECT_NEAR(db[1], 0.0, 1e-8);
    EXPECT_NEAR(v.dot(y), 0.0, 1e-15);
}

TEST(LineModels, SinkLocationsAndOrders) {
    const LineModel line = line_model_fields(LineBase::line, Vec{{1.0}});
    EXPECT_EQ(line.sinks, (std::vector<double>{1.0, 3.0}));
    EXPECT_EQ(line.sink_orders, (std::vector<int>{2, 4}));
    const LineModel circle = line_model_fields(LineBase::circle, Vec{{1.0, std::sqrt(2.0)}});
    EXPECT_EQ(circle.sink_orders, (std::vector<int>{2, 4, 6}));
    ASSERT_EQ(circle.sinks.size(), 3u);
    EXPECT_NEAR(circle.sinks[0], kPi / 3, 1e-15);
    EXPECT_NEAR(circle.sinks[1], kPi, 1e-15);
    EXPECT_NEAR(circle.sinks[2], 5 * kPi / 3, 1e-15);
    EXPECT_THROW(parse_line_base("plane"), std::invalid_argument);
}

TEST(LineModels, ZerosAreExactlyTheSinkFibers) {
    const LineModel m = line_model_fields(LineBase::line, Vec{{1.0}});
    Rng rng(6);
    for (double x : m.sinks) {
        for (int i = 0; i < 20; ++i) EXPECT_EQ(m.describing(Vec{{x, rng.uniform(0, kTwoPi)}}).norm(), 0.0);
    }
    for (double x : m.sources) {
        EXPECT_GT(m.describing(Vec{{x, 0.3}}).norm(), 0.0);
        // Y vanishes at sources, so X' is purely along the fiber there.
        EXPECT_EQ(m.describing(Vec{{x, 0.3}})[0], 0.0);
    }
}

TEST(Pushforward, TorusTranslationPreservesLinearModel) {
    const Field x = radial_plus_affine(1, Vec{{1.0, std::sqrt(2.0)}});
    const PointMap f = [](const Vec& p) {
        return Chart::product(1, 2).act(Vec{{0.4, 1.1}}, p);
    };
    EXPECT_LT(pushforward_residual(f, x, Vec{{0.3, 1.0, 2.0}}), 1e-9);
    const PointMap g = [](const Vec& p) -> Vec { return Vec{{p[0] + 1.0, p[1], p[2]}}; };
    EXPECT_NEAR(pushforward_residual(g, x, Vec{{0.3, 1.0, 2.0}}), 1.0, 1e-8);
}

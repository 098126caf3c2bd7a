#include <torusflow/radial_solver.hpp>
#include <torusflow/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace torusflow;

namespace {

std::vector<Vec> annulus_points(int k, int count, std::uint64_t seed, double r_min = 0.1, double r_max = 2.0) {
    Rng rng(seed);
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) pts.push_back(rng.annulus_point(k, r_min, r_max));
    return pts;
}

// Random cubic polynomial in k variables with a nonzero constant term.
struct Cubic {
    double c0;
    Vec lin;
    Mat quad;
    std::vector<Mat> cub;

    static Cubic random(int k, Rng& rng) {
        Cubic c{rng.uniform(-2, 2), Vec(k), Mat(k, k), {}};
        for (int i = 0; i < k; ++i) c.lin[i] = rng.uniform(-1, 1);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) c.quad(i, j) = rng.uniform(-1, 1);
        }
        for (int l = 0; l < k; ++l) {
            Mat m(k, k);
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) m(i, j) = rng.uniform(-0.5, 0.5);
            }
            c.cub.push_back(m);
        }
        return c;
    }

    double operator()(const Vec& x) const {
        double v = c0 + lin.dot(x) + x.dot(quad * x);
        for (std::size_t l = 0; l < cub.size(); ++l) v += x[static_cast<Eigen::Index>(l)] * x.dot(cub[l] * x);
        return v;
    }
};

}  // namespace

TEST(RadialSolver, RejectsNonzeroValueAtOrigin) {
    EXPECT_THROW(solve_radial([](const Vec& x) { return 1.0 + x[0]; }, 1), std::invalid_argument);
    RadialSolverOptions bad;
    bad.r_min = 2.0;
    bad.r_max = 1.0;
    EXPECT_THROW(solve_radial([](const Vec& x) { return x[0]; }, 1, bad), std::invalid_argument);
}

TEST(RadialSolver, ResidualOnAnnulus) {
    const std::vector<ScalarFn> gs{
        [](const Vec& x) { return x[0]; },
        [](const Vec& x) { return x[0] * x[0] * x[1]; },
        [](const Vec& x) { return std::sin(x[0]) * x[1]; },
    };
    const auto pts = annulus_points(2, 300, 1);
    for (const auto& g : gs) {
        const RadialSolution f = solve_radial(g, 2);
        EXPECT_LE(radial_residual(f, g, pts), 1e-6);
        EXPECT_EQ(f(Vec::Zero(2)), 0.0);
    }
}

TEST(RadialSolver, HomogeneousOracle) {
    // For g homogeneous of degree d, xi . (g / d) = g.
    Rng rng(2);
    const auto pts = annulus_points(3, 50, 3);
    for (int degree = 1; degree <= 6; ++degree) {
        for (int trial = 0; trial < 3; ++trial) {
            Eigen::VectorXi powers = Eigen::VectorXi::Zero(3);
            for (int i = 0; i < degree; ++i) ++powers[static_cast<int>(rng.uniform() * 3)];
            const ScalarFn g = [powers](const Vec& x) {
                double v = 1.0;
                for (int i = 0; i < 3; ++i) v *= std::pow(x[i], powers[i]);
                return v;
            };
            const RadialSolution f = solve_radial(g, 3);
            double worst = 0.0;
            for (const auto& x : pts) worst = std::max(worst, std::abs(f(x) - g(x) / degree));
            EXPECT_LE(worst, 1e-8) << "degree " << degree;
        }
    }
}

TEST(RadialSolver, LinearityInTheRightHandSide) {
    const ScalarFn g1 = [](const Vec& x) { return x[0] * x[1]; };
    const ScalarFn g2 = [](const Vec& x) { return std::sin(x[1]); };
    const ScalarFn sum = [&](const Vec& x) { return 2.0 * g1(x) - 3.0 * g2(x); };
    const RadialSolution f1 = solve_radial(g1, 2), f2 = solve_radial(g2, 2), fs = solve_radial(sum, 2);
    for (const auto& x : annulus_points(2, 30, 4)) EXPECT_NEAR(fs(x), 2.0 * f1(x) - 3.0 * f2(x), 1e-8);
}

TEST(RadialSolver, RadialDerivativeOfKnownFunction) {
    // xi . |x|^2 = 2 |x|^2
    const ScalarFn f = [](const Vec& x) { return x.squaredNorm(); };
    for (const auto& x : annulus_points(2, 20, 5)) EXPECT_NEAR(radial_derivative(f, x), 2.0 * x.squaredNorm(), 1e-7);
}

TEST(NormalForm, RecoversFrequenciesExactlyAndStraightens) {
    Rng rng(77);
    const int k = 2;
    for (int trial = 0; trial < 3; ++trial) {
        const Cubic c1 = Cubic::random(k, rng), c2 = Cubic::random(k, rng);
        const std::vector<ScalarFn> g{c1, c2};
        const NormalFormReport nf = normalize_lifted_field(k, g);
        ASSERT_EQ(nf.frequencies.size(), 2);
        EXPECT_EQ(nf.frequencies[0], c1(Vec::Zero(k)));
        EXPECT_EQ(nf.frequencies[1], c2(Vec::Zero(k)));

        const Field lifted = lifted_radial_field(k, g);
        const Field target = nf.normal_form();
        const PointMap map = nf.map();
        double worst = 0.0;
        for (const auto& x : annulus_points(k, 100, 10 + trial)) {
            Vec p(k + 2);
            p.head(k) = x;
            p.tail(2) = rng.angles(2);
            worst = std::max(worst, pushforward_residual(map, lifted, p, 1e-4, &target));
        }
        EXPECT_LE(worst, 1e-6);
    }
}

TEST(NormalForm, TransformFixesBase) {
    const std::vector<ScalarFn> g{[](const Vec& x) { return 1.0 + x[0]; }};
    const NormalFormReport nf = normalize_lifted_field(1, g);
    const Vec p{{0.5, 1.0}};
    const Vec q = nf.transform(p);
    EXPECT_EQ(q[0], 0.5);
    // phi = x for g - g(0) = x, so theta moves by -0.5.
    EXPECT_NEAR(q[1], 0.5, 1e-9);
}

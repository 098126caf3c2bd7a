#include "torusflow/radial_solver.hpp"

#include "torusflow/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace torusflow {

namespace {

double estimate_lipschitz(const ScalarFn& g, int k, double radius) {
    Rng rng(0x5eedULL);
    const double h = 1e-6;
    double best = 0.0;
    for (int i = 0; i < 256; ++i) {
        const Vec x = rng.ball_point(k, radius);
        Vec grad(k);
        for (int j = 0; j < k; ++j) {
            Vec e = Vec::Zero(k);
            e[j] = h;
            grad[j] = (g(x + e) - g(x - e)) / (2.0 * h);
        }
        best = std::max(best, grad.norm());
    }
    // Sampling underestimates the supremum; pad it.
    return 2.0 * best + 1e-300;
}

}  // namespace

RadialSolution::RadialSolution(ScalarFn g, int k, RadialSolverOptions options,
                               QuadratureSpec quadrature, double tail_bound)
    : g_(std::move(g)),
      k_(k),
      options_(options),
      quadrature_(quadrature),
      tail_bound_(tail_bound),
      evaluations_(std::make_shared<long>(0)) {}

double RadialSolution::operator()(const Vec& x) const {
    if (x.size() != k_) throw std::invalid_argument("RadialSolution: wrong dimension");
    if (x.norm() == 0.0) return 0.0;
    using Rule = boost::math::quadrature::gauss<double, 15>;
    long evals = 0;
    double total = 0.0;
    const auto& breaks = quadrature_.breaks;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        total += Rule::integrate(
            [&](double u) {
                ++evals;
                return g_(u * x) / u;
            },
            breaks[i], breaks[i + 1]);
    }
    // Tail over (0, u_min): exact for the linear part of g.
    total += g_(breaks.front() * x);
    *evaluations_ = evals + 1;
    return total;
}

RadialSolution solve_radial(const ScalarFn& g, int k, const RadialSolverOptions& options) {
    if (k < 1) throw std::invalid_argument("solve_radial: k must be >= 1");
    if (!(options.r_min > 0.0) || !(options.r_max > options.r_min)) {
        throw std::invalid_argument("solve_radial: need 0 < r_min < r_max");
    }
    if (!(options.tol > 0.0)) throw std::invalid_argument("solve_radial: tol must be positive");
    const double g0 = g(Vec::Zero(k));
    if (!(std::abs(g0) <= 1e-12)) {
        throw std::invalid_argument("solve_radial: g(0) must vanish (got " + std::to_string(g0) +
                                    ")");
    }
    const double lip =
        options.lipschitz > 0.0 ? options.lipschitz : estimate_lipschitz(g, k, options.r_max);

    if (!(options.panel_ratio > 1.0)) throw std::invalid_argument("solve_radial: panel_ratio must exceed 1");
    QuadratureSpec quad;
    double tail = std::numeric_limits<double>::infinity();
    if (std::isfinite(lip)) {
        quad.s_min = std::log(options.tol * options.r_min / lip);
        // The tail replaced by g(u_min x) is still bounded by L |x| u_min.
        tail = lip * options.r_max * std::exp(quad.s_min);
    } else {
        quad.s_min = std::log(options.tol);
    }
    for (double u = std::exp(quad.s_min); u < 1.0; u *= options.panel_ratio) quad.breaks.push_back(u);
    quad.breaks.push_back(1.0);
    return RadialSolution(g, k, options, quad, tail);
}

double radial_derivative(const ScalarFn& f, const Vec& x, double h) {
    return (f(std::exp(h) * x) - f(std::exp(-h) * x)) / (2.0 * h);
}

double radial_residual(const RadialSolution& f, const ScalarFn& g, const std::vector<Vec>& points,
                       double h) {
    const ScalarFn fn = [&f](const Vec& x) { return f(x); };
    double worst = 0.0;
    for (const Vec& x : points) worst = std::max(worst, std::abs(radial_derivative(fn, x, h) - g(x)));
    return worst;
}

// ---------------------------------------------------------------------------

Vec NormalFormReport::transform(const Vec& p) const {
    const int n = static_cast<int>(frequencies.size());
    Vec out = p;
    const Vec x = p.head(k);
    for (int r = 0; r < n; ++r) out[k + r] = wrap_angle(p[k + r] - correctors[r](x));
    return out;
}

PointMap NormalFormReport::map() const {
    return [report = *this](const Vec& p) { return report.transform(p); };
}

Field NormalFormReport::normal_form() const { return radial_plus_affine(k, frequencies, false); }

Field lifted_radial_field(int k, const std::vector<ScalarFn>& g) {
    const int n = static_cast<int>(g.size());
    if (k < 1 || n < 1) throw std::invalid_argument("lifted_radial_field: need k, n >= 1");
    return Field("xi+sum g_r d/dtheta_r", Chart::product(k, n), [k, n, g](const Vec& p) -> Vec {
        Vec v(k + n);
        const Vec x = p.head(k);
        v.head(k) = x;
        for (int r = 0; r < n; ++r) v[k + r] = g[r](x);
        return v;
    });
}

NormalFormReport normalize_lifted_field(int k, const std::vector<ScalarFn>& g,
                                        const RadialSolverOptions& options) {
    NormalFormReport report;
    report.k = k;
    report.frequencies.resize(static_cast<Eigen::Index>(g.size()));
    for (std::size_t r = 0; r < g.size(); ++r) {
        const double b = g[r](Vec::Zero(k));
        report.frequencies[static_cast<Eigen::Index>(r)] = b;
        const ScalarFn centered = [gr = g[r], b](const Vec& x) { return gr(x) - b; };
        report.correctors.push_back(solve_radial(centered, k, options));
    }
    return report;
}

}  // namespace torusflow

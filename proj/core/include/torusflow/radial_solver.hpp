#pragma once

#include "torusflow/fields.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace torusflow {

/// Solves xi . f = g for g with g(0) = 0 by integrating g backward along the
/// radial flow:
///
///     f(x) = integral_{-inf}^{0} g(e^s x) ds = integral_0^1 g(u x) / u du.
///
/// The integral is truncated at u_min = e^{s_min}; the discarded piece is
/// replaced by g(u_min x), which is exact for the linear part of g, so the
/// remaining tail error is O(u_min^2). [u_min, 1] is split into panels whose
/// endpoints grow geometrically, each integrated by 15-point Gauss-Legendre:
/// exact for polynomial g of degree <= 30.
struct RadialSolverOptions {
    double r_min = 0.1;
    double r_max = 2.0;
    double tol = 1e-10;
    /// Lipschitz bound of g on the ball of radius r_max; estimated by sampling
    /// when not positive.
    double lipschitz = 0.0;
    /// Ratio between consecutive panel endpoints.
    double panel_ratio = 2.0;
};

struct QuadratureSpec {
    double s_min = 0.0;
    std::vector<double> breaks;  ///< panel endpoints from u_min to 1
};

class RadialSolution {
public:
    RadialSolution(ScalarFn g, int k, RadialSolverOptions options, QuadratureSpec quadrature,
                   double tail_bound);

    /// f(x); f(0) = 0.
    double operator()(const Vec& x) const;

    int dimension() const { return k_; }
    const RadialSolverOptions& options() const { return options_; }
    const QuadratureSpec& quadrature() const { return quadrature_; }
    /// Bound on the truncated tail at r_max (before the linear correction).
    double tail_bound() const { return tail_bound_; }
    bool tail_converged() const { return tail_bound_ <= options_.tol; }
    /// Number of integrand evaluations spent on the last call (diagnostic).
    long last_evaluations() const { return *evaluations_; }

private:
    ScalarFn g_;
    int k_;
    RadialSolverOptions options_;
    QuadratureSpec quadrature_;
    double tail_bound_;
    std::shared_ptr<long> evaluations_;
};

/// Throws std::invalid_argument when |g(0)| > 1e-12 or the annulus is invalid.
RadialSolution solve_radial(const ScalarFn& g, int k, const RadialSolverOptions& options = {});

/// xi . f (x) by central differences along the radial flow: (f(e^h x) - f(e^-h x)) / 2h.
double radial_derivative(const ScalarFn& f, const Vec& x, double h = 1e-4);

/// Sup norm of |xi . f - g| over the given points.
double radial_residual(const RadialSolution& f, const ScalarFn& g, const std::vector<Vec>& points,
                       double h = 1e-4);

/// Result of straightening xi + sum g_r(x) d/dtheta_r into xi + sum b_r d/dtheta_r.
struct NormalFormReport {
    int k = 0;
    Vec frequencies;                       ///< b_r = g_r(0)
    std::vector<RadialSolution> correctors;  ///< phi_r with xi . phi_r = g_r - g_r(0)

    /// (x, theta) -> (x, theta - phi(x)), angles wrapped.
    Vec transform(const Vec& p) const;
    PointMap map() const;
    /// xi + sum b_r d/dtheta_r on product(k, n).
    Field normal_form() const;
};

/// The lifted field xi + sum g_r d/dtheta_r on product(k, n), n = g.size().
Field lifted_radial_field(int k, const std::vector<ScalarFn>& g);

NormalFormReport normalize_lifted_field(int k, const std::vector<ScalarFn>& g,
                                        const RadialSolverOptions& options = {});

}  // namespace torusflow

#pragma once

#include "torusflow/fields.hpp"

#include <string>
#include <vector>

namespace torusflow {

/// A describing field together with the bookkeeping needed to verify it.
struct ConstructionManifest {
    std::string scenario;
    Field field;
    /// Zeros of the field: singular fibers with their declared orders.
    std::vector<FiberDecl> inventory;
    Vec frequencies;
    bool declared_dense = false;
    std::string density_warning;
    std::vector<std::string> notes;
};

/// Throws std::logic_error if two inventory entries share an order.
void require_distinct_orders(const std::vector<FiberDecl>& inventory);

/// tau (Y + T) on line x T^n or circle x T^n.
ConstructionManifest build_line_describing(LineBase base, const Vec& a, bool declared_dense = true);

struct PlanarDemoOptions {
    std::vector<int> orders{2, 4, 6};  ///< one even order per artificial singularity
    std::vector<double> ray_angles{0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0};
    double radius = 1.0;               ///< distance of the artificial singularities from the source
    double source_rate = 1.0;          ///< linear part of Y at the source is rate * identity
    Vec frequencies = Vec{{1.0}};
    bool declared_dense = true;
};

/// Base R^2 with the single source Y = c xi / (1 + |x|^2) and three
/// artificial singularities on distinct rays; trivial bundle R^2 x T^n with
/// the product connection, so the lift of Y is Y itself.
ConstructionManifest build_planar_demo(const PlanarDemoOptions& options = {});

/// h(t) = exp(-1/t) for t > 0, 0 otherwise.
double flat_damping(double t);

/// (h o gauge) * field. The gauge is sampled on 1000 deterministic chart
/// points and rejected with std::invalid_argument if negative anywhere.
Field apply_effective_damping(const Field& field, const ScalarFn& gauge,
                              const std::string& gauge_name = "gauge");

/// Average of rho over the torus orbit, by the N-point trapezoid rule on each
/// circle factor (exact for trigonometric polynomials of degree < N/2 per angle).
ScalarFn haar_average_function(const ScalarFn& rho, const Chart& chart, int nodes);

/// Average of the pulled-back field (lambda^{-1})_* Z(lambda . p) over the torus.
Field haar_average_field(const Field& z, int nodes);

/// (tau o pi)(Y' + a_1 U_1 + a_2 U_2 + a_3 U_3) on S^5.
ConstructionManifest build_s5(const Vec& a = s5_frequencies());

}  // namespace torusflow

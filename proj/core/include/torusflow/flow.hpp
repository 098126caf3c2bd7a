#pragma once

#include "torusflow/fields.hpp"
#include "torusflow/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusflow {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  ///< 0 selects automatically
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
    /// Largest accepted local error estimate, in units of the mixed
    /// tolerance atol + rtol |y|; always <= 1.
    double max_error_ratio = 0.0;
    /// Largest accepted local error estimate in absolute terms (max norm).
    double max_local_error = 0.0;
    /// Step size the controller proposes next; seeds a continuation run.
    double next_step = 0.0;
};

struct Trajectory {
    Chart chart = Chart::line();
    std::vector<double> times;
    std::vector<Vec> points;
    StepStats stats;

    const Vec& final_point() const { return points.back(); }
};

/// Integration failed; `where` is the last accepted state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time, Vec where)
        : std::runtime_error(what), time_(time), where_(std::move(where)) {}
    double time() const { return time_; }
    const Vec& where() const { return where_; }

private:
    double time_;
    Vec where_;
};

/// Called after every accepted step with the (normalized) state. Return
/// false to stop early.
using StepObserver = std::function<bool(double t, const Vec& p)>;

/// Dormand-Prince 5(4) with PI step-size control. Sphere points are
/// renormalized and angles wrapped after each accepted step. With
/// `output_times` (sorted, inside [t0, t1]) the trajectory holds cubic
/// Hermite dense output at exactly those times; otherwise every accepted step.
/// Requires t1 >= t0; use flow_map or a negated field for backward time.
Trajectory integrate(const Field& field, const Vec& p0, double t0, double t1,
                     const IntegratorConfig& cfg = {},
                     const std::vector<double>& output_times = {},
                     const StepObserver& observer = {});

/// Phi_t(p0) for t of either sign.
Vec flow_map(const Field& field, const Vec& p0, double t, const IntegratorConfig& cfg = {});

/// Chart distance between Phi_t(lambda . p0) and lambda . Phi_t(p0).
double flow_commutation_residual(const Field& field, const Vec& lambda, const Vec& p0, double t,
                                 const IntegratorConfig& cfg = {});

// --- limit sets ------------------------------------------------------------

enum class LimitKind { fixed_point, singular_fiber, torus_closure, escape, inconclusive };
std::string to_string(LimitKind kind);

enum class TimeDirection { forward, backward };

struct LimitSetReport {
    LimitKind kind = LimitKind::inconclusive;
    std::string target;          ///< declared fiber id, when one is involved
    double final_distance = 0.0; ///< base distance to the target (or step size for fixed points)
    double horizon_used = 0.0;   ///< in units of the initial arc length
    Vec final_point;
    long steps = 0;
    std::string note;  ///< why the run stopped early, if it did
};

struct ClassifyConfig {
    IntegratorConfig integrator{1e-9, 1e-14};
    /// singular_fiber: base distance below this ...
    double fiber_tolerance = 1e-5;
    /// ... and non-increasing (or entirely within the tolerance) over this
    /// trailing fraction of the horizon.
    double tail_fraction = 0.1;
    /// torus_closure: base displacement stays below this ...
    double base_stationary_tolerance = 1e-6;
    /// ... and the orbit returns within delta of its start.
    double recurrence_delta = 1e-3;
    double recurrence_horizon = 2e4;
    double recurrence_max_step = 0.05;
    double escape_radius = 1e6;
    /// Horizons grow geometrically from first_horizon until the limit is
    /// recognised or the requested horizon is reached.
    double first_horizon = 1.0;
    double horizon_growth = 10.0;
    long max_steps = 400'000;
    /// The field is integrated as X / (|X| + speed_floor |X(p0)|).
    double speed_floor = 1e-3;
};

/// Classifies the alpha- (backward) or omega-limit (forward) of p0 against the
/// fibers declared in the field's metadata. The orbits are followed with the
/// time change X / (|X| + speed_floor |X(p0)|), so the horizon is roughly an
/// arc length away from zeros of X.
LimitSetReport classify_limit(const Field& field, const Vec& p0, TimeDirection direction,
                              double horizon, const ClassifyConfig& cfg = {});

struct BasinCensus {
    std::vector<std::string> assignment;  ///< source id per sample, "" if unclassified
    std::map<std::string, int> counts;
    double classified_fraction = 0.0;
    double unclassified_fraction = 0.0;
    std::uint64_t seed = 0;
};

using PointSampler = std::function<Vec(Rng&)>;

/// Backward-classifies `samples` points drawn by `sampler` (sample i uses
/// Rng(Rng::derive(seed, i))) and counts how many reach a declared source fiber.
BasinCensus basin_census(const Field& field, int samples, std::uint64_t seed,
                         const PointSampler& sampler, double horizon = 1e24,
                         const ClassifyConfig& cfg = {});

/// Uniform sampler over the natural desk-scale region of a chart: the first
/// base coordinate in [lo, hi] (line/product) or the full circle, angles uniform.
PointSampler box_sampler(const Chart& chart, double lo, double hi);

// --- singularity orders ----------------------------------------------------

struct SingularityReport {
    Vec location;
    double estimated_order = 0.0;
    int declared_order = 0;
    bool declared_lower_bound = false;
    double r_squared = 0.0;
    std::vector<double> radii;
    std::vector<double> direction_slopes;
    bool degenerate = false;
    bool passed = false;
};

struct OrderOptions {
    std::vector<double> radii;  ///< decreasing; default 8 log-spaced over [1e-4, 1e-2]
    int directions = 4;
    std::uint64_t seed = 7;
    double order_tolerance = 0.2;
    double min_r_squared = 0.99;
};

std::vector<double> log_spaced(double from, double to, int count);

/// Slope of log|X| against log(distance to p) along probe rays; median over
/// directions. The declared order comes from the nearest metadata fiber.
SingularityReport estimate_order(const Field& field, const Vec& p, const OrderOptions& options = {});

/// Total-variation distance in [0, 1] between the empirical distribution of
/// fiber angles over bins^n cells and the uniform measure. Throws
/// std::invalid_argument when the trajectory's base moves by more than
/// `base_tolerance`.
double equidistribution_discrepancy(const Trajectory& trajectory, int bins,
                                    double base_tolerance = 1e-6);

/// Base-space distance (angular on the circle).
double base_distance(const Chart& chart, const Vec& base_a, const Vec& base_b);

}  // namespace torusflow

#include "torusflow/flow.hpp"

#include "torusflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torusflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.17;  // PI controller exponents (Gustafsson)
constexpr double kBeta = 0.04;

double error_ratio(const Vec& err, const Vec& y0, const Vec& y1, const IntegratorConfig& cfg) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

double initial_step(const Field& f, const Vec& y0, const Vec& f0, double span,
                    const IntegratorConfig& cfg) {
    auto rms = [&](const Vec& v) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = cfg.atol + cfg.rtol * std::abs(y0[i]);
            s += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(s / static_cast<double>(v.size()));
    };
    const double d0 = rms(y0), d1 = rms(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec f1 = f(y0 + h0 * f0);
    const double d2 = rms(f1 - f0) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
}

Vec hermite(const Vec& y0, const Vec& y1, const Vec& f0, const Vec& f1, double h, double s) {
    // Increment form: returns y0 exactly when the state does not move.
    const double s2 = s * s, s3 = s2 * s;
    return y0 + (3 * s2 - 2 * s3) * (y1 - y0) + h * ((s3 - 2 * s2 + s) * f0 + (s3 - s2) * f1);
}

}  // namespace

Trajectory integrate(const Field& field, const Vec& p0, double t0, double t1,
                     const IntegratorConfig& cfg, const std::vector<double>& output_times,
                     const StepObserver& observer) {
    const Chart& chart = field.chart();
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: need t1 >= t0");
    if (!chart.contains(p0, 1e-6)) {
        throw std::domain_error("integrate: initial point outside chart " + chart.tag());
    }
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] < t0 || output_times[i] > t1 ||
            (i > 0 && !(output_times[i] > output_times[i - 1]))) {
            throw std::invalid_argument("integrate: output times must increase inside [t0, t1]");
        }
    }

    Trajectory traj;
    traj.chart = chart;
    const bool dense = !output_times.empty();
    std::size_t next_out = 0;

    Vec y = chart.normalize(p0);
    Vec f = field(y);
    ++traj.stats.evaluations;

    auto record = [&](double t, const Vec& p) {
        traj.times.push_back(t);
        traj.points.push_back(p);
    };
    if (dense) {
        while (next_out < output_times.size() && output_times[next_out] == t0) {
            record(t0, y);
            ++next_out;
        }
    } else {
        record(t0, y);
    }
    if (t1 == t0) return traj;

    double t = t0;
    double h = cfg.initial_step > 0.0 ? cfg.initial_step : initial_step(field, y, f, t1 - t0, cfg);
    traj.stats.evaluations += cfg.initial_step > 0.0 ? 0 : 1;
    // Near a zero the heuristic can propose steps below the resolution of t.
    h = std::max(h, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(t0));
    h = std::min(h, cfg.max_step);
    double err_prev = 1e-4;
    bool last_rejected = false;

    while (t < t1) {
        if (traj.stats.accepted + traj.stats.rejected >= cfg.max_steps) {
            throw IntegrationError("integrate: step budget exhausted at t=" + std::to_string(t), t, y);
        }
        const bool final_step = t + h >= t1;
        if (final_step) h = t1 - t;
        const double resolution = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (final_step && h <= resolution) {
            // t1 is within rounding of t: finish without a step.
            t = t1;
            if (dense) {
                while (next_out < output_times.size()) record(output_times[next_out++], y);
            } else {
                traj.times.back() = t1;
            }
            break;
        }
        if (h <= resolution) {
            throw IntegrationError("integrate: step size underflow at t=" + std::to_string(t), t, y);
        }

        const Vec& k1 = f;
        const Vec k2 = field(y + h * (a21 * k1));
        const Vec k3 = field(y + h * (a31 * k1 + a32 * k2));
        const Vec k4 = field(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = field(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = field(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = field(y_new);
        traj.stats.evaluations += 6;
        const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double ratio = error_ratio(err, y, y_new, cfg);
        if (!std::isfinite(ratio) || !y_new.allFinite()) ratio = 1e10;

        if (ratio <= 1.0) {
            const double t_new = final_step ? t1 : t + h;
            if (dense) {
                while (next_out < output_times.size() && output_times[next_out] <= t_new) {
                    const double s = (output_times[next_out] - t) / h;
                    record(output_times[next_out], chart.normalize(hermite(y, y_new, f, k7, h, s)));
                    ++next_out;
                }
            }
            Vec y_next = chart.normalize(y_new);
            if (!chart.contains(y_next, 1e-6)) {
                throw IntegrationError("integrate: trajectory left chart " + chart.tag(), t_new, y);
            }
            traj.stats.max_error_ratio = std::max(traj.stats.max_error_ratio, ratio);
            traj.stats.max_local_error = std::max(traj.stats.max_local_error, err.cwiseAbs().maxCoeff());
            ++traj.stats.accepted;
            t = t_new;
            if (chart.kind() == ChartKind::sphere5) {
                f = field(y_next);
                ++traj.stats.evaluations;
            } else {
                f = k7;  // angle wrapping leaves periodic fields unchanged
            }
            y = std::move(y_next);
            if (!dense) record(t, y);
            if (observer && !observer(t, y)) break;

            double factor = kSafety * std::pow(std::max(ratio, 1e-10), -kAlpha) *
                            std::pow(err_prev, kBeta);
            factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * factor, cfg.max_step);
            traj.stats.next_step = h;
            err_prev = std::max(ratio, 1e-4);
            last_rejected = false;
        } else {
            ++traj.stats.rejected;
            h *= std::max(0.2, kSafety * std::pow(ratio, -0.2));
            last_rejected = true;
        }
    }
    return traj;
}

Vec flow_map(const Field& field, const Vec& p0, double t, const IntegratorConfig& cfg) {
    if (t >= 0.0) return integrate(field, p0, 0.0, t, cfg).final_point();
    return integrate(negated(field), p0, 0.0, -t, cfg).final_point();
}

double flow_commutation_residual(const Field& field, const Vec& lambda, const Vec& p0, double t,
                                 const IntegratorConfig& cfg) {
    const Chart& chart = field.chart();
    const Vec moved_then_flowed = flow_map(field, chart.act(lambda, p0), t, cfg);
    const Vec flowed_then_moved = chart.act(lambda, flow_map(field, p0, t, cfg));
    return chart.distance(moved_then_flowed, flowed_then_moved);
}

// ---------------------------------------------------------------------------

std::string to_string(LimitKind kind) {
    switch (kind) {
        case LimitKind::fixed_point: return "fixed_point";
        case LimitKind::singular_fiber: return "singular_fiber";
        case LimitKind::torus_closure: return "torus_closure";
        case LimitKind::escape: return "escape";
        case LimitKind::inconclusive: return "inconclusive";
    }
    return "?";
}

double base_distance(const Chart& chart, const Vec& a, const Vec& b) {
    if (chart.kind() == ChartKind::circle) return angular_distance(a[0], b[0]);
    return (a - b).norm();
}

namespace {

struct Recurrence {
    bool found = false;
    double time = 0.0;
    double closest = std::numeric_limits<double>::infinity();
};

// Integrates with a capped step and looks for a return within delta of the
// start, measured against the chord between consecutive accepted states.
Recurrence search_recurrence(const Field& g, const Vec& start, const ClassifyConfig& cfg,
                             long& steps) {
    const Chart& chart = g.chart();
    const Vec base0 = chart.base(start);
    Recurrence rec;
    bool left = false;
    bool drifted = false;
    Vec prev = start;
    IntegratorConfig ic = cfg.integrator;
    ic.max_step = cfg.recurrence_max_step;
    ic.max_steps = cfg.max_steps;
    auto observer = [&](double t, const Vec& p) {
        if (base_distance(chart, chart.base(p), base0) > cfg.base_stationary_tolerance) {
            drifted = true;
            return false;
        }
        const Vec a = chart.displacement(start, prev);
        const Vec b = chart.displacement(start, p);
        prev = p;
        if (!left) {
            left = b.norm() > 10.0 * cfg.recurrence_delta;
            return true;
        }
        const Vec ab = b - a;
        const double denom = ab.squaredNorm();
        const double s = denom > 0.0 ? std::clamp(-a.dot(ab) / denom, 0.0, 1.0) : 0.0;
        const double d = (a + s * ab).norm();
        rec.closest = std::min(rec.closest, d);
        if (d <= cfg.recurrence_delta) {
            rec.found = true;
            rec.time = t;
            return false;
        }
        return true;
    };
    try {
        const Trajectory tr = integrate(g, start, 0.0, cfg.recurrence_horizon, ic, {0.0}, observer);
        steps += tr.stats.accepted;
    } catch (const IntegrationError&) {
        return rec;
    }
    if (drifted) rec.found = false;
    return rec;
}

}  // namespace

LimitSetReport classify_limit(const Field& field, const Vec& p0, TimeDirection direction,
                              double horizon, const ClassifyConfig& cfg) {
    if (!(horizon > 0.0)) throw std::invalid_argument("classify_limit: horizon must be positive");
    const Chart& chart = field.chart();
    const auto& fibers = field.metadata().fibers;
    const Vec start = chart.normalize(p0);

    LimitSetReport report;
    report.final_point = start;

    auto nearest_fiber = [&](const Vec& base) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < fibers.size(); ++i) {
            if (fibers[i].base.size() != base.size()) continue;
            const double d = base_distance(chart, base, fibers[i].base);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        return std::pair<int, double>{best, best_d};
    };

    const double speed0 = field(start).norm();
    if (speed0 == 0.0) {
        report.kind = LimitKind::fixed_point;
        const auto [idx, d] = nearest_fiber(chart.base(start));
        if (idx >= 0 && d < cfg.fiber_tolerance) report.target = fibers[idx].id;
        report.final_distance = 0.0;
        return report;
    }

    // Orbit-equivalent time change: unit speed where |X| is large, linear
    // near zeros. Keeps the damping factor's dynamic range out of the step size.
    const double sign = direction == TimeDirection::forward ? 1.0 : -1.0;
    const double floor = cfg.speed_floor * speed0;
    const Field g("reparametrized " + field.name(), chart,
                  [field, sign, floor](const Vec& p) -> Vec {
                      const Vec v = field(p);
                      return (sign / (v.norm() + floor)) * v;
                  },
                  field.metadata());

    const Vec base0 = chart.base(start);
    std::vector<double> times{0.0};
    std::vector<Vec> bases{base0};
    std::vector<Vec> points{start};
    double max_base_disp = 0.0;
    bool escaped = false;

    auto observer = [&](double t, const Vec& p) {
        times.push_back(t);
        bases.push_back(chart.base(p));
        points.push_back(p);
        max_base_disp = std::max(max_base_disp, base_distance(chart, bases.back(), base0));
        if (chart.kind() == ChartKind::product && bases.back().size() > 0 &&
            bases.back().norm() > cfg.escape_radius) {
            escaped = true;
            return false;
        }
        return true;
    };

    IntegratorConfig ic = cfg.integrator;
    double t = 0.0;
    Vec p = start;
    double target_time = std::min(cfg.first_horizon, horizon);
    bool recurrence_tested = false;
    long steps = 0;

    while (true) {
        ic.max_steps = std::max(1L, cfg.max_steps - steps);
        try {
            const Trajectory tr = integrate(g, p, t, target_time, ic, {t}, observer);
            steps += tr.stats.accepted;
            ic.initial_step = tr.stats.next_step;
        } catch (const IntegrationError& e) {
            // Budget exhausted or chart left: judge what was recorded so far.
            steps = cfg.max_steps;
            report.note = e.what();
        }
        p = points.back();
        t = times.back();
        report.final_point = p;
        report.horizon_used = t;
        report.steps = steps;

        if (escaped) {
            report.kind = LimitKind::escape;
            report.final_distance = bases.back().norm();
            return report;
        }

        // Last sample at or before the trailing window, so the window always
        // spans at least one step even when steps are long.
        const double window_start = (1.0 - cfg.tail_fraction) * t;
        std::size_t anchor = 0;
        while (anchor + 2 < times.size() && times[anchor + 1] <= window_start) ++anchor;

        // Approach to a declared fiber, monotone over the trailing window.
        const auto [idx, d_end] = nearest_fiber(bases.back());
        if (idx >= 0 && d_end < cfg.fiber_tolerance) {
            // Either monotone, or already captured: once inside the tolerance
            // an explicit scheme may jitter around a stiff attractor.
            bool monotone = true;
            double last = std::numeric_limits<double>::infinity();
            double tail_max = 0.0;
            for (std::size_t i = anchor; i < times.size(); ++i) {
                const double d = base_distance(chart, bases[i], fibers[idx].base);
                if (d > last * (1.0 + 1e-9) + 1e-300) monotone = false;
                tail_max = std::max(tail_max, d);
                last = d;
            }
            if (monotone || tail_max < cfg.fiber_tolerance) {
                report.kind = LimitKind::singular_fiber;
                report.target = fibers[idx].id;
                report.final_distance = d_end;
                return report;
            }
        }

        if (!recurrence_tested && steps < cfg.max_steps && max_base_disp <= cfg.base_stationary_tolerance) {
            recurrence_tested = true;
            const Recurrence rec = search_recurrence(g, start, cfg, steps);
            if (rec.found) {
                report.kind = LimitKind::torus_closure;
                if (idx >= 0 && d_end < cfg.fiber_tolerance) report.target = fibers[idx].id;
                report.final_distance = d_end;
                report.horizon_used = rec.time;
                report.steps = steps;
                return report;
            }
        }

        // Convergence to a zero that is not a declared fiber. A slow
        // (algebraic) approach to a declared fiber does not count.
        bool approaching = false;
        if (idx >= 0) {
            const std::size_t i = anchor;
            approaching = base_distance(chart, bases.back(), fibers[idx].base) <
                          base_distance(chart, bases[i], fibers[idx].base);
        }
        if (!approaching && g(p).norm() < cfg.fiber_tolerance) {
            const double drift = chart.distance(points[anchor], p);
            if (drift < cfg.fiber_tolerance) {
                report.kind = LimitKind::fixed_point;
                report.final_distance = drift;
                return report;
            }
        }

        if (target_time >= horizon || steps >= cfg.max_steps) break;
        target_time = std::min(target_time * cfg.horizon_growth, horizon);
    }
    report.kind = LimitKind::inconclusive;
    return report;
}

BasinCensus basin_census(const Field& field, int samples, std::uint64_t seed,
                         const PointSampler& sampler, double horizon, const ClassifyConfig& cfg) {
    if (samples < 1) throw std::invalid_argument("basin_census: need at least one sample");
    BasinCensus census;
    census.seed = seed;
    census.assignment.assign(static_cast<std::size_t>(samples), std::string{});
    const auto& fibers = field.metadata().fibers;
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        Rng rng(Rng::derive(seed, i));
        const Vec p = sampler(rng);
        const LimitSetReport r = classify_limit(field, p, TimeDirection::backward, horizon, cfg);
        if (r.kind != LimitKind::singular_fiber && r.kind != LimitKind::torus_closure) return;
        for (const auto& f : fibers) {
            if (f.id == r.target && f.role == FiberRole::source) census.assignment[i] = f.id;
        }
    });
    int classified = 0;
    for (const auto& a : census.assignment) {
        if (a.empty()) continue;
        ++classified;
        ++census.counts[a];
    }
    census.classified_fraction = static_cast<double>(classified) / samples;
    census.unclassified_fraction = 1.0 - census.classified_fraction;
    return census;
}

PointSampler box_sampler(const Chart& chart, double lo, double hi) {
    return [chart, lo, hi](Rng& rng) -> Vec {
        switch (chart.kind()) {
            case ChartKind::product: {
                Vec p(chart.dimension());
                for (int i = 0; i < chart.k(); ++i) p[i] = rng.uniform(lo, hi);
                for (int i = chart.k(); i < chart.dimension(); ++i) p[i] = rng.uniform(0.0, kTwoPi);
                return p;
            }
            case ChartKind::circle: return rng.angles(chart.dimension());
            case ChartKind::sphere5: return rng.sphere_point(6);
            case ChartKind::triangle: {
                double u = rng.uniform(), v = rng.uniform();
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                return Vec{{u, v}};
            }
        }
        return Vec{};
    };
}

// ---------------------------------------------------------------------------

std::vector<double> log_spaced(double from, double to, int count) {
    if (count < 2 || !(from > 0.0) || !(to > 0.0)) throw std::invalid_argument("log_spaced");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log(from), b = std::log(to);
    for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
    return out;
}

namespace {

struct Fit {
    double slope = 0.0;
    double r_squared = 0.0;
    bool ok = false;
};

Fit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    Fit fit;
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.ok = true;
    return fit;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SingularityReport estimate_order(const Field& field, const Vec& p, const OrderOptions& options) {
    const Chart& chart = field.chart();
    SingularityReport report;
    report.location = p;
    report.radii = options.radii.empty() ? log_spaced(1e-2, 1e-4, 8) : options.radii;
    if (report.radii.size() < 2) throw std::invalid_argument("estimate_order: need >= 2 radii");

    const Vec base = chart.base(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : field.metadata().fibers) {
        if (f.base.size() != base.size()) continue;
        const double d = base_distance(chart, base, f.base);
        if (d < best && d < 1e-6) {
            best = d;
            report.declared_order = f.order;
            report.declared_lower_bound = f.order_is_lower_bound;
        }
    }

    Rng rng(options.seed);
    std::vector<double> slopes, fits;
    for (int dir = 0; dir < options.directions; ++dir) {
        Vec u = chart.project_tangent(p, rng.normal_vector(chart.dimension()));
        u /= u.norm();
        std::vector<double> xs, ys;
        for (double r : report.radii) {
            const Vec q = chart.retract(p, r * u);
            const double dist = chart.distance(p, q);
            const double mag = field(q).norm();
            if (!(dist > 0.0) || !(mag > 0.0) || !std::isfinite(mag)) {
                report.degenerate = true;
                continue;
            }
            xs.push_back(std::log(dist));
            ys.push_back(std::log(mag));
        }
        if (xs.size() < 2) {
            report.degenerate = true;
            continue;
        }
        const Fit fit = linear_fit(xs, ys);
        if (!fit.ok) {
            report.degenerate = true;
            continue;
        }
        slopes.push_back(fit.slope);
        fits.push_back(fit.r_squared);
    }
    report.direction_slopes = slopes;
    if (slopes.empty()) return report;
    report.estimated_order = median(slopes);
    report.r_squared = median(fits);
    if (report.r_squared < options.min_r_squared || !(report.estimated_order > 0.0)) {
        report.degenerate = true;
    }
    bool order_ok;
    if (report.declared_lower_bound) {
        order_ok = report.estimated_order > report.declared_order - 1.0;
    } else {
        order_ok = std::abs(report.estimated_order - report.declared_order) <= options.order_tolerance;
    }
    report.passed = !report.degenerate && order_ok;
    return report;
}

double equidistribution_discrepancy(const Trajectory& trajectory, int bins, double base_tolerance) {
    if (bins < 1) throw std::invalid_argument("equidistribution_discrepancy: bins must be >= 1");
    if (trajectory.points.empty()) throw std::invalid_argument("equidistribution_discrepancy: empty");
    const Chart& chart = trajectory.chart;
    const Vec base0 = chart.base(trajectory.points.front());
    for (const Vec& p : trajectory.points) {
        if (base_distance(chart, chart.base(p), base0) > base_tolerance) {
            throw std::invalid_argument("equidistribution_discrepancy: trajectory not fiber-confined");
        }
    }
    const int n = chart.torus_rank();
    if (n < 1) throw std::invalid_argument("equidistribution_discrepancy: chart has no fiber");
    long cells = 1;
    for (int i = 0; i < n; ++i) cells *= bins;
    std::vector<long> counts(static_cast<std::size_t>(cells), 0);
    for (const Vec& p : trajectory.points) {
        const Vec a = chart.fiber_angles(p);
        long index = 0;
        for (int i = 0; i < n; ++i) {
            int b = static_cast<int>(a[i] / kTwoPi * bins);
            b = std::clamp(b, 0, bins - 1);
            index = index * bins + b;
        }
        ++counts[static_cast<std::size_t>(index)];
    }
    const double total = static_cast<double>(trajectory.points.size());
    const double uniform = 1.0 / static_cast<double>(cells);
    double tv = 0.0;
    for (long c : counts) tv += std::abs(static_cast<double>(c) / total - uniform);
    return 0.5 * tv;
}

}  // namespace torusflow

#include "torusflow/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace torusflow {

double wrap_angle(double raw) {
    if (!std::isfinite(raw)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    double r = std::fmod(raw, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative number plus 2pi can round up to exactly 2pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

Vec wrap_angles(const Vec& raw) {
    Vec out(raw.size());
    for (Eigen::Index i = 0; i < raw.size(); ++i) out[i] = wrap_angle(raw[i]);
    return out;
}

double angular_difference(double from, double to) {
    double d = std::remainder(to - from, kTwoPi);
    if (d >= kPi) d -= kTwoPi;
    return d;
}

double angular_distance(double a, double b) { return std::abs(angular_difference(a, b)); }

Vec torus_translate(const Vec& theta, const Vec& lambda) {
    if (theta.size() != lambda.size()) {
        throw std::invalid_argument("torus_translate: length mismatch");
    }
    return wrap_angles(theta + lambda);
}

ProductPoint ProductPoint::make(const Vec& x, const Vec& theta) {
    if (!x.allFinite()) throw std::invalid_argument("ProductPoint: non-finite x");
    return ProductPoint{x, wrap_angles(theta)};
}

ProductPoint ProductPoint::from_flat(const Vec& flat, int k) {
    if (k < 0 || k > flat.size()) throw std::invalid_argument("ProductPoint: bad split");
    return make(flat.head(k), flat.tail(flat.size() - k));
}

Vec ProductPoint::flat() const {
    Vec out(x.size() + theta.size());
    out << x, theta;
    return out;
}

SpherePoint SpherePoint::normalized(const Vec& ambient) {
    if (ambient.size() != 6 || !ambient.allFinite()) {
        throw std::invalid_argument("SpherePoint: need 6 finite coordinates");
    }
    const double norm = ambient.norm();
    if (norm == 0.0) throw std::invalid_argument("SpherePoint: zero vector");
    return SpherePoint{ambient / norm};
}

SpherePoint SpherePoint::checked(const Vec& y) {
    if (y.size() != 6 || !y.allFinite()) {
        throw std::invalid_argument("SpherePoint: need 6 finite coordinates");
    }
    if (std::abs(y.norm() - 1.0) > kSphereTolerance) {
        throw std::invalid_argument("SpherePoint: not on the unit sphere");
    }
    return SpherePoint{y};
}

SpherePoint SpherePoint::from_pairs(double x1, double x2, double x3, double a1, double a2,
                                    double a3) {
    if (x1 < 0.0 || x2 < 0.0 || x3 < 0.0) {
        throw std::invalid_argument("SpherePoint::from_pairs: negative pair norm");
    }
    const double r1 = std::sqrt(x1), r2 = std::sqrt(x2), r3 = std::sqrt(x3);
    Vec y(6);
    y << r1 * std::cos(a1), r1 * std::sin(a1), r2 * std::cos(a2), r2 * std::sin(a2),
        r3 * std::cos(a3), r3 * std::sin(a3);
    return normalized(y);
}

TrianglePoint TrianglePoint::make(double x1, double x2) {
    if (!(x1 >= 0.0 && x2 >= 0.0 && x1 + x2 <= 1.0)) {
        throw std::invalid_argument("TrianglePoint: outside the closed triangle");
    }
    return TrianglePoint{x1, x2};
}

Vec TrianglePoint::flat() const { return Vec{{x1, x2}}; }

Vec torus_act_s5(const Vec& lambda, const Vec& y) {
    if (lambda.size() != 3 || y.size() != 6) {
        throw std::invalid_argument("torus_act_s5: need 3 angles and 6 coordinates");
    }
    Vec out(6);
    for (int j = 0; j < 3; ++j) {
        const double c = std::cos(lambda[j]), s = std::sin(lambda[j]);
        const double u = y[2 * j], v = y[2 * j + 1];
        out[2 * j] = c * u - s * v;
        out[2 * j + 1] = s * u + c * v;
    }
    return out;
}

SpherePoint torus_act_s5(const Vec& lambda, const SpherePoint& y) {
    return SpherePoint{torus_act_s5(lambda, y.y)};
}

TrianglePoint base_projection_pi(const SpherePoint& y) {
    const Vec& v = y.y;
    // Clamp the last ulp so the image stays in the closed triangle.
    double x1 = v[0] * v[0] + v[1] * v[1];
    double x2 = v[2] * v[2] + v[3] * v[3];
    const double s = x1 + x2;
    if (s > 1.0) {
        x1 /= s;
        x2 /= s;
    }
    return TrianglePoint{x1, x2};
}

double singular_indicator_s5(const Vec& y) {
    return (y[0] * y[0] + y[1] * y[1]) * (y[2] * y[2] + y[3] * y[3]) *
           (y[4] * y[4] + y[5] * y[5]);
}

double singular_indicator_s5(const SpherePoint& y) { return singular_indicator_s5(y.y); }

// ---------------------------------------------------------------------------

Chart Chart::product(int k, int n) {
    if (k < 0 || n < 0 || k + n == 0) throw std::invalid_argument("Chart::product: bad (k, n)");
    return Chart(ChartKind::product, k, n);
}

Chart Chart::circle(int n) {
    if (n < 0) throw std::invalid_argument("Chart::circle: negative n");
    return Chart(ChartKind::circle, 1, n);
}

Chart Chart::sphere5() { return Chart(ChartKind::sphere5, 0, 3); }
Chart Chart::triangle() { return Chart(ChartKind::triangle, 2, 0); }

int Chart::dimension() const {
    switch (kind_) {
        case ChartKind::product:
        case ChartKind::circle: return k_ + n_;
        case ChartKind::sphere5: return 6;
        case ChartKind::triangle: return 2;
    }
    return 0;
}

int Chart::torus_rank() const { return kind_ == ChartKind::triangle ? 0 : n_; }

bool Chart::is_angle(int i) const {
    switch (kind_) {
        case ChartKind::product: return i >= k_;
        case ChartKind::circle: return true;
        default: return false;
    }
}

Vec Chart::normalize(const Vec& p) const {
    if (kind_ == ChartKind::sphere5) return SpherePoint::normalized(p).y;
    Vec out = p;
    for (int i = 0; i < dimension(); ++i) {
        if (is_angle(i)) out[i] = wrap_angle(p[i]);
    }
    return out;
}

Vec Chart::displacement(const Vec& from, const Vec& to) const {
    Vec d = to - from;
    for (int i = 0; i < dimension(); ++i) {
        if (is_angle(i)) d[i] = angular_difference(from[i], to[i]);
    }
    return d;
}

double Chart::distance(const Vec& a, const Vec& b) const { return displacement(a, b).norm(); }

bool Chart::contains(const Vec& p, double tolerance) const {
    if (p.size() != dimension() || !p.allFinite()) return false;
    switch (kind_) {
        case ChartKind::sphere5: return std::abs(p.norm() - 1.0) <= tolerance;
        case ChartKind::triangle:
            return p[0] >= -tolerance && p[1] >= -tolerance && p[0] + p[1] <= 1.0 + tolerance;
        default: return true;
    }
}

Vec Chart::retract(const Vec& p, const Vec& v) const { return normalize(p + v); }

Vec Chart::project_tangent(const Vec& p, const Vec& v) const {
    if (kind_ != ChartKind::sphere5) return v;
    return v - p.dot(v) / p.squaredNorm() * p;
}

Vec Chart::base(const Vec& p) const {
    switch (kind_) {
        case ChartKind::product: return p.head(k_);
        case ChartKind::circle: return p.head(1);
        case ChartKind::sphere5: {
            return Vec{{p[0] * p[0] + p[1] * p[1], p[2] * p[2] + p[3] * p[3]}};
        }
        case ChartKind::triangle: return p;
    }
    return p;
}

Vec Chart::fiber_angles(const Vec& p) const {
    switch (kind_) {
        case ChartKind::product:
        case ChartKind::circle: return p.tail(n_);
        case ChartKind::sphere5: {
            Vec a(3);
            for (int j = 0; j < 3; ++j) a[j] = wrap_angle(std::atan2(p[2 * j + 1], p[2 * j]));
            return a;
        }
        case ChartKind::triangle: return Vec(0);
    }
    return Vec(0);
}

Vec Chart::act(const Vec& lambda, const Vec& p) const {
    if (lambda.size() != torus_rank()) throw std::invalid_argument("Chart::act: wrong group rank");
    switch (kind_) {
        case ChartKind::product:
        case ChartKind::circle: {
            Vec out = p;
            out.tail(n_) = torus_translate(p.tail(n_), lambda);
            return out;
        }
        case ChartKind::sphere5: return torus_act_s5(lambda, p);
        case ChartKind::triangle: return p;
    }
    return p;
}

Vec Chart::act_tangent(const Vec& lambda, const Vec& v) const {
    if (kind_ == ChartKind::sphere5) return torus_act_s5(lambda, v);
    return v;
}

std::string Chart::tag() const {
    switch (kind_) {
        case ChartKind::product:
            if (k_ == 1 && n_ == 0) return "line";
            return "product(" + std::to_string(k_) + "," + std::to_string(n_) + ")";
        case ChartKind::circle:
            return n_ == 0 ? "circle" : "circle(" + std::to_string(n_) + ")";
        case ChartKind::sphere5: return "sphere5";
        case ChartKind::triangle: return "triangle";
    }
    return "?";
}

}  // namespace torusflow

#pragma once

#include <Eigen/Dense>

#include <string>

namespace torusflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce a finite angle into [0, 2pi).
double wrap_angle(double raw);

/// Componentwise wrap_angle. Throws std::invalid_argument on non-finite input.
Vec wrap_angles(const Vec& raw);

/// Length of the shorter arc between two angles, in [0, pi].
double angular_distance(double a, double b);

/// Signed shortest arc from `from` to `to`, in [-pi, pi).
double angular_difference(double from, double to);

Vec torus_translate(const Vec& theta, const Vec& lambda);

/// A point of R^k x T^n. Angles are kept in [0, 2pi).
struct ProductPoint {
    Vec x;
    Vec theta;

    static ProductPoint make(const Vec& x, const Vec& theta);
    static ProductPoint from_flat(const Vec& flat, int k);
    Vec flat() const;
};

/// A unit vector of R^6, i.e. a point of S^5.
struct SpherePoint {
    Vec y;

    /// Rescales `ambient` onto the sphere. Throws on zero or non-finite input.
    static SpherePoint normalized(const Vec& ambient);
    /// Accepts `y` only if it already lies on the sphere to 1e-12.
    static SpherePoint checked(const Vec& y);
    /// Point whose coordinate pairs have squared norms x1, x2, x3 (summing to 1)
    /// and polar angles a1, a2, a3.
    static SpherePoint from_pairs(double x1, double x2, double x3, double a1 = 0.0, double a2 = 0.0,
                                  double a3 = 0.0);
};

/// A point of the closed triangle with vertices (0,0), (1,0), (0,1).
struct TrianglePoint {
    double x1 = 0.0;
    double x2 = 0.0;

    static TrianglePoint make(double x1, double x2);
    bool interior() const { return x1 > 0.0 && x2 > 0.0 && x1 + x2 < 1.0; }
    Vec flat() const;
};

inline constexpr double kSphereTolerance = 1e-12;

/// Rotates the coordinate pairs (y1,y2), (y3,y4), (y5,y6) by lambda_1..3.
SpherePoint torus_act_s5(const Vec& lambda, const SpherePoint& y);
Vec torus_act_s5(const Vec& lambda, const Vec& y);

/// (y1^2 + y2^2, y3^2 + y4^2).
TrianglePoint base_projection_pi(const SpherePoint& y);

/// x1 x2 x3, the product of the squared pair norms; zero exactly on the non-free set.
double singular_indicator_s5(const SpherePoint& y);
double singular_indicator_s5(const Vec& y);

/// Coordinate systems supported by the toolkit. Points are flat vectors in
/// chart coordinates; the chart knows which entries are angles.
///
///   product(k, n): (x_1..x_k, theta_1..theta_n), torus acts on theta
///   circle(n):     (alpha, theta_1..theta_n), torus acts on theta only
///   sphere5:       ambient (y_1..y_6) on the unit sphere, T^3 acts by pair rotations
///   triangle:      (x_1, x_2) in the closed triangle, no action
enum class ChartKind { product, circle, sphere5, triangle };

class Chart {
public:
    static Chart product(int k, int n);
    static Chart line() { return product(1, 0); }
    static Chart circle(int n = 0);
    static Chart sphere5();
    static Chart triangle();

    ChartKind kind() const { return kind_; }
    int k() const { return k_; }
    int n() const { return n_; }
    int dimension() const;
    /// Rank of the acting torus (0 for base-only charts).
    int torus_rank() const;
    bool is_angle(int i) const;

    /// Wrap angle entries and renormalize sphere points.
    Vec normalize(const Vec& p) const;
    /// Shortest displacement from `from` to `to` (angles via shortest arc).
    Vec displacement(const Vec& from, const Vec& to) const;
    double distance(const Vec& a, const Vec& b) const;
    bool contains(const Vec& p, double tolerance = 1e-9) const;
    /// Move from `p` by the tangent step `v` and return to the chart.
    Vec retract(const Vec& p, const Vec& v) const;
    /// Orthogonal projection of an ambient vector onto the tangent space at p.
    Vec project_tangent(const Vec& p, const Vec& v) const;

    /// Orbit-space coordinates of p (x for product, alpha for circle,
    /// pi(y) for the sphere, p itself for the triangle).
    Vec base(const Vec& p) const;
    /// Angles along the torus orbit through p.
    Vec fiber_angles(const Vec& p) const;

    /// The torus action and its tangent map (a rigid rotation/translation, so
    /// the tangent map does not depend on the base point).
    Vec act(const Vec& lambda, const Vec& p) const;
    Vec act_tangent(const Vec& lambda, const Vec& v) const;

    std::string tag() const;

    bool operator==(const Chart&) const = default;

private:
    Chart(ChartKind kind, int k, int n) : kind_(kind), k_(k), n_(n) {}

    ChartKind kind_;
    int k_;
    int n_;
};

}  // namespace torusflow

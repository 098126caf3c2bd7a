#pragma once

#include "torusflow/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace torusflow {

using ScalarFn = std::function<double(const Vec&)>;
using VectorRule = std::function<Vec(const Vec&)>;
using PointMap = std::function<Vec(const Vec&)>;

/// What a declared invariant fiber is for the field that carries it.
enum class FiberRole {
    source,        ///< repelling zero of the base field; not a zero of the lifted field
    sink,          ///< attracting zero of the base field
    artificial,    ///< zero created by the damping factor at a regular point
    singular_set,  ///< the non-free part of the action
    origin,        ///< isolated zero of a linear model field
};

std::string to_string(FiberRole role);

/// A torus orbit (or, for base-only charts, a point) that the field keeps
/// invariant. `order` is the declared order of nullity of the field along it;
/// 0 means the field does not vanish there.
struct FiberDecl {
    std::string id;
    FiberRole role = FiberRole::source;
    Vec base;             ///< orbit-space coordinates
    Vec representative;   ///< a chart point on the fiber
    int order = 0;
    bool order_is_lower_bound = false;
};

struct FieldMetadata {
    std::vector<FiberDecl> fibers;
    Vec frequencies;            ///< affine part along the torus, if any
    bool declared_dense = false;
    std::string density_warning;
    bool invariant = false;     ///< commutes with the chart's torus action
};

/// A named, immutable vector field on a chart. Copies share the rule.
class Field {
public:
    Field(std::string name, Chart chart, VectorRule rule, FieldMetadata metadata = {});

    Vec operator()(const Vec& p) const;

    const std::string& name() const { return impl_->name; }
    const Chart& chart() const { return impl_->chart; }
    const FieldMetadata& metadata() const { return impl_->metadata; }

    Field with_metadata(FieldMetadata metadata) const;
    Field renamed(std::string name) const;

private:
    struct Impl {
        std::string name;
        Chart chart;
        VectorRule rule;
        FieldMetadata metadata;
    };
    std::shared_ptr<const Impl> impl_;
};

Field operator+(const Field& a, const Field& b);
Field operator*(double c, const Field& f);
/// f(p) * field(p). Metadata of `field` is kept.
Field scaled(const ScalarFn& f, const Field& field, std::string name = {});
Field negated(const Field& f);
Field zero_field(const Chart& chart);
/// The field with value `value` everywhere (chart coordinates).
Field constant_field(const Chart& chart, Vec value, std::string name = {});

// --- Euclidean / torus model fields ----------------------------------------

/// xi = sum x_j d/dx_j on product(k, n) (zero along the torus factor).
Field radial_field(int k, int n = 0);

/// sum a_r d/dtheta_r on product(k, n) with n = a.size(). `declared_dense` is
/// the caller's statement that the frequencies are rationally independent;
/// the metadata gets a warning if a small integer relation is found.
Field affine_torus_field(const Vec& a, int k = 0, bool declared_dense = true);

/// xi + T on product(k, n).
Field radial_plus_affine(int k, const Vec& a, bool declared_dense = true);

/// x_j d/dx_l on product(k, n) (0-based indices).
Field linear_basis_field(int k, int n, int j, int l);

/// d/dtheta_r on product(k, n).
Field angle_field(int k, int n, int r);

/// Search for m with |m_i| <= max_coeff, m != 0 and |sum m_i a_i| < tolerance.
/// Exhaustive for up to three frequencies; pairwise continued fractions beyond.
std::optional<std::vector<int>> find_integer_relation(const Vec& a, int max_coeff = 50,
                                                      double tolerance = 1e-9);

// --- S^5 with the standard T^3 action --------------------------------------

/// U_1, U_2, U_3: the infinitesimal pair rotations.
std::vector<Field> fundamental_fields_s5();

/// V_1, V_2: horizontal fields of the flat connection.
std::vector<Field> connection_fields_s5();

/// Y on the triangle: 2(1-x1-x2) x1 x2 [(x1-1/4) d1 + (x2-1/4) d2].
Field base_gradient_field();

/// x1^10 x2^10 (1-x1-x2)^10.
double rho_s5(double x1, double x2);
/// rho times the squared distances to (1/8,1/8), (1/8,1/4), (1/4,1/8) raised
/// to the powers 1, 2, 3.
double tau_s5(double x1, double x2);
double tau_s5(const TrianglePoint& x);

/// The three interior zeros of tau and their orders.
struct InteriorZero {
    std::string id;
    double x1;
    double x2;
    int order;
};
const std::vector<InteriorZero>& tau_s5_zeros();

/// Y' = x1 x2 ((x1 - 1/4) V_1 + (x2 - 1/4) V_2), written in y.
Field lifted_field_s5();

/// Default dense frequencies (1, e, e^2).
Vec s5_frequencies();

/// X' = (tau o pi)(Y' + a1 U_1 + a2 U_2 + a3 U_3).
Field describing_field_s5(const Vec& a = s5_frequencies());

// --- one-dimensional bases --------------------------------------------------

enum class LineBase { line, circle };
LineBase parse_line_base(const std::string& tag);
std::string to_string(LineBase base);

struct LineModel {
    LineBase base;
    Field y;           ///< base field, on line / circle
    ScalarFn tau;      ///< damping factor, function of the base coordinate
    Field z;           ///< tau * Y on the base
    Field describing;  ///< tau (Y + T) on B x T^n
    std::vector<double> sources;
    std::vector<double> sinks;
    std::vector<int> sink_orders;
};

/// Base fields q/(q^2+1) d/dx with q = x(x-1)(x-2)(x-3)(x-4) (line) or
/// sin(3 alpha) d/dalpha (circle), and tau with sink orders 2, 4 (line) or
/// 2, 4, 6 (circle).
LineModel line_model_fields(LineBase base, const Vec& a, bool declared_dense = true);

// --- numerical differential calculus ----------------------------------------

/// Central-difference [A, B](p) = DB(p) A(p) - DA(p) B(p).
Vec lie_bracket(const Field& a, const Field& b, const Vec& p, double h = 1e-4);

/// Richardson extrapolation of lie_bracket from steps h and h/2.
Vec lie_bracket_richardson(const Field& a, const Field& b, const Vec& p, double h = 1e-4);

/// Directional derivative D field(p) v by central differences.
Vec directional_derivative(const Field& field, const Vec& p, const Vec& v, double h = 1e-4);

/// Finite-difference Jacobian of the field at p (ambient coordinates).
Mat jacobian(const Field& field, const Vec& p, double h = 1e-5);

/// || DF(p) A(p) - B(F(p)) || with DF by central differences in chart
/// coordinates. B defaults to A.
double pushforward_residual(const PointMap& map, const Field& a, const Vec& p, double h = 1e-4,
                            const Field* target = nullptr);

}  // namespace torusflow

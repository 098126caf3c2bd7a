#include "torusflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace torusflow {

std::string to_string(FiberRole role) {
    switch (role) {
        case FiberRole::source: return "source";
        case FiberRole::sink: return "sink";
        case FiberRole::artificial: return "artificial";
        case FiberRole::singular_set: return "singular_set";
        case FiberRole::origin: return "origin";
    }
    return "?";
}

Field::Field(std::string name, Chart chart, VectorRule rule, FieldMetadata metadata)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(name), chart, std::move(rule), std::move(metadata)})) {
    if (!impl_->rule) throw std::invalid_argument("Field: empty evaluation rule");
}

Vec Field::operator()(const Vec& p) const {
    if (p.size() != impl_->chart.dimension()) {
        throw std::invalid_argument("Field " + impl_->name + ": point has wrong dimension");
    }
    Vec v = impl_->rule(p);
    if (v.size() != impl_->chart.dimension()) {
        throw std::logic_error("Field " + impl_->name + ": rule returned wrong dimension");
    }
    return v;
}

Field Field::with_metadata(FieldMetadata metadata) const {
    return Field(impl_->name, impl_->chart, impl_->rule, std::move(metadata));
}

Field Field::renamed(std::string name) const {
    return Field(std::move(name), impl_->chart, impl_->rule, impl_->metadata);
}

Field operator+(const Field& a, const Field& b) {
    if (!(a.chart() == b.chart())) throw std::invalid_argument("Field sum: chart mismatch");
    FieldMetadata meta;
    meta.invariant = a.metadata().invariant && b.metadata().invariant;
    return Field(a.name() + "+" + b.name(), a.chart(),
                 [a, b](const Vec& p) -> Vec { return a(p) + b(p); }, meta);
}

Field operator*(double c, const Field& f) {
    return Field(std::to_string(c) + "*" + f.name(), f.chart(),
                 [c, f](const Vec& p) -> Vec { return c * f(p); }, f.metadata());
}

Field scaled(const ScalarFn& g, const Field& field, std::string name) {
    if (name.empty()) name = "g*" + field.name();
    return Field(std::move(name), field.chart(),
                 [g, field](const Vec& p) -> Vec { return g(p) * field(p); }, field.metadata());
}

Field negated(const Field& f) {
    return Field("-" + f.name(), f.chart(), [f](const Vec& p) -> Vec { return -f(p); },
                 f.metadata());
}

Field zero_field(const Chart& chart) {
    FieldMetadata meta;
    meta.invariant = true;
    const int d = chart.dimension();
    return Field("zero", chart, [d](const Vec&) -> Vec { return Vec::Zero(d); }, meta);
}

Field constant_field(const Chart& chart, Vec value, std::string name) {
    if (value.size() != chart.dimension()) {
        throw std::invalid_argument("constant_field: wrong dimension");
    }
    if (name.empty()) name = "const";
    return Field(std::move(name), chart, [value](const Vec&) -> Vec { return value; });
}

// ---------------------------------------------------------------------------

Field radial_field(int k, int n) {
    if (k < 1) throw std::invalid_argument("radial_field: k must be >= 1");
    if (n < 0) throw std::invalid_argument("radial_field: n must be >= 0");
    FieldMetadata meta;
    meta.invariant = true;
    FiberDecl origin;
    origin.id = "origin";
    origin.role = FiberRole::origin;
    origin.base = Vec::Zero(k);
    origin.representative = Vec::Zero(k + n);
    origin.order = 1;
    meta.fibers.push_back(origin);
    return Field("xi", Chart::product(k, n),
                 [k, n](const Vec& p) -> Vec {
                     Vec v = Vec::Zero(k + n);
                     v.head(k) = p.head(k);
                     return v;
                 },
                 meta);
}

std::optional<std::vector<int>> find_integer_relation(const Vec& a, int max_coeff,
                                                      double tolerance) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
        if (std::abs(a[i]) < tolerance) {
            std::vector<int> m(n, 0);
            m[i] = 1;
            return m;
        }
    }
    if (n <= 1) return std::nullopt;
    if (n <= 3) {
        std::vector<int> m(n, -max_coeff);
        while (true) {
            bool nonzero = false;
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                nonzero = nonzero || m[i] != 0;
                s += m[i] * a[i];
            }
            if (nonzero && std::abs(s) < tolerance) return m;
            int i = 0;
            while (i < n && m[i] == max_coeff) m[i++] = -max_coeff;
            if (i == n) break;
            ++m[i];
        }
        return std::nullopt;
    }
    // Pairwise: continued-fraction convergents of a_i / a_j.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double r = a[i] / a[j];
            const double sign = r < 0 ? -1.0 : 1.0;
            r = std::abs(r);
            long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(r)), q1 = 1;
            double frac = r - std::floor(r);
            for (int iter = 0; iter < 64; ++iter) {
                if (p1 > max_coeff || q1 > max_coeff) break;
                // q1 * a_i - sign * p1 * a_j
                if (std::abs(q1 * a[i] - sign * p1 * a[j]) < tolerance) {
                    std::vector<int> m(n, 0);
                    m[i] = static_cast<int>(q1);
                    m[j] = static_cast<int>(-sign * p1);
                    return m;
                }
                if (frac < 1e-15) break;
                const double inv = 1.0 / frac;
                const auto digit = static_cast<long long>(std::floor(inv));
                frac = inv - std::floor(inv);
                const long long p2 = digit * p1 + p0, q2 = digit * q1 + q0;
                p0 = p1;
                q0 = q1;
                p1 = p2;
                q1 = q2;
            }
        }
    }
    return std::nullopt;
}

namespace {

std::string relation_warning(const Vec& a) {
    auto rel = find_integer_relation(a);
    if (!rel) return {};
    std::string s = "frequencies admit the integer relation (";
    for (std::size_t i = 0; i < rel->size(); ++i) {
        if (i) s += ",";
        s += std::to_string((*rel)[i]);
    }
    return s + "); orbits are not dense";
}

FieldMetadata affine_metadata(const Vec& a, bool declared_dense) {
    FieldMetadata meta;
    meta.frequencies = a;
    meta.declared_dense = declared_dense;
    meta.density_warning = relation_warning(a);
    meta.invariant = true;
    return meta;
}

}  // namespace

Field affine_torus_field(const Vec& a, int k, bool declared_dense) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw std::invalid_argument("affine_torus_field: need n >= 1");
    return Field("T", Chart::product(k, n),
                 [a, k, n](const Vec&) -> Vec {
                     Vec v = Vec::Zero(k + n);
                     v.tail(n) = a;
                     return v;
                 },
                 affine_metadata(a, declared_dense));
}

Field radial_plus_affine(int k, const Vec& a, bool declared_dense) {
    const int n = static_cast<int>(a.size());
    if (k < 1 || n < 1) throw std::invalid_argument("radial_plus_affine: need k, n >= 1");
    FieldMetadata meta = affine_metadata(a, declared_dense);
    meta.fibers = radial_field(k, n).metadata().fibers;
    meta.fibers.front().order = 0;  // T does not vanish on the central torus
    meta.fibers.front().role = FiberRole::source;
    return Field("xi+T", Chart::product(k, n),
                 [a, k, n](const Vec& p) -> Vec {
                     Vec v(k + n);
                     v.head(k) = p.head(k);
                     v.tail(n) = a;
                     return v;
                 },
                 meta);
}

Field linear_basis_field(int k, int n, int j, int l) {
    if (j < 0 || j >= k || l < 0 || l >= k) throw std::invalid_argument("linear_basis_field");
    return Field("x" + std::to_string(j + 1) + "*d/dx" + std::to_string(l + 1),
                 Chart::product(k, n), [k, n, j, l](const Vec& p) -> Vec {
                     Vec v = Vec::Zero(k + n);
                     v[l] = p[j];
                     return v;
                 });
}

Field angle_field(int k, int n, int r) {
    if (r < 0 || r >= n) throw std::invalid_argument("angle_field");
    Vec v = Vec::Zero(k + n);
    v[k + r] = 1.0;
    return constant_field(Chart::product(k, n), v, "d/dtheta" + std::to_string(r + 1));
}

// --- S^5 ---------------------------------------------------------------------

std::vector<Field> fundamental_fields_s5() {
    std::vector<Field> out;
    FieldMetadata meta;
    meta.invariant = true;
    for (int j = 0; j < 3; ++j) {
        out.emplace_back("U" + std::to_string(j + 1), Chart::sphere5(),
                         [j](const Vec& y) -> Vec {
                             Vec v = Vec::Zero(6);
                             v[2 * j] = -y[2 * j + 1];
                             v[2 * j + 1] = y[2 * j];
                             return v;
                         },
                         meta);
    }
    return out;
}

namespace {

double pair_norm(const Vec& y, int j) { return y[2 * j] * y[2 * j] + y[2 * j + 1] * y[2 * j + 1]; }

// V_r for r = 0, 1.
Vec connection_value(const Vec& y, int r) {
    Vec v = Vec::Zero(6);
    const double x3 = pair_norm(y, 2);
    const double xr = pair_norm(y, r);
    v[2 * r] = x3 * y[2 * r];
    v[2 * r + 1] = x3 * y[2 * r + 1];
    v[4] = -xr * y[4];
    v[5] = -xr * y[5];
    return v;
}

Vec lifted_value(const Vec& y) {
    const double x1 = pair_norm(y, 0), x2 = pair_norm(y, 1);
    return x1 * x2 * ((x1 - 0.25) * connection_value(y, 0) + (x2 - 0.25) * connection_value(y, 1));
}

}  // namespace

std::vector<Field> connection_fields_s5() {
    FieldMetadata meta;
    meta.invariant = true;
    std::vector<Field> out;
    for (int r = 0; r < 2; ++r) {
        out.emplace_back("V" + std::to_string(r + 1), Chart::sphere5(),
                         [r](const Vec& y) -> Vec { return connection_value(y, r); }, meta);
    }
    return out;
}

Field base_gradient_field() {
    FieldMetadata meta;
    FiberDecl src;
    src.id = "source(1/4,1/4)";
    src.role = FiberRole::source;
    src.base = Vec{{0.25, 0.25}};
    src.representative = src.base;
    src.order = 1;
    meta.fibers.push_back(src);
    return Field("Y", Chart::triangle(),
                 [](const Vec& x) -> Vec {
                     const double s = 2.0 * (1.0 - x[0] - x[1]) * x[0] * x[1];
                     return Vec{{s * (x[0] - 0.25), s * (x[1] - 0.25)}};
                 },
                 meta);
}

double rho_s5(double x1, double x2) {
    return std::pow(x1, 10) * std::pow(x2, 10) * std::pow(1.0 - x1 - x2, 10);
}

double tau_s5(double x1, double x2) {
    const double d1 = (x1 - 0.125) * (x1 - 0.125) + (x2 - 0.125) * (x2 - 0.125);
    const double d2 = (x1 - 0.125) * (x1 - 0.125) + (x2 - 0.25) * (x2 - 0.25);
    const double d3 = (x1 - 0.25) * (x1 - 0.25) + (x2 - 0.125) * (x2 - 0.125);
    return rho_s5(x1, x2) * d1 * d2 * d2 * d3 * d3 * d3;
}

double tau_s5(const TrianglePoint& x) { return tau_s5(x.x1, x.x2); }

const std::vector<InteriorZero>& tau_s5_zeros() {
    static const std::vector<InteriorZero> zeros{
        {"artificial(1/8,1/8)", 0.125, 0.125, 2},
        {"artificial(1/8,1/4)", 0.125, 0.25, 4},
        {"artificial(1/4,1/8)", 0.25, 0.125, 6},
    };
    return zeros;
}

Field lifted_field_s5() {
    FieldMetadata meta;
    meta.invariant = true;
    return Field("Y'", Chart::sphere5(), [](const Vec& y) -> Vec { return lifted_value(y); }, meta);
}

Vec s5_frequencies() {
    const double e = std::exp(1.0);
    return Vec{{1.0, e, e * e}};
}

namespace {

FiberDecl s5_fiber(std::string id, FiberRole role, double x1, double x2, int order,
                   bool lower_bound = false) {
    FiberDecl f;
    f.id = std::move(id);
    f.role = role;
    f.base = Vec{{x1, x2}};
    f.representative = SpherePoint::from_pairs(x1, x2, 1.0 - x1 - x2).y;
    f.order = order;
    f.order_is_lower_bound = lower_bound;
    return f;
}

}  // namespace

Field describing_field_s5(const Vec& a) {
    if (a.size() != 3) throw std::invalid_argument("describing_field_s5: need 3 frequencies");
    FieldMetadata meta = affine_metadata(a, true);
    meta.fibers.push_back(s5_fiber("source(1/4,1/4)", FiberRole::source, 0.25, 0.25, 0));
    for (const auto& z : tau_s5_zeros()) {
        meta.fibers.push_back(s5_fiber(z.id, FiberRole::artificial, z.x1, z.x2, z.order));
    }
    // A generic point of the non-free set: first pair collapsed.
    meta.fibers.push_back(s5_fiber("singular_set", FiberRole::singular_set, 0.0, 0.5, 10, true));
    return Field("X'", Chart::sphere5(),
                 [a](const Vec& y) -> Vec {
                     const double x1 = pair_norm(y, 0), x2 = pair_norm(y, 1);
                     Vec v = lifted_value(y);
                     for (int j = 0; j < 3; ++j) {
                         v[2 * j] -= a[j] * y[2 * j + 1];
                         v[2 * j + 1] += a[j] * y[2 * j];
                     }
                     return tau_s5(x1, x2) * v;
                 },
                 meta);
}

// --- one-dimensional bases --------------------------------------------------

LineBase parse_line_base(const std::string& tag) {
    if (tag == "line") return LineBase::line;
    if (tag == "circle") return LineBase::circle;
    throw std::invalid_argument("unknown base '" + tag + "' (expected line or circle)");
}

std::string to_string(LineBase base) { return base == LineBase::line ? "line" : "circle"; }

namespace {

double quintic(double x) { return x * (x - 1.0) * (x - 2.0) * (x - 3.0) * (x - 4.0); }

double chord2(double a, double b) { return 2.0 - 2.0 * std::cos(a - b); }

}  // namespace

LineModel line_model_fields(LineBase base, const Vec& a, bool declared_dense) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw std::invalid_argument("line_model_fields: need n >= 1");

    std::function<double(double)> y_rule, tau_rule;
    std::vector<double> sources, sinks;
    std::vector<int> orders;
    if (base == LineBase::line) {
        y_rule = [](double x) {
            const double q = quintic(x);
            return q / (q * q + 1.0);
        };
        // Bounded: numerator and envelope both have degree 6.
        tau_rule = [](double x) {
            const double u = (x - 1.0) * (x - 1.0), w = (x - 3.0) * (x - 3.0);
            const double env = 1.0 + x * x;
            return u * w * w / (env * env * env);
        };
        sources = {0.0, 2.0, 4.0};
        sinks = {1.0, 3.0};
        orders = {2, 4};
    } else {
        y_rule = [](double alpha) { return std::sin(3.0 * alpha); };
        tau_rule = [](double alpha) {
            const double u = chord2(alpha, kPi / 3.0), w = chord2(alpha, kPi),
                         z = chord2(alpha, 5.0 * kPi / 3.0);
            return u * w * w * z * z * z;
        };
        sources = {0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
        sinks = {kPi / 3.0, kPi, 5.0 * kPi / 3.0};
        orders = {2, 4, 6};
    }

    const Chart base_chart = base == LineBase::line ? Chart::line() : Chart::circle(0);
    const Chart total = base == LineBase::line ? Chart::product(1, n) : Chart::circle(n);

    auto decl = [&](const std::string& prefix, FiberRole role, double b, int order, int dim) {
        FiberDecl f;
        f.id = prefix;
        f.role = role;
        f.base = Vec{{b}};
        f.representative = Vec::Zero(dim);
        f.representative[0] = b;
        f.order = order;
        return f;
    };
    auto label = [&](const char* kind, double b) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s(%.6g)", kind, b);
        return std::string(buf);
    };

    FieldMetadata y_meta, z_meta, x_meta = affine_metadata(a, declared_dense);
    for (double s : sources) {
        y_meta.fibers.push_back(decl(label("source", s), FiberRole::source, s, 1, 1));
        z_meta.fibers.push_back(decl(label("source", s), FiberRole::source, s, 1, 1));
        x_meta.fibers.push_back(decl(label("source", s), FiberRole::source, s, 0, 1 + n));
    }
    for (std::size_t i = 0; i < sinks.size(); ++i) {
        y_meta.fibers.push_back(decl(label("sink", sinks[i]), FiberRole::sink, sinks[i], 1, 1));
        z_meta.fibers.push_back(
            decl(label("sink", sinks[i]), FiberRole::sink, sinks[i], orders[i] + 1, 1));
        x_meta.fibers.push_back(
            decl(label("sink", sinks[i]), FiberRole::sink, sinks[i], orders[i], 1 + n));
    }

    Field y("Y", base_chart, [y_rule](const Vec& p) -> Vec { return Vec{{y_rule(p[0])}}; }, y_meta);
    ScalarFn tau = [tau_rule](const Vec& p) { return tau_rule(p[0]); };
    Field z("Z", base_chart,
            [y_rule, tau_rule](const Vec& p) -> Vec { return Vec{{tau_rule(p[0]) * y_rule(p[0])}}; },
            z_meta);
    Field describing("X'", total,
                     [y_rule, tau_rule, a, n](const Vec& p) -> Vec {
                         Vec v(1 + n);
                         v[0] = y_rule(p[0]);
                         v.tail(n) = a;
                         return tau_rule(p[0]) * v;
                     },
                     x_meta);
    return LineModel{base, y, tau, z, describing, sources, sinks, orders};
}

// --- numerical differential calculus ----------------------------------------

namespace {

void require_inside(const Field& f, const Vec& p) {
    if (!f.chart().contains(p, 1e-6)) {
        throw std::domain_error("point outside the domain of chart " + f.chart().tag());
    }
}

}  // namespace

Vec directional_derivative(const Field& field, const Vec& p, const Vec& v, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("directional_derivative: h must be positive");
    require_inside(field, p);
    const double len = v.norm();
    if (len == 0.0) return Vec::Zero(field.chart().dimension());
    const Vec u = v / len;
    return (field(p + h * u) - field(p - h * u)) * (len / (2.0 * h));
}

Vec lie_bracket(const Field& a, const Field& b, const Vec& p, double h) {
    if (!(a.chart() == b.chart())) throw std::invalid_argument("lie_bracket: chart mismatch");
    return directional_derivative(b, p, a(p), h) - directional_derivative(a, p, b(p), h);
}

Vec lie_bracket_richardson(const Field& a, const Field& b, const Vec& p, double h) {
    const Vec coarse = lie_bracket(a, b, p, h);
    const Vec fine = lie_bracket(a, b, p, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

Mat jacobian(const Field& field, const Vec& p, double h) {
    require_inside(field, p);
    const int d = field.chart().dimension();
    Mat jac(d, d);
    for (int i = 0; i < d; ++i) {
        Vec e = Vec::Zero(d);
        e[i] = h;
        jac.col(i) = (field(p + e) - field(p - e)) / (2.0 * h);
    }
    return jac;
}

double pushforward_residual(const PointMap& map, const Field& a, const Vec& p, double h,
                            const Field* target) {
    if (!(h > 0.0)) throw std::invalid_argument("pushforward_residual: h must be positive");
    require_inside(a, p);
    const Field& b = target ? *target : a;
    const Chart& chart = a.chart();
    const Vec image = map(p);
    if (!chart.contains(image, 1e-6)) {
        throw std::domain_error("pushforward_residual: map leaves the chart domain");
    }
    const Vec v = a(p);
    const double len = v.norm();
    Vec pushed = Vec::Zero(chart.dimension());
    if (len > 0.0) {
        const Vec u = v / len;
        const Vec fwd = map(p + h * u);
        const Vec bwd = map(p - h * u);
        pushed = chart.displacement(bwd, fwd) * (len / (2.0 * h));
    }
    return (pushed - b(image)).norm();
}

}  // namespace torusflow

#include "torusflow/construction.hpp"

#include "torusflow/rng.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace torusflow {

void require_distinct_orders(const std::vector<FiberDecl>& inventory) {
    std::set<int> seen;
    for (const auto& f : inventory) {
        if (!seen.insert(f.order).second) {
            throw std::logic_error("inventory orders must be pairwise distinct (order " +
                                   std::to_string(f.order) + " repeated)");
        }
    }
}

namespace {

ConstructionManifest assemble(std::string scenario, const Field& field,
                              std::vector<std::string> notes) {
    ConstructionManifest m{std::move(scenario), field, {}, field.metadata().frequencies,
                           field.metadata().declared_dense, field.metadata().density_warning,
                           std::move(notes)};
    for (const auto& f : field.metadata().fibers) {
        if (f.order > 0) m.inventory.push_back(f);
    }
    require_distinct_orders(m.inventory);
    return m;
}

}  // namespace

ConstructionManifest build_line_describing(LineBase base, const Vec& a, bool declared_dense) {
    LineModel model = line_model_fields(base, a, declared_dense);
    std::vector<std::string> notes{
        "one-dimensional base with Y = " +
            std::string(base == LineBase::line ? "q/(q^2+1) d/dx, q = x(x-1)(x-2)(x-3)(x-4)"
                                               : "sin(3 alpha) d/dalpha"),
        "X' = tau (Y + T); tau raises the sink orders so that distinct sinks are distinguishable",
    };
    if (!declared_dense) notes.push_back("warning: frequencies not declared dense");
    return assemble(to_string(base), model.describing, std::move(notes));
}

ConstructionManifest build_planar_demo(const PlanarDemoOptions& o) {
    if (o.orders.size() != 3 || o.ray_angles.size() != 3) {
        throw std::invalid_argument("planar demo: need k + 1 = 3 artificial singularities");
    }
    for (int ord : o.orders) {
        if (ord < 2 || ord % 2 != 0) throw std::invalid_argument("planar demo: orders must be even >= 2");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            if (o.orders[i] == o.orders[j]) {
                throw std::invalid_argument("planar demo: artificial singularities need different orders");
            }
            if (angular_distance(wrap_angle(o.ray_angles[i]), wrap_angle(o.ray_angles[j])) < 1e-9) {
                throw std::invalid_argument("planar demo: rays must be pairwise distinct");
            }
        }
    }
    if (!(o.radius > 0.0) || !(o.source_rate > 0.0)) {
        throw std::invalid_argument("planar demo: radius and source rate must be positive");
    }
    const int n = static_cast<int>(o.frequencies.size());
    if (n < 1) throw std::invalid_argument("planar demo: need n >= 1");

    std::vector<Vec> points;
    for (double ang : o.ray_angles) points.push_back(Vec{{o.radius * std::cos(ang), o.radius * std::sin(ang)}});
    const std::vector<int> orders = o.orders;
    int total_power = 0;
    for (int ord : orders) total_power += ord / 2;

    const double rate = o.source_rate;
    const Vec a = o.frequencies;
    auto tau = [points, orders, total_power](const Vec& x) {
        double value = 1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            value *= std::pow((x - points[i]).squaredNorm(), orders[i] / 2);
        }
        return value / std::pow(1.0 + x.squaredNorm(), total_power);
    };

    FieldMetadata meta;
    meta.frequencies = a;
    meta.declared_dense = o.declared_dense;
    if (auto rel = find_integer_relation(a); rel) meta.density_warning = "frequencies admit an integer relation";
    meta.invariant = true;
    FiberDecl src;
    src.id = "source(0,0)";
    src.role = FiberRole::source;
    src.base = Vec::Zero(2);
    src.representative = Vec::Zero(2 + n);
    meta.fibers.push_back(src);
    for (std::size_t i = 0; i < points.size(); ++i) {
        FiberDecl f;
        f.id = "artificial" + std::to_string(i + 1);
        f.role = FiberRole::artificial;
        f.base = points[i];
        f.representative = Vec::Zero(2 + n);
        f.representative.head(2) = points[i];
        f.order = orders[i];
        meta.fibers.push_back(f);
    }

    Field field("X'", Chart::product(2, n),
                [tau, rate, a, n](const Vec& p) -> Vec {
                    const Vec x = p.head(2);
                    Vec v(2 + n);
                    v.head(2) = rate * x / (1.0 + x.squaredNorm());
                    v.tail(n) = a;
                    return tau(x) * v;
                },
                meta);
    return assemble("planar", field,
                    {"base R^2 with one source and k+1 = 3 artificial singularities on distinct rays",
                     "trivial bundle with the product connection: the lift of Y is Y itself",
                     "general position read as pairwise-distinct ray directions"});
}

double flat_damping(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

Field apply_effective_damping(const Field& field, const ScalarFn& gauge, const std::string& gauge_name) {
    const Chart& chart = field.chart();
    Rng rng(0xda5eULL);
    auto sampler = [&]() -> Vec {
        switch (chart.kind()) {
            case ChartKind::sphere5: return rng.sphere_point(6);
            case ChartKind::triangle: {
                double u = rng.uniform(), v = rng.uniform();
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                return Vec{{u, v}};
            }
            default: {
                Vec p(chart.dimension());
                for (int i = 0; i < chart.dimension(); ++i) {
                    p[i] = chart.is_angle(i) ? rng.uniform(0.0, kTwoPi) : rng.uniform(-4.0, 4.0);
                }
                return p;
            }
        }
    };
    for (int i = 0; i < 1000; ++i) {
        if (gauge(sampler()) < 0.0) {
            throw std::invalid_argument("apply_effective_damping: gauge " + gauge_name + " is negative");
        }
    }
    return Field("h(" + gauge_name + ")*" + field.name(), chart,
                 [field, gauge](const Vec& p) -> Vec {
                     const double theta = flat_damping(gauge(p));
                     if (theta == 0.0) return Vec::Zero(p.size());
                     return theta * field(p);
                 },
                 field.metadata());
}

namespace {

// Calls visit(lambda) for every node of the N^n tensor grid on the torus.
template <class Visit>
void for_each_node(int rank, int nodes, Visit&& visit) {
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    Vec lambda = Vec::Zero(rank);
    const double step = kTwoPi / nodes;
    while (true) {
        for (int i = 0; i < rank; ++i) lambda[i] = step * idx[i];
        visit(lambda);
        int i = 0;
        while (i < rank && idx[i] == nodes - 1) idx[i++] = 0;
        if (i == rank) break;
        ++idx[i];
    }
}

// Neumaier summation; a plain sum over N^3 nodes drifts by ~1e-14.
void compensated_add(double& sum, double& carry, double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
}

}  // namespace

ScalarFn haar_average_function(const ScalarFn& rho, const Chart& chart, int nodes) {
    if (nodes < 4) throw std::invalid_argument("haar_average_function: need at least 4 nodes");
    const int rank = chart.torus_rank();
    if (rank < 1) throw std::invalid_argument("haar_average_function: chart has no torus action");
    return [rho, chart, nodes, rank](const Vec& p) {
        double sum = 0.0, carry = 0.0;
        long count = 0;
        for_each_node(rank, nodes, [&](const Vec& lambda) {
            compensated_add(sum, carry, rho(chart.act(lambda, p)));
            ++count;
        });
        return (sum + carry) / static_cast<double>(count);
    };
}

Field haar_average_field(const Field& z, int nodes) {
    if (nodes < 4) throw std::invalid_argument("haar_average_field: need at least 4 nodes");
    const Chart chart = z.chart();
    const int rank = chart.torus_rank();
    if (rank < 1) throw std::invalid_argument("haar_average_field: chart has no torus action");
    FieldMetadata meta = z.metadata();
    meta.invariant = true;
    return Field("avg(" + z.name() + ")", chart,
                 [z, chart, nodes, rank](const Vec& p) -> Vec {
                     const int dim = chart.dimension();
                     Vec sum = Vec::Zero(dim), carry = Vec::Zero(dim);
                     long count = 0;
                     for_each_node(rank, nodes, [&](const Vec& lambda) {
                         const Vec v = chart.act_tangent(-lambda, z(chart.act(lambda, p)));
                         for (int i = 0; i < dim; ++i) compensated_add(sum[i], carry[i], v[i]);
                         ++count;
                     });
                     return Vec((sum + carry) / static_cast<double>(count));
                 },
                 meta);
}

ConstructionManifest build_s5(const Vec& a) {
    return assemble("s5", describing_field_s5(a),
                    {"S^5 with the standard T^3 action; base is the open triangle via pi(y) = "
                     "(y1^2+y2^2, y3^2+y4^2)",
                     "flat connection; lifted base field Y' written in ambient coordinates",
                     "tau = rho * d1 * d2^2 * d3^3 with rho = x1^10 x2^10 (1-x1-x2)^10",
                     "the non-free set carries order >= 10 instead of infinite order"});
}

}  // namespace torusflow

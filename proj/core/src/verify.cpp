#include "torusflow/verify.hpp"

#include "torusflow/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace torusflow {

VerificationReport make_report(std::string name, double residual, double tolerance, long samples,
                               std::string property, Comparison comparison) {
    VerificationReport r;
    r.name = std::move(name);
    r.max_residual = residual;
    r.tolerance = tolerance;
    r.comparison = comparison;
    r.samples = samples;
    r.property = std::move(property);
    r.passed = comparison == Comparison::at_most ? residual <= tolerance : residual >= tolerance;
    return r;
}

bool all_passed(const std::vector<VerificationReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

namespace {

void require_product(const Chart& chart, const char* who) {
    if (chart.kind() != ChartKind::product) {
        throw std::invalid_argument(std::string(who) + ": field must live on a product(k, n) chart");
    }
}

Vec product_sample(Rng& rng, int k, int n, double radius) {
    Vec p(k + n);
    if (k > 0) p.head(k) = rng.ball_point(k, radius);
    if (n > 0) p.tail(n) = rng.angles(n);
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------

VerificationReport commutant_basis_check(int k, const Vec& a, const BasisCheckOptions& options) {
    if (k < 1 || a.size() < 1) throw std::invalid_argument("commutant_basis_check: need k, n >= 1");
    return commutant_basis_check(radial_plus_affine(k, a), options);
}

VerificationReport commutant_basis_check(const Field& field, const BasisCheckOptions& options) {
    const Chart& chart = field.chart();
    require_product(chart, "commutant_basis_check");
    const int k = chart.k(), n = chart.n();

    std::vector<std::pair<std::string, Field>> basis;
    for (int j = 0; j < k; ++j) {
        for (int l = 0; l < k; ++l) {
            basis.emplace_back("x" + std::to_string(j + 1) + "*d/dx" + std::to_string(l + 1),
                               linear_basis_field(k, n, j, l));
        }
    }
    for (int r = 0; r < n; ++r) basis.emplace_back("d/dtheta" + std::to_string(r + 1), angle_field(k, n, r));

    Rng rng(options.seed);
    std::vector<Vec> points;
    for (int i = 0; i < options.samples; ++i) points.push_back(product_sample(rng, k, n, options.sample_radius));

    std::vector<double> worst(basis.size(), 0.0);
    parallel_for(basis.size(), [&](std::size_t b) {
        for (const Vec& p : points) {
            worst[b] = std::max(worst[b], lie_bracket(field, basis[b].second, p, options.fd_step).norm());
        }
    });
    const double max_res = worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
    VerificationReport r = make_report("commutant_basis", max_res, options.tolerance,
                                       options.samples, "basis x_j d/dx_l, d/dtheta_r commutes with xi + T");
    for (std::size_t b = 0; b < basis.size(); ++b) r.breakdown.emplace_back(basis[b].first, worst[b]);
    std::ostringstream os;
    os << basis.size() << " basis elements (k^2 + n = " << k * k + n << ") on " << chart.tag();
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------

namespace {

struct ScalarTerm {
    std::vector<int> powers;  // monomial exponents in x
    std::vector<int> nu;      // Fourier multi-index
    bool is_sine = false;
};

void enumerate_monomials(int k, int degree, std::vector<int>& current, int slot,
                         std::vector<std::vector<int>>& out) {
    if (slot == k) {
        out.push_back(current);
        return;
    }
    int used = 0;
    for (int i = 0; i < slot; ++i) used += current[i];
    for (int e = 0; e + used <= degree; ++e) {
        current[slot] = e;
        enumerate_monomials(k, degree, current, slot + 1, out);
    }
    current[slot] = 0;
}

// Multi-indices in [-m, m]^n whose first nonzero entry is positive, plus 0.
std::vector<std::vector<int>> half_lattice(int n, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> nu(static_cast<std::size_t>(n), -m);
    while (true) {
        const auto first = std::find_if(nu.begin(), nu.end(), [](int v) { return v != 0; });
        if (first == nu.end() || *first > 0) out.push_back(nu);
        int i = 0;
        while (i < n && nu[i] == m) nu[i++] = -m;
        if (i == n) break;
        ++nu[i];
    }
    return out;
}

std::vector<ScalarTerm> scalar_terms(int k, int n, int d, int m) {
    std::vector<std::vector<int>> monos;
    std::vector<int> cur(static_cast<std::size_t>(k), 0);
    enumerate_monomials(k, d, cur, 0, monos);
    std::vector<ScalarTerm> out;
    for (const auto& nu : half_lattice(n, m)) {
        const bool zero = std::all_of(nu.begin(), nu.end(), [](int v) { return v == 0; });
        for (const auto& pw : monos) {
            out.push_back({pw, nu, false});
            if (!zero) out.push_back({pw, nu, true});
        }
    }
    return out;
}

// Value and gradient (x then theta) of one scalar ansatz term.
double eval_term(const ScalarTerm& t, const Vec& p, int k, int n, Vec& grad) {
    double mono = 1.0;
    for (int i = 0; i < k; ++i) mono *= std::pow(p[i], t.powers[i]);
    double phase = 0.0;
    for (int r = 0; r < n; ++r) phase += t.nu[r] * p[k + r];
    const double trig = t.is_sine ? std::sin(phase) : std::cos(phase);
    const double dtrig = t.is_sine ? std::cos(phase) : -std::sin(phase);
    grad.setZero(k + n);
    for (int i = 0; i < k; ++i) {
        if (t.powers[i] == 0) continue;
        double dm = t.powers[i] * std::pow(p[i], t.powers[i] - 1);
        for (int j = 0; j < k; ++j) {
            if (j != i) dm *= std::pow(p[j], t.powers[j]);
        }
        grad[i] = dm * trig;
    }
    for (int r = 0; r < n; ++r) grad[k + r] = mono * t.nu[r] * dtrig;
    return mono * trig;
}

}  // namespace

CommutantProbeReport commutant_dimension_probe(const Field& field, const ProbeOptions& options) {
    return commutant_dimension_probe(std::vector<Field>{field}, options);
}

CommutantProbeReport commutant_dimension_probe(const std::vector<Field>& fields, const ProbeOptions& o) {
    if (fields.empty()) throw std::invalid_argument("commutant_dimension_probe: no fields");
    const Chart chart = fields.front().chart();
    require_product(chart, "commutant_dimension_probe");
    for (const auto& f : fields) {
        if (!(f.chart() == chart)) throw std::invalid_argument("commutant_dimension_probe: mixed charts");
    }
    if (o.degree_x < 0 || o.degree_theta < 0) throw std::invalid_argument("commutant_dimension_probe: negative degree");
    const int k = chart.k(), n = chart.n(), dim = k + n;
    const auto terms = scalar_terms(k, n, o.degree_x, o.degree_theta);
    const int m_terms = static_cast<int>(terms.size());
    if (o.collocation < m_terms) {
        throw std::invalid_argument("commutant_dimension_probe: underdetermined, need at least " +
                                    std::to_string(m_terms) + " collocation points (got " +
                                    std::to_string(o.collocation) + ")");
    }

    CommutantProbeReport rep;
    rep.k = k;
    rep.n = n;
    rep.degree_x = o.degree_x;
    rep.degree_theta = o.degree_theta;
    rep.scalar_terms = m_terms;
    rep.unknowns = m_terms * dim;
    rep.collocation = o.collocation;
    rep.equations = o.collocation * dim * static_cast<int>(fields.size());
    rep.rank_epsilon = o.rank_epsilon;
    rep.min_gap = o.min_gap;
    {
        std::ostringstream os;
        os << "coefficients: polynomials of degree <= " << o.degree_x << " in x times trigonometric "
           << "polynomials of degree <= " << o.degree_theta << " per angle; " << m_terms
           << " scalar terms x " << dim << " components; certifies an upper bound within this ansatz only";
        rep.ansatz = os.str();
    }

    Rng rng(o.seed);
    std::vector<Vec> points;
    for (int i = 0; i < o.collocation; ++i) {
        Vec p(dim);
        if (k > 0) p.head(k) = rng.annulus_point(k, o.annulus_min, o.annulus_max);
        if (n > 0) p.tail(n) = rng.angles(n);
        points.push_back(p);
    }

    const int s = static_cast<int>(fields.size());
    Mat a = Mat::Zero(rep.equations, rep.unknowns);
    parallel_for(points.size(), [&](std::size_t pi) {
        const Vec& p = points[pi];
        Vec grad;
        for (int fi = 0; fi < s; ++fi) {
            const Vec xp = fields[fi](p);
            const Mat jac = jacobian(fields[fi], p, o.jacobian_step);
            const int row0 = (static_cast<int>(pi) * s + fi) * dim;
            for (int t = 0; t < m_terms; ++t) {
                const double phi = eval_term(terms[t], p, k, n, grad);
                const double along = grad.dot(xp);
                for (int c = 0; c < dim; ++c) {
                    // [X, phi e_c] = (X . grad phi) e_c - phi DX e_c
                    const int col = t * dim + c;
                    a.block(row0, col, dim, 1) = -phi * jac.col(c);
                    a(row0 + c, col) += along;
                }
            }
        }
    });
    // Scale columns by the size of the ansatz term itself (value and
    // gradient over the collocation set), not by the column norm: columns of
    // commuting fields are pure finite-difference noise and must stay small.
    for (int t = 0; t < m_terms; ++t) {
        double size = 0.0;
        Vec grad;
        for (const Vec& p : points) {
            const double phi = eval_term(terms[t], p, k, n, grad);
            size += phi * phi + grad.squaredNorm();
        }
        size = std::sqrt(size);
        if (size > 0.0) a.middleCols(t * dim, dim) /= size;
    }

    Eigen::BDCSVD<Mat> svd(a);
    const Vec sv = svd.singularValues();
    rep.singular_values.assign(sv.data(), sv.data() + sv.size());
    // Columns beyond the row count contribute zero singular values as well.
    for (long i = sv.size(); i < a.cols(); ++i) rep.singular_values.push_back(0.0);
    const double cut = o.rank_epsilon * (rep.singular_values.empty() ? 0.0 : rep.singular_values.front());
    int rank = 0;
    for (double v : rep.singular_values) {
        if (v >= cut && v > 0.0) ++rank;
    }
    rep.estimated_dimension = static_cast<int>(rep.singular_values.size()) - rank;
    if (rep.estimated_dimension > 0 && rank > 0) {
        const double below = rep.singular_values[static_cast<std::size_t>(rank)];
        rep.gap_ratio = below > 0.0 ? rep.singular_values[static_cast<std::size_t>(rank - 1)] / below
                                    : std::numeric_limits<double>::max();
    }
    rep.gap_ok = rep.gap_ratio >= o.min_gap;
    return rep;
}

// ---------------------------------------------------------------------------

PointMap linear_automorphism(const Mat& phi, const Vec& lambda) {
    const int k = static_cast<int>(phi.rows());
    if (phi.rows() != phi.cols()) throw std::invalid_argument("linear_automorphism: phi must be square");
    return [phi, lambda, k](const Vec& p) -> Vec {
        Vec q(p.size());
        q.head(k) = phi * p.head(k);
        q.tail(lambda.size()) = wrap_angles(p.tail(lambda.size()) + lambda);
        return q;
    };
}

PointMap torus_matrix_map(int k, const Mat& c) {
    return [k, c](const Vec& p) -> Vec {
        Vec q = p;
        q.tail(c.rows()) = wrap_angles(c * p.tail(c.cols()));
        (void)k;
        return q;
    };
}

PointMap base_translation(int n, const Vec& shift) {
    return [n, shift](const Vec& p) -> Vec {
        Vec q = p;
        q.head(shift.size()) += shift;
        (void)n;
        return q;
    };
}

PointMap flow_as_map(const Field& field, double s, const IntegratorConfig& cfg) {
    return [field, s, cfg](const Vec& p) -> Vec { return flow_map(field, p, s, cfg); };
}

VerificationReport conjugation_residual(const std::string& name, const PointMap& map, const Field& field,
                                        const ConjugationOptions& o) {
    const Chart& chart = field.chart();
    Rng rng(o.seed);
    std::vector<Vec> points;
    for (int i = 0; i < o.samples; ++i) {
        if (chart.kind() == ChartKind::product) {
            points.push_back(product_sample(rng, chart.k(), chart.n(), o.sample_radius));
        } else {
            points.push_back(box_sampler(chart, -o.sample_radius, o.sample_radius)(rng));
        }
    }
    std::vector<double> finite(points.size(), 0.0), infinitesimal(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t i) {
        const Vec& p = points[i];
        const Vec lhs = map(flow_map(field, p, o.time, o.integrator));
        const Vec rhs = flow_map(field, map(p), o.time, o.integrator);
        finite[i] = chart.distance(chart.normalize(lhs), chart.normalize(rhs));
        infinitesimal[i] = pushforward_residual(map, field, p, o.fd_step);
    });
    const double fin = *std::max_element(finite.begin(), finite.end());
    const double inf = *std::max_element(infinitesimal.begin(), infinitesimal.end());
    VerificationReport r = make_report(name, fin, o.tolerance, o.samples,
                                       "F o Phi_t = Phi_t o F for automorphisms of the field");
    r.breakdown.emplace_back("finite", fin);
    r.breakdown.emplace_back("infinitesimal", inf);
    const bool inf_pass = inf <= o.tolerance;
    r.breakdown.emplace_back("tests_agree", inf_pass == r.passed ? 1.0 : 0.0);
    std::ostringstream os;
    os << "t = " << o.time << ", " << o.samples << " samples; infinitesimal test "
       << (inf_pass ? "passes" : "fails");
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------

namespace {

Vec generic_frequencies(int n) {
    static const double roots[] = {1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0};
    if (n > 8) throw std::invalid_argument("generic_frequencies: n <= 8");
    Vec a(n);
    for (int i = 0; i < n; ++i) a[i] = std::sqrt(roots[i]);
    return a;
}

}  // namespace

VerificationReport remark_1_1_demo(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("remark_1_1_demo: need n >= 1");
    const Vec a = generic_frequencies(n);
    const Field t = affine_torus_field(a);
    const Chart chart = t.chart();
    const Field constant = constant_field(chart, Vec::Ones(n), "sum d/dtheta_j");
    const Field sine("sin(theta_1) d/dtheta_1", chart, [n](const Vec& p) -> Vec {
        Vec v = Vec::Zero(n);
        v[0] = std::sin(p[0]);
        return v;
    });

    Rng rng(seed);
    double constant_bracket = 0.0, sine_bracket = 0.0;
    const int samples = 200;
    for (int i = 0; i < samples; ++i) {
        const Vec p = rng.angles(n);
        constant_bracket = std::max(constant_bracket, lie_bracket(t, constant, p).norm());
        sine_bracket = std::max(sine_bracket, lie_bracket(t, sine, p).norm());
    }

    std::vector<Field> fundamental;
    for (int r = 0; r < n; ++r) fundamental.push_back(angle_field(1, n, r));
    ProbeOptions po;
    po.degree_x = 2;
    po.degree_theta = 1;
    po.collocation = 200;
    po.seed = seed;
    const CommutantProbeReport probe = commutant_dimension_probe(fundamental, po);

    VerificationReport r = make_report("remark_1_1", constant_bracket, 1e-8, samples,
                                       "invariant combinations of the fundamental fields commute with T");
    // Closed form: [T, sin(theta_1) d/dtheta_1] = a_1 cos(theta_1) d/dtheta_1.
    const bool sine_breaks = sine_bracket >= 0.5 * a[0];
    const bool enlarged = probe.estimated_dimension > n;
    r.passed = r.passed && sine_breaks && enlarged;
    r.breakdown.emplace_back("constant_bracket", constant_bracket);
    r.breakdown.emplace_back("sine_bracket", sine_bracket);
    r.breakdown.emplace_back("fundamental_commutant_dimension", probe.estimated_dimension);
    std::ostringstream os;
    os << "n = " << n << "; theta-dependent coefficient " << (sine_breaks ? "breaks" : "keeps")
       << " commutation; with an x factor the commutant of the fundamental fields has dimension "
       << probe.estimated_dimension << " > n";
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------

PointSampler manifest_sampler(const ConstructionManifest& m) {
    const Chart chart = m.field.chart();
    if (m.scenario == "line") return box_sampler(chart, -1.0, 5.0);
    if (m.scenario == "planar") {
        const int n = chart.n();
        return [n](Rng& rng) -> Vec {
            Vec p(2 + n);
            p.head(2) = rng.ball_point(2, 2.0);
            p.tail(n) = rng.angles(n);
            return p;
        };
    }
    if (m.scenario == "s5") {
        // Interior of the orbit space, away from the non-free set.
        return [](Rng& rng) -> Vec {
            while (true) {
                const Vec y = rng.sphere_point(6);
                const double x1 = y[0] * y[0] + y[1] * y[1];
                const double x2 = y[2] * y[2] + y[3] * y[3];
                if (x1 >= 0.05 && x2 >= 0.05 && 1.0 - x1 - x2 >= 0.05) return y;
            }
        };
    }
    return box_sampler(chart, -1.0, 1.0);
}

Trajectory fiber_orbit(const Field& field, const Vec& p, int samples, double spacing,
                       const IntegratorConfig& cfg, TimeDirection direction) {
    if (samples < 2 || !(spacing > 0.0)) throw std::invalid_argument("fiber_orbit: bad sampling");
    const double speed = field(p).norm();
    if (speed == 0.0) throw std::invalid_argument("fiber_orbit: field vanishes at the start point");
    const Field unit = ((direction == TimeDirection::forward ? 1.0 : -1.0) / speed) * field;
    std::vector<double> times(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) times[i] = spacing * i;
    return integrate(unit, p, 0.0, times.back(), cfg, times);
}

std::vector<VerificationReport> verify_manifest(const ConstructionManifest& m, const ManifestCheckOptions& o) {
    std::vector<VerificationReport> out;
    const Field& field = m.field;
    const Chart& chart = field.chart();
    const int rank = chart.torus_rank();
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            VerificationReport r = make_report(name, std::numeric_limits<double>::infinity(), 0.0, 0,
                                               "check raised an error");
            r.passed = false;
            r.detail = e.what();
            out.push_back(std::move(r));
        }
    };

    // Zeros: the field vanishes along every inventory fiber.
    guarded("zero_set", [&] {
        Rng rng(Rng::derive(o.seed, 1));
        double worst = 0.0;
        long count = 0;
        for (const auto& f : m.inventory) {
            for (int i = 0; i < o.zero_samples; ++i) {
                const Vec p = (i == 0 || rank == 0) ? f.representative : chart.act(rng.angles(rank), f.representative);
                worst = std::max(worst, field(p).norm());
                ++count;
            }
        }
        VerificationReport r = make_report("zero_set", worst, o.zero_tolerance, count,
                                           "declared singular fibers are zeros of the field");
        r.detail = std::to_string(m.inventory.size()) + " inventory fibers";
        out.push_back(std::move(r));
    });

    guarded("sources_not_zeros", [&] {
        double smallest = std::numeric_limits<double>::infinity();
        long count = 0;
        for (const auto& f : field.metadata().fibers) {
            if (f.role != FiberRole::source) continue;
            smallest = std::min(smallest, field(f.representative).norm());
            ++count;
        }
        if (count == 0) return;
        out.push_back(make_report("sources_not_zeros", smallest, std::numeric_limits<double>::min(), count,
                                  "the torus part keeps the field nonzero on source fibers",
                                  Comparison::at_least));
    });

    for (const auto& f : m.inventory) {
        guarded("order:" + f.id, [&] {
            const SingularityReport s = estimate_order(field, f.representative, o.orders);
            VerificationReport r;
            if (f.order_is_lower_bound) {
                r = make_report("order:" + f.id, s.estimated_order, f.order - 1.0,
                                static_cast<long>(s.radii.size()) * o.orders.directions,
                                "order of nullity along the fiber is at least the declared bound",
                                Comparison::at_least);
            } else {
                r = make_report("order:" + f.id, std::abs(s.estimated_order - f.order), o.orders.order_tolerance,
                                static_cast<long>(s.radii.size()) * o.orders.directions,
                                "order of nullity along the fiber matches the declared order");
                r.passed = r.passed && s.r_squared >= o.orders.min_r_squared && !s.degenerate;
            }
            r.breakdown.emplace_back("estimated_order", s.estimated_order);
            r.breakdown.emplace_back("declared_order", f.order);
            r.breakdown.emplace_back("r_squared", s.r_squared);
            out.push_back(std::move(r));
        });
    }

    guarded("distinct_orders", [&] {
        int repeats = 0;
        for (std::size_t i = 0; i < m.inventory.size(); ++i) {
            for (std::size_t j = i + 1; j < m.inventory.size(); ++j) {
                if (m.inventory[i].order == m.inventory[j].order) ++repeats;
            }
        }
        VerificationReport r = make_report("distinct_orders", repeats, 0.0,
                                           static_cast<long>(m.inventory.size()),
                                           "singular fibers carry pairwise distinct orders");
        r.detail = std::to_string(repeats) + " repeated pairs";
        out.push_back(std::move(r));
    });

    if (rank > 0) {
        guarded("flow_commutation", [&] {
            const PointSampler sampler = manifest_sampler(m);
            std::vector<double> res(static_cast<std::size_t>(o.commutation_samples), 0.0);
            parallel_for(res.size(), [&](std::size_t i) {
                Rng rng(Rng::derive(Rng::derive(o.seed, 2), i));
                const Vec p = sampler(rng);
                const Vec lambda = rng.angles(rank);
                res[i] = flow_commutation_residual(field, lambda, p, o.commutation_time, o.integrator);
            });
            const double worst = *std::max_element(res.begin(), res.end());
            out.push_back(make_report("flow_commutation", worst, o.commutation_tolerance,
                                      o.commutation_samples, "the flow commutes with the torus action"));
        });
    }

    if (o.census_samples > 0) {
        guarded("basin_census", [&] {
            const BasinCensus c = basin_census(field, o.census_samples, Rng::derive(o.seed, 3),
                                               manifest_sampler(m), o.census_horizon, o.classify);
            VerificationReport r = make_report("basin_census", c.classified_fraction, o.census_min_fraction,
                                               o.census_samples,
                                               "almost every point has a source fiber as alpha-limit",
                                               Comparison::at_least);
            for (const auto& [id, count] : c.counts) r.breakdown.emplace_back(id, count);
            r.breakdown.emplace_back("unclassified", c.unclassified_fraction);
            out.push_back(std::move(r));
        });
    }

    if (rank > 0 && o.equidistribution_samples > 1) {
        for (const auto& f : field.metadata().fibers) {
            if (f.role != FiberRole::source) continue;
            guarded("equidistribution:" + f.id, [&] {
                const int bins = o.equidistribution_bins > 0 ? o.equidistribution_bins : (rank <= 2 ? 10 : 6);
                const Trajectory tr = fiber_orbit(field, f.representative, o.equidistribution_samples,
                                                  o.equidistribution_spacing, o.equidistribution_integrator,
                                                  TimeDirection::backward);
                const double disc = equidistribution_discrepancy(tr, bins, 1e-3);
                VerificationReport r = make_report("equidistribution:" + f.id, disc,
                                                   o.equidistribution_tolerance, o.equidistribution_samples,
                                                   "orbits on source fibers are dense (equidistributed)");
                r.breakdown.emplace_back("bins_per_angle", bins);
                if (!m.declared_dense) r.detail = "frequencies not declared dense";
                out.push_back(std::move(r));
            });
        }
    }
    return out;
}

}  // namespace torusflow

#pragma once

#include "torusflow/construction.hpp"
#include "torusflow/flow.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace torusflow {

/// How the residual is compared with the tolerance. Negative controls
/// (maps that must fail to be automorphisms) use at_least.
enum class Comparison { at_most, at_least };

struct VerificationReport {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::at_most;
    bool passed = false;
    long samples = 0;
    std::string property;  ///< which mathematical property the check exercises
    std::string detail;
    std::vector<std::pair<std::string, double>> breakdown;
};

/// Fills `passed` from the residual, tolerance and comparison.
VerificationReport make_report(std::string name, double residual, double tolerance, long samples,
                               std::string property, Comparison comparison = Comparison::at_most);

// --- commutant of xi + T -----------------------------------------------------

struct BasisCheckOptions {
    int samples = 1000;
    std::uint64_t seed = 11;
    double fd_step = 1e-4;
    double tolerance = 1e-6;
    double sample_radius = 2.0;  ///< x drawn uniformly from the ball of this radius
};

/// max ||[X, b]|| over the basis {x_j d/dx_l, d/dtheta_r} with X = xi + T(a),
/// or X = `field` when given (for perturbed models). Breakdown lists every
/// basis element.
VerificationReport commutant_basis_check(int k, const Vec& a, const BasisCheckOptions& options = {});
VerificationReport commutant_basis_check(const Field& field, const BasisCheckOptions& options = {});

struct ProbeOptions {
    int degree_x = 2;
    int degree_theta = 2;
    int collocation = 500;
    std::uint64_t seed = 5;
    double annulus_min = 0.5;
    double annulus_max = 1.5;
    double rank_epsilon = 1e-8;  ///< relative to the largest singular value
    double min_gap = 1e3;
    double jacobian_step = 1e-5;
};

struct CommutantProbeReport {
    std::string ansatz;
    int k = 0;
    int n = 0;
    int degree_x = 0;
    int degree_theta = 0;
    int scalar_terms = 0;  ///< monomials times trigonometric functions
    int unknowns = 0;      ///< scalar_terms * (k + n)
    int collocation = 0;
    int equations = 0;
    std::vector<double> singular_values;  ///< descending
    int estimated_dimension = 0;
    double gap_ratio = 0.0;  ///< smallest kept / largest discarded singular value
    double rank_epsilon = 0.0;
    double min_gap = 0.0;
    bool gap_ok = false;
};

/// Nullspace dimension of Y -> ([X_1, Y], ..., [X_s, Y]) restricted to fields
/// Y with coefficients polynomial of degree <= d in x and trigonometric of
/// degree <= m in each angle, sampled at collocation points from
/// {annulus_min <= |x| <= annulus_max} x T^n. All fields must live on the same
/// product(k, n) chart. Throws std::invalid_argument when the collocation
/// count cannot determine the unknowns (message carries the required count).
CommutantProbeReport commutant_dimension_probe(const std::vector<Field>& fields,
                                               const ProbeOptions& options = {});
CommutantProbeReport commutant_dimension_probe(const Field& field, const ProbeOptions& options = {});

// --- automorphism tests ------------------------------------------------------

struct ConjugationOptions {
    int samples = 50;
    std::uint64_t seed = 13;
    double time = 5.0;
    double tolerance = 1e-6;
    double sample_radius = 1.0;
    double fd_step = 1e-5;
    IntegratorConfig integrator{1e-12, 1e-13};
};

/// Finite-time test max ||F(Phi_t(p)) - Phi_t(F(p))|| (chart distance) as
/// max_residual; the infinitesimal test max ||DF X - X o F|| is in the
/// breakdown under "infinitesimal" and must agree in pass/fail.
VerificationReport conjugation_residual(const std::string& name, const PointMap& map,
                                        const Field& field, const ConjugationOptions& options = {});

/// F(x, theta) = (phi x, theta + lambda) for a linear phi.
PointMap linear_automorphism(const Mat& phi, const Vec& lambda);
/// F(x, theta) = (x, C theta) for an integer matrix C.
PointMap torus_matrix_map(int k, const Mat& c);
/// F(x, theta) = (x + shift, theta).
PointMap base_translation(int n, const Vec& shift);
/// Phi_s of the field itself.
PointMap flow_as_map(const Field& field, double s, const IntegratorConfig& cfg = {1e-12, 1e-13});

/// Brackets of sum f_j d/dtheta_j with the affine field T on T^n: constant f
/// commutes, f_1 = sin(theta_1) does not; and the commutant of the fundamental
/// fields alone on product(1, n) exceeds n once coefficients may depend on x.
VerificationReport remark_1_1_demo(int n, std::uint64_t seed = 17);

// --- manifests ---------------------------------------------------------------

struct ManifestCheckOptions {
    std::uint64_t seed = 2024;
    int zero_samples = 64;
    double zero_tolerance = 1e-12;
    OrderOptions orders;
    int commutation_samples = 100;
    double commutation_time = 5.0;
    double commutation_tolerance = 1e-6;
    IntegratorConfig integrator{1e-12, 1e-14};
    int census_samples = 1000;
    double census_min_fraction = 0.99;
    double census_horizon = 1e24;
    ClassifyConfig classify;
    int equidistribution_samples = 100000;
    int equidistribution_bins = 0;  ///< 0 picks 10 for n <= 2, 6 otherwise
    double equidistribution_tolerance = 0.05;
    double equidistribution_spacing = 0.2;
    IntegratorConfig equidistribution_integrator{1e-8, 1e-12, 0.0,
                                                 std::numeric_limits<double>::infinity(), 10'000'000};
};

/// Sampler used for the census: the region the basin statement is about.
PointSampler manifest_sampler(const ConstructionManifest& manifest);

/// Runs zero-set, order, distinctness, commutation, census and
/// equidistribution checks. Failures are reported, never thrown.
std::vector<VerificationReport> verify_manifest(const ConstructionManifest& manifest,
                                                const ManifestCheckOptions& options = {});

/// Unit-speed trajectory along the fiber through p, sampled at `samples`
/// equally spaced times. Follow source fibers backward, where they attract.
Trajectory fiber_orbit(const Field& field, const Vec& p, int samples, double spacing,
                       const IntegratorConfig& cfg = {1e-11, 1e-13},
                       TimeDirection direction = TimeDirection::forward);

bool all_passed(const std::vector<VerificationReport>& reports);

}  // namespace torusflow

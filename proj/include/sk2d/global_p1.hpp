#pragma once

#include "sk2d/holonomy.hpp"
#include "sk2d/kw_solver.hpp"
#include "sk2d/sk_core.hpp"

#include <optional>
#include <vector>

namespace sk2d {

// Cone point on the projective line. `order` is the cone order of the metric
// (w ~ |z - p|^beta with beta = 2 * order at a finite point).
struct ConeDatum {
    complex position{0.0, 0.0};
    bool at_infinity = false;
    double order = 0.0;
};

struct ConeBudget {
    double beta_sum = 0.0;   // sum of metric exponents beta_j = 2 * order_j
    bool satisfied = false;  // beta_sum >= -4
    // The budget inequality assumes every order > -1; families with an
    // order -3 point at infinity fall outside it.
    bool hypothesis_ok = true;
};

ConeBudget cone_budget(const std::vector<ConeDatum>& cones);

// Discrete bounded-domain Gauss-Bonnet on the annulus r_in <= |z - center|
// <= r_out: returns (integral of K dA plus the boundary geodesic-curvature
// terms, Euler-characteristic target). The target is 0 for an annulus; the
// defect measures discretization error only. Curvature by finite differences
// of log w. Throws std::domain_error on nonpositive w.
std::pair<double, double> gauss_bonnet_bounded(
    const std::function<double(complex)>& w, double r_in, double r_out,
    int n_rho, int n_theta, complex center = {0.0, 0.0});

// Moebius transformation (a z + b) / (c z + d).
struct MobiusMap {
    complex a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
    complex apply(complex z) const { return (a * z + b) / (c * z + d); }
    complex inverse(complex zeta) const {
        return (d * zeta - b) / (-c * zeta + a);
    }
    complex d_inverse(complex zeta) const {
        complex q = -c * zeta + a;
        return (a * d - b * c) / (q * q);
    }
};

// The unique Moebius map sending (z1, z2, z3) to (0, 1, -1). Fixed
// normalization convention for comparing families.
MobiusMap mobius_normalizer(complex z1, complex z2, complex z3);

struct P1Options {
    int global_n_rho = 224;
    int global_n_theta = 160;
    int local_n_rho = 224;
    int local_n_theta = 64;
    // The far field is affine in rho, so a large outer radius costs few
    // nodes; it buys a >= 2 decade window for the order fit at infinity.
    double outer_radius_factor = 600.0;  // times the puncture spread
    double hole_radius_factor = 0.05;    // times the nearest puncture distance
    double local_r_min = 1e-8;           // absolute inner radius of local annuli
    double local_outer_factor = 0.35;    // times the nearest-neighbour distance
    double mask_factor = 0.55;           // Dirichlet staircase radius / local outer
    int max_schwarz_iters = 30;
    double schwarz_tol = 1e-7;
    double newton_tol = 1e-10;           // grid-coordinate residual per subproblem
    int max_newton_iters = 40;
};

// A singular special Kahler metric on P^1 built from the constant-negative-
// curvature (Picard) metric with cones of order alpha_j / 2 < 1/2 at the
// punctures and order -3 at infinity. w_sk = e^{-v} where
// Delta v = e^{2v} away from the punctures.
class P1Family {
public:
    std::vector<ConeDatum> punctures;  // finite cones plus the infinity marker
    std::vector<double> alpha;
    complex center{0.0, 0.0};
    double outer_radius = 0.0;
    double hole_radius = 0.0;
    int moduli_dim = 0;

    // Domain-decomposition state: the global chart solution and, per
    // puncture, the deep local solution in the variable
    // V = v + alpha_j * log|z - z_j|.
    std::optional<ScalarField> global_v;
    std::vector<ScalarField> local_V;
    std::vector<OneFormField> local_dV;  // Cartesian gradient of V
    std::vector<double> local_r_out;

    bool converged = false;
    double schwarz_delta = 0.0;     // last interface update, sup norm
    double newton_residual = 0.0;   // worst subproblem residual, grid coords
    double overlap_mismatch = 0.0;  // global vs local v on the seam circles
    // Documented comparison scale for "families differ": discretization-level
    // agreement is what solver determinism guarantees below it.
    double solver_tol = 1e-3;

    std::vector<double> fitted_orders;     // per finite puncture, target alpha/2
    double fitted_order_infinity = 0.0;    // target -3

    // Conformal exponent v of the curvature -1 metric e^{2v} |dz|^2; prefers
    // the deep local chart near punctures. Throws std::domain_error outside
    // all charts.
    double v_at(complex z) const;
    double w_sk(complex z) const { return std::exp(-v_at(z)); }
};

// Solves the Picard problem for k >= 3 distinct finite punctures with
// alpha_j < 1 and sum alpha_j > 2 (both enforced), then fits the cone data.
// Throws std::domain_error on bad cone data, std::runtime_error if the
// solve does not converge.
P1Family p1_family_construct(const std::vector<complex>& punctures,
                             const std::vector<double>& alpha,
                             const P1Options& opt = {});

// Re-solves with puncture `index` moved by `displacement`.
P1Family family_perturb(const P1Family& fam, int index, complex displacement,
                        const P1Options& opt = {});

// Connection evaluator of the special Kahler triple (Re z, v, 0) on the deep
// annulus of puncture j; valid where the local chart is.
ConnectionEvalFn puncture_connection(const P1Family& fam, int j);

// Parallel transport around puncture j at radius `r_loop` (defaults to the
// geometric middle of the local annulus).
Eigen::Matrix2d puncture_holonomy(const P1Family& fam, int j,
                                  double r_loop = 0.0);

// Sup over sample points of the relative difference of the two metrics after
// Moebius-normalizing the first three punctures of each family to (0, 1, -1).
double normalized_metric_difference(const P1Family& f1, const P1Family& f2,
                                    int n_samples = 200);

}  // namespace sk2d

#pragma once

#include "sk2d/grid.hpp"
#include "sk2d/sk_core.hpp"

#include <optional>
#include <vector>

namespace sk2d {

// ---------------------------------------------------------------------------
// Shared damped-Newton core for semilinear problems
//     (d2/drho2 + d2/dtheta2) U = S(node) * exp(2 U)
// in grid coordinates, with per-node boundary roles. Used by solve_kw and by
// the P^1 construction (which needs Neumann/Robin rows).
// ---------------------------------------------------------------------------
namespace newton {

enum class Role : unsigned char {
    Interior,
    Dirichlet,        // U = bc
    NeumannInner,     // dU/drho = bc at the inner row (one-sided, 2nd order)
    NeumannOuter,     // dU/drho = bc at the outer row
    RobinAsymInner,   // dU/drho = exp(2U) exp(sigma*rho)/sigma at the inner row
};

struct Problem {
    GridPtr grid;
    std::vector<Role> role;      // per node
    std::vector<double> bc;      // Dirichlet value / prescribed slope
    std::vector<double> source;  // S >= 0 per node
    double robin_sigma = 0.0;
    std::vector<double> u0;      // initial guess per node
};

struct Report {
    int iterations = 0;
    double final_residual = 0.0;  // inf-norm, grid coordinates
    std::vector<double> damping;
    bool converged = false;
};

// Solves to inf-norm grid residual <= tol (interior rows). Damping by
// backtracking with halving, minimum step 2^-20, accept on residual decrease.
std::pair<ScalarField, Report> solve(const Problem& p, double tol,
                                     int max_iter);

}  // namespace newton

// ---------------------------------------------------------------------------
// Public Kazdan-Warner solver: Delta u = q e^{2u} on an annulus, Dirichlet
// data on both boundary circles.
// ---------------------------------------------------------------------------

struct KWProblem {
    GridPtr grid;
    ScalarField source_q;                 // q = |dh + a phi|^2 >= 0
    std::vector<double> boundary_inner;   // u on the inner circle, per theta
    std::vector<double> boundary_outer;   // u on the outer circle, per theta
    std::optional<ScalarField> initial_u; // default: linear in rho
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;  // max |Delta u - q e^{2u}|, flat metric
    std::vector<double> damping_history;
    bool converged = false;
};

// Newton step solves (Delta - 2 q e^{2u_k}) delta = -(Delta u_k - q e^{2u_k});
// the multiplier is nonnegative, so the linearised operator is invertible
// with Dirichlet conditions. Non-convergence is reported, not thrown.
std::pair<ScalarField, SolveReport> solve_kw(const KWProblem& p, double tol,
                                             int max_iter = 50);

// h = A log r + h0 with Delta h0 = 0; boundary vectors hold the full h.
ScalarField solve_harmonic(GridPtr grid,
                           const std::vector<double>& boundary_inner,
                           const std::vector<double>& boundary_outer,
                           double log_coefficient);

// Max interior |Delta u - q e^{2u}| (flat metric).
double kw_residual(const ScalarField& u, const ScalarField& q);

}  // namespace sk2d

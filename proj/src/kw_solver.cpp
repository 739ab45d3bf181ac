#include "sk2d/kw_solver.hpp"

#include "sk2d/calculus.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace sk2d {

namespace newton {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void residual(const Problem& p, const Eigen::VectorXd& u, Eigen::VectorXd& r) {
    const auto& g = *p.grid;
    double ir2 = 1.0 / (g.drho() * g.drho());
    double it2 = 1.0 / (g.dtheta() * g.dtheta());
    double ih = 1.0 / (2.0 * g.drho());
    for (int i = 0; i < g.n_rho(); ++i) {
        for (int j = 0; j < g.n_theta(); ++j) {
            int n = g.index(i, j);
            switch (p.role[n]) {
                case Role::Interior: {
                    double lap =
                        ir2 * (u[g.index(i + 1, j)] - 2.0 * u[n] +
                               u[g.index(i - 1, j)]) +
                        it2 * (u[g.index(i, j + 1)] - 2.0 * u[n] +
                               u[g.index(i, j - 1)]);
                    r[n] = lap - p.source[n] * std::exp(2.0 * u[n]);
                    break;
                }
                case Role::Dirichlet:
                    r[n] = u[n] - p.bc[n];
                    break;
                case Role::NeumannInner:
                    r[n] = ih * (-3.0 * u[n] + 4.0 * u[g.index(1, j)] -
                                 u[g.index(2, j)]) -
                           p.bc[n];
                    break;
                case Role::NeumannOuter:
                    r[n] = ih * (3.0 * u[n] - 4.0 * u[g.index(i - 1, j)] +
                                 u[g.index(i - 2, j)]) -
                           p.bc[n];
                    break;
                case Role::RobinAsymInner: {
                    double s = p.robin_sigma;
                    double flux = std::exp(2.0 * u[n]) *
                                  std::exp(s * g.rho(0)) / s;
                    r[n] = ih * (-3.0 * u[n] + 4.0 * u[g.index(1, j)] -
                                 u[g.index(2, j)]) -
                           flux;
                    break;
                }
            }
        }
    }
}

void jacobian(const Problem& p, const Eigen::VectorXd& u, SpMat& J) {
    const auto& g = *p.grid;
    double ir2 = 1.0 / (g.drho() * g.drho());
    double it2 = 1.0 / (g.dtheta() * g.dtheta());
    double ih = 1.0 / (2.0 * g.drho());
    std::vector<Triplet> trip;
    trip.reserve(5 * g.size());
    for (int i = 0; i < g.n_rho(); ++i) {
        for (int j = 0; j < g.n_theta(); ++j) {
            int n = g.index(i, j);
            switch (p.role[n]) {
                case Role::Interior:
                    trip.emplace_back(n, g.index(i + 1, j), ir2);
                    trip.emplace_back(n, g.index(i - 1, j), ir2);
                    trip.emplace_back(n, g.index(i, j + 1), it2);
                    trip.emplace_back(n, g.index(i, j - 1), it2);
                    trip.emplace_back(
                        n, n,
                        -2.0 * (ir2 + it2) -
                            2.0 * p.source[n] * std::exp(2.0 * u[n]));
                    break;
                case Role::Dirichlet:
                    trip.emplace_back(n, n, 1.0);
                    break;
                case Role::NeumannInner:
                    trip.emplace_back(n, n, -3.0 * ih);
                    trip.emplace_back(n, g.index(1, j), 4.0 * ih);
                    trip.emplace_back(n, g.index(2, j), -ih);
                    break;
                case Role::NeumannOuter:
                    trip.emplace_back(n, n, 3.0 * ih);
                    trip.emplace_back(n, g.index(i - 1, j), -4.0 * ih);
                    trip.emplace_back(n, g.index(i - 2, j), ih);
                    break;
                case Role::RobinAsymInner: {
                    double s = p.robin_sigma;
                    double dflux = 2.0 * std::exp(2.0 * u[n]) *
                                   std::exp(s * g.rho(0)) / s;
                    trip.emplace_back(n, n, -3.0 * ih - dflux);
                    trip.emplace_back(n, g.index(1, j), 4.0 * ih);
                    trip.emplace_back(n, g.index(2, j), -ih);
                    break;
                }
            }
        }
    }
    J.setFromTriplets(trip.begin(), trip.end());
}

}  // namespace

std::pair<ScalarField, Report> solve(const Problem& p, double tol,
                                     int max_iter) {
    const auto& g = *p.grid;
    int n = g.size();
    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(p.u0.data(), n);
    Eigen::VectorXd r(n), rtrial(n);
    SpMat J(n, n);
    Eigen::SparseLU<SpMat> lu;
    bool analyzed = false;

    Report rep;
    residual(p, u, r);
    double rn = r.norm();
    for (int it = 0; it < max_iter; ++it) {
        if (r.lpNorm<Eigen::Infinity>() <= tol) {
            rep.converged = true;
            break;
        }
        jacobian(p, u, J);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("newton::solve: singular Jacobian");
        Eigen::VectorXd delta = lu.solve(-r);

        // Backtrack on the residual norm; e^{2u} blowup protection.
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= std::ldexp(1.0, -20)) {
            Eigen::VectorXd utrial = u + lambda * delta;
            residual(p, utrial, rtrial);
            if (rtrial.norm() < rn) {
                u = utrial;
                r = rtrial;
                rn = rtrial.norm();
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        rep.damping.push_back(lambda);
        ++rep.iterations;
        if (!accepted) break;  // stagnation
    }
    residual(p, u, r);
    if (r.lpNorm<Eigen::Infinity>() <= tol) rep.converged = true;
    rep.final_residual = r.lpNorm<Eigen::Infinity>();

    std::vector<double> vals(u.data(), u.data() + n);
    return {ScalarField(p.grid, std::move(vals)), rep};
}

}  // namespace newton

std::pair<ScalarField, SolveReport> solve_kw(const KWProblem& p, double tol,
                                             int max_iter) {
    const auto& g = *p.grid;
    if (!(tol > 0.0)) throw std::invalid_argument("solve_kw: tol must be > 0");
    detail::check_same_grid(p.grid, p.source_q.grid_ptr());
    if (static_cast<int>(p.boundary_inner.size()) != g.n_theta() ||
        static_cast<int>(p.boundary_outer.size()) != g.n_theta())
        throw std::invalid_argument("solve_kw: boundary data size mismatch");
    for (double q : p.source_q.values())
        if (q < -1e-14)
            throw std::domain_error("solve_kw: source q must be nonnegative");

    newton::Problem np;
    np.grid = p.grid;
    np.role.assign(g.size(), newton::Role::Interior);
    np.bc.assign(g.size(), 0.0);
    np.source.resize(g.size());
    np.u0.resize(g.size());
    for (int i = 0; i < g.n_rho(); ++i) {
        double w = static_cast<double>(i) / (g.n_rho() - 1);
        double e2r = std::exp(2.0 * g.rho(i));
        for (int j = 0; j < g.n_theta(); ++j) {
            int n = g.index(i, j);
            np.source[n] = e2r * std::max(0.0, p.source_q.at(i, j));
            // Default initial guess: linear interpolation in rho.
            np.u0[n] = (1.0 - w) * p.boundary_inner[j] + w * p.boundary_outer[j];
        }
    }
    for (int j = 0; j < g.n_theta(); ++j) {
        np.role[g.index(0, j)] = newton::Role::Dirichlet;
        np.bc[g.index(0, j)] = p.boundary_inner[j];
        np.role[g.index(g.n_rho() - 1, j)] = newton::Role::Dirichlet;
        np.bc[g.index(g.n_rho() - 1, j)] = p.boundary_outer[j];
    }
    if (p.initial_u) {
        detail::check_same_grid(p.grid, p.initial_u->grid_ptr());
        np.u0 = p.initial_u->values();
    }

    // The requested tolerance is in the flat metric; the grid-coordinate
    // residual differs by the factor e^{2 rho} per row, largest at the inner
    // circle.
    double grid_tol = tol * std::exp(2.0 * g.rho_min());
    auto [u, nrep] = newton::solve(np, grid_tol, max_iter);

    SolveReport rep;
    rep.iterations = nrep.iterations;
    rep.damping_history = nrep.damping;
    rep.final_residual = kw_residual(u, p.source_q);
    rep.converged = rep.final_residual <= tol;
    return {std::move(u), rep};
}

ScalarField solve_harmonic(GridPtr grid,
                           const std::vector<double>& boundary_inner,
                           const std::vector<double>& boundary_outer,
                           double log_coefficient) {
    const auto& g = *grid;
    if (static_cast<int>(boundary_inner.size()) != g.n_theta() ||
        static_cast<int>(boundary_outer.size()) != g.n_theta())
        throw std::invalid_argument("solve_harmonic: boundary size mismatch");

    // h = A rho + h0; the smooth part h0 solves the linear Dirichlet problem
    // (one Newton step of the core with zero source).
    newton::Problem np;
    np.grid = grid;
    np.role.assign(g.size(), newton::Role::Interior);
    np.bc.assign(g.size(), 0.0);
    np.source.assign(g.size(), 0.0);
    np.u0.assign(g.size(), 0.0);
    for (int j = 0; j < g.n_theta(); ++j) {
        np.role[g.index(0, j)] = newton::Role::Dirichlet;
        np.bc[g.index(0, j)] = boundary_inner[j] - log_coefficient * g.rho_min();
        np.role[g.index(g.n_rho() - 1, j)] = newton::Role::Dirichlet;
        np.bc[g.index(g.n_rho() - 1, j)] =
            boundary_outer[j] - log_coefficient * g.rho_max();
    }
    auto [h0, rep] = newton::solve(np, 1e-11, 3);
    if (!rep.converged)
        throw std::runtime_error("solve_harmonic: linear solve failed");

    ScalarField h(grid);
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            h.at(i, j) = h0.at(i, j) + log_coefficient * g.rho(i);
    return h;
}

double kw_residual(const ScalarField& u, const ScalarField& q) {
    detail::check_same_grid(u.grid_ptr(), q.grid_ptr());
    const auto& g = u.grid();
    ScalarField lap = laplacian(u);
    double m = 0.0;
    for (int i = 1; i < g.n_rho() - 1; ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            m = std::max(m, std::abs(lap.at(i, j) -
                                     q.at(i, j) *
                                         std::exp(2.0 * u.at(i, j))));
    return m;
}

}  // namespace sk2d

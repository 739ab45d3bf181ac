#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sk2d/kw_solver.hpp"
#include "sk2d/sk_core.hpp"

#include <cmath>

using namespace sk2d;

namespace {

std::vector<double> ring_values(const LogPolarGrid& g, int row,
                                const std::function<double(complex)>& f) {
    std::vector<double> out(g.n_theta());
    for (int j = 0; j < g.n_theta(); ++j) out[j] = f(g.point(row, j));
    return out;
}

double max_err(const ScalarField& u, const std::function<double(complex)>& f) {
    const auto& g = u.grid();
    double e = 0.0;
    for (int i = 1; i < g.n_rho() - 1; ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            e = std::max(e, std::abs(u.at(i, j) - f(g.point(i, j))));
    return e;
}

double hyperbolic_u(complex z) { return std::log(2.0 / (1.0 - std::norm(z))); }

double punctured_u(complex z) {
    double r = std::abs(z);
    return -std::log(r * (-std::log(r)));
}

KWProblem constant_source_problem(GridPtr g, double q,
                                  const std::function<double(complex)>& u) {
    ScalarField src = sample(g, [q](complex) { return q; });
    return KWProblem{g, src, ring_values(*g, 0, u),
                     ring_values(*g, g->n_rho() - 1, u), std::nullopt};
}

}  // namespace

TEST_CASE("harmonic solve recovers its manufactured solutions") {
    GridPtr g = make_grid(std::log(0.1), 0.0, 65, 64);

    auto logr = [](complex z) { return std::log(std::abs(z)); };
    ScalarField h1 = solve_harmonic(g, ring_values(*g, 0, logr),
                                    ring_values(*g, g->n_rho() - 1, logr), 1.0);
    CHECK(max_err(h1, logr) < 1e-9);

    auto rez = [](complex z) { return z.real(); };
    ScalarField h2 = solve_harmonic(g, ring_values(*g, 0, rez),
                                    ring_values(*g, g->n_rho() - 1, rez), 0.0);
    CHECK(max_err(h2, rez) < 1e-3);

    auto mixed = [](complex z) { return 2.0 * std::log(std::abs(z)) + z.real(); };
    ScalarField h3 = solve_harmonic(g, ring_values(*g, 0, mixed),
                                    ring_values(*g, g->n_rho() - 1, mixed), 2.0);
    CHECK(max_err(h3, mixed) < 1e-3);
}

TEST_CASE("zero source linearizes exactly: one Newton step") {
    GridPtr g = make_grid(std::log(0.1), 0.0, 49, 48);
    auto harm = [](complex z) { return z.real() + 0.3; };
    KWProblem p = constant_source_problem(g, 0.0, harm);
    auto [u, rep] = solve_kw(p, 1e-10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(max_err(u, harm) < 1e-3);
}

TEST_CASE("negative source is rejected") {
    GridPtr g = make_grid(std::log(0.1), 0.0, 49, 48);
    KWProblem p = constant_source_problem(g, -1.0, hyperbolic_u);
    CHECK_THROWS_AS(solve_kw(p, 1e-10), std::domain_error);
}

TEST_CASE("hyperbolic disc potential is recovered") {
    GridPtr g = make_grid(std::log(0.1), std::log(0.9), 97, 96);
    KWProblem p = constant_source_problem(g, 1.0, hyperbolic_u);
    auto [u, rep] = solve_kw(p, 1e-10);
    CHECK(rep.converged);
    CHECK(rep.final_residual <= 1e-10);
    CHECK(max_err(u, hyperbolic_u) < 5e-3);

    // Residual of the recovered discrete solution, against the exact one.
    ScalarField exact = sample(g, hyperbolic_u);
    double h = g->drho();
    CHECK(kw_residual(exact, p.source_q) < 5e3 * h * h);
}

TEST_CASE("punctured-disc potential is recovered on a deep annulus") {
    GridPtr g = make_grid(std::log(1e-3), std::log(0.5), 97, 96);
    KWProblem p = constant_source_problem(g, 1.0, punctured_u);
    // The flat-metric residual carries a factor 1/r^2 at the inner edge, so
    // its roundoff floor scales with 1/r_in^2.
    auto [u, rep] = solve_kw(p, 1e-6);
    CHECK(rep.converged);
    CHECK(max_err(u, punctured_u) < 5e-3);
}

TEST_CASE("kw_residual spot values") {
    GridPtr g = make_grid(std::log(0.1), 0.0, 49, 48);
    ScalarField zero = sample(g, [](complex) { return 0.0; });
    ScalarField one = sample(g, [](complex) { return 1.0; });
    CHECK(kw_residual(zero, zero) == doctest::Approx(0.0));
    CHECK(kw_residual(zero, one) == doctest::Approx(1.0));
}

TEST_CASE("comparison principle: larger source, smaller solution") {
    GridPtr g = make_grid(std::log(0.1), std::log(0.9), 65, 64);
    KWProblem p1 = constant_source_problem(g, 1.0, hyperbolic_u);
    KWProblem p2 = constant_source_problem(g, 2.0, hyperbolic_u);
    auto [u1, r1] = solve_kw(p1, 1e-10);
    auto [u2, r2] = solve_kw(p2, 1e-10);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    double worst = -1e300;
    for (int i = 0; i < g->n_rho(); ++i)
        for (int j = 0; j < g->n_theta(); ++j)
            worst = std::max(worst, u2.at(i, j) - u1.at(i, j));
    CHECK(worst <= 1e-12);
}

TEST_CASE("accepted Newton steps never increase the residual") {
    GridPtr g = make_grid(std::log(0.1), std::log(0.9), 65, 64);
    KWProblem p = constant_source_problem(g, 1.0, hyperbolic_u);
    auto [u, rep] = solve_kw(p, 1e-10);
    CHECK(rep.converged);
    for (double d : rep.damping_history) {
        CHECK(d > 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("solved triple closes the loop through the connection") {
    // Solve for u of the log family from its own source and boundary data,
    // then check the resulting connection is flat at discretization order.
    GridPtr g = make_grid(std::log(0.05), std::log(0.9), 97, 96);
    auto h_exact = [](complex z) { return std::log(std::abs(z)) - 1.0; };
    auto u_exact = [&](complex z) { return -std::log(-h_exact(z)); };
    ScalarField h = sample(g, h_exact);
    SampledTriple probe(h, sample(g, u_exact), 0.0);
    ScalarField q = kw_source(probe);

    KWProblem p{g, q, ring_values(*g, 0, u_exact),
                ring_values(*g, g->n_rho() - 1, u_exact), std::nullopt};
    auto [u, rep] = solve_kw(p, 1e-10);
    REQUIRE(rep.converged);
    SampledTriple t(h, u, 0.0);
    ConnectionForm c = connection_from_triple(t);
    CHECK(flatness_residual(c) < residual_tolerance(*g));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sk2d/families.hpp"
#include "sk2d/global_p1.hpp"

#include <cmath>

using namespace sk2d;

namespace {

P1Options coarse_options() {
    // Fast settings for smoke tests; acceptance uses the defaults.
    P1Options opt;
    opt.global_n_rho = 120;
    opt.global_n_theta = 96;
    opt.local_n_rho = 144;
    opt.local_n_theta = 48;
    opt.schwarz_tol = 1e-5;
    return opt;
}

std::vector<complex> cube_roots() {
    return {complex{1.0, 0.0},
            std::polar(1.0, 2.0 * M_PI / 3.0),
            std::polar(1.0, 4.0 * M_PI / 3.0)};
}

}  // namespace

TEST_CASE("cone budget arithmetic") {
    // Order -3 at infinity plus three quarter-orders: beta-sum -4.5, and the
    // order -3 point breaks the budget hypothesis.
    std::vector<ConeDatum> a = {{complex{}, true, -3.0},
                                {complex{0.0, 0.0}, false, 0.25},
                                {complex{1.0, 0.0}, false, 0.25},
                                {complex{-1.0, 0.0}, false, 0.25}};
    ConeBudget ba = cone_budget(a);
    CHECK(ba.beta_sum == doctest::Approx(-4.5));
    CHECK(!ba.satisfied);
    CHECK(!ba.hypothesis_ok);

    // Four cones of order -1/2: beta-sum exactly -4, boundary case.
    std::vector<ConeDatum> b(4);
    for (auto& c : b) c.order = -0.5;
    ConeBudget bb = cone_budget(b);
    CHECK(bb.beta_sum == doctest::Approx(-4.0));
    CHECK(bb.satisfied);
    CHECK(bb.hypothesis_ok);

    // Orders at or below -1 violate the conical hypothesis.
    std::vector<ConeDatum> c(2);
    for (auto& x : c) x.order = -1.5;
    ConeBudget bc = cone_budget(c);
    CHECK(!bc.hypothesis_ok);
}

TEST_CASE("Moebius normalizer hits (0, 1, -1)") {
    complex z1{0.3, 0.7}, z2{-1.2, 0.4}, z3{2.0, -0.5};
    MobiusMap m = mobius_normalizer(z1, z2, z3);
    CHECK(std::abs(m.apply(z1)) < 1e-12);
    CHECK(std::abs(m.apply(z2) - complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(m.apply(z3) + complex{1.0, 0.0}) < 1e-12);

    complex z{0.17, -0.9};
    CHECK(std::abs(m.inverse(m.apply(z)) - z) < 1e-10);

    // d_inverse against a finite difference.
    complex zeta{0.4, 0.2};
    complex d{1e-6, 0.0};
    complex fd = (m.inverse(zeta + d) - m.inverse(zeta - d)) / (2.0 * d);
    CHECK(std::abs(m.d_inverse(zeta) - fd) < 1e-6);
}

TEST_CASE("bounded Gauss-Bonnet on reference metrics") {
    auto flat = [](complex) { return 1.0; };
    auto [l1, r1] = gauss_bonnet_bounded(flat, 0.1, 0.9, 128, 128);
    CHECK(r1 == 0.0);
    CHECK(std::abs(l1) < 1e-10);

    auto hyp = [](complex z) {
        double d = 1.0 - std::norm(z);
        return 4.0 / (d * d);
    };
    auto [l2, r2] = gauss_bonnet_bounded(hyp, 0.1, 0.9, 128, 128);
    CHECK(std::abs(l2) < 1e-2);

    ClosedFormMetric zn = liouville_zn(2);
    auto [l3a, r3a] = gauss_bonnet_bounded(zn.w, 0.1, 0.8, 64, 64);
    auto [l3b, r3b] = gauss_bonnet_bounded(zn.w, 0.1, 0.8, 128, 128);
    CHECK(std::abs(l3b) < 1e-2);
    CHECK(std::abs(l3b) <= std::abs(l3a) + 1e-10);

    auto bad = [](complex z) { return z.real(); };
    CHECK_THROWS_AS(gauss_bonnet_bounded(bad, 0.1, 0.9, 64, 64),
                    std::domain_error);
}

TEST_CASE("Picard preconditions are enforced") {
    std::vector<complex> z = cube_roots();
    CHECK_THROWS_AS(p1_family_construct(z, {0.5, 0.5, 0.5}, coarse_options()),
                    std::domain_error);
    CHECK_THROWS_AS(p1_family_construct(z, {1.1, 0.9, 0.9}, coarse_options()),
                    std::domain_error);
    CHECK_THROWS_AS(
        p1_family_construct({z[0], z[1]}, {0.9, 0.9}, coarse_options()),
        std::domain_error);
    CHECK_THROWS_AS(
        p1_family_construct({z[0], z[0], z[1]}, {0.9, 0.9, 0.9},
                            coarse_options()),
        std::domain_error);
}

TEST_CASE("symmetric 3-puncture family at coarse resolution") {
    P1Family fam =
        p1_family_construct(cube_roots(), {0.9, 0.9, 0.9}, coarse_options());
    CHECK(fam.converged);
    CHECK(fam.moduli_dim == 3);
    CHECK(fam.punctures.size() == 4);  // three finite cones + infinity
    CHECK(fam.punctures.back().at_infinity);
    CHECK(fam.punctures.back().order == doctest::Approx(-3.0).epsilon(1e-3));

    REQUIRE(fam.fitted_orders.size() == 3);
    for (double o : fam.fitted_orders) CHECK(std::abs(o - 0.45) < 0.1);
    CHECK(std::abs(fam.fitted_order_infinity + 3.0) < 0.15);

    // The cone data sits outside the curvature budget hypothesis, as the
    // order -3 point at infinity must.
    ConeBudget budget = cone_budget(fam.punctures);
    CHECK(!budget.hypothesis_ok);

    // Metric density positive and consistent between charts at a midpoint.
    complex probe{0.4, 0.1};
    CHECK(fam.w_sk(probe) > 0.0);

    // Holonomy around each puncture is elliptic with the predicted trace.
    for (int j = 0; j < 3; ++j) {
        Eigen::Matrix2d hol = puncture_holonomy(fam, j);
        MonodromyClass cls = classify(hol, 1e-3);
        INFO("puncture ", j, " trace ", cls.trace);
        CHECK(cls.tag == MonodromyTag::Elliptic);
        CHECK(std::abs(cls.trace - 2.0 * std::cos(M_PI * 0.9)) < 5e-2);
    }

    // Re-solving with a zero displacement reproduces the family.
    P1Family again = family_perturb(fam, 0, complex{0.0, 0.0}, coarse_options());
    CHECK(normalized_metric_difference(fam, again) < fam.solver_tol);
}

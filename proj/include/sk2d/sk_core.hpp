#pragma once

#include "sk2d/calculus.hpp"
#include "sk2d/grid.hpp"

#include <Eigen/Dense>
#include <optional>
#include <utility>

namespace sk2d {

// Closed-form scalar with analytic gradient, evaluable at arbitrary points.
struct ClosedScalar {
    std::function<double(complex)> value;
    std::function<void(complex, double&, double&)> grad;  // (d/dx, d/dy)
};

// Harmonic data (h, u, a) on a punctured annulus. The effective harmonic
// 1-form entering both the Kazdan-Warner source and the connection
// coefficients is a * phi; with that normalisation the source |dh + a phi|^2
// and 2 w11 = e^u (dh + a phi) - du are mutually consistent (the flatness
// residual of the exact families vanishes under refinement, which pins the
// factor of 2 empirically).
struct ClosedTriple {
    ClosedScalar h;
    ClosedScalar u;
    double a = 0.0;
    complex puncture{0.0, 0.0};
    double r_in = 1e-3;
    double r_out = 0.9;
};

struct SampledTriple {
    ScalarField h;
    ScalarField u;
    double a = 0.0;

    SampledTriple(ScalarField h_, ScalarField u_, double a_ = 0.0)
        : h(std::move(h_)), u(std::move(u_)), a(a_) {
        detail::check_same_grid(h.grid_ptr(), u.grid_ptr());
    }
};

SampledTriple sample_triple(GridPtr grid, const ClosedTriple& t);

// The two generating 1-forms; the full gl(2) matrix is
// [[w11, -*w11], [*w22, w22]].
struct ConnectionForm {
    OneFormField omega11;
    OneFormField omega22;
};

// Kazdan-Warner source q = |dh + a phi|^2 (dh by finite differences).
ScalarField kw_source(const SampledTriple& t);
double harmonicity_residual(const SampledTriple& t);
double kw_triple_residual(const SampledTriple& t);

ConnectionForm connection_from_triple(const SampledTriple& t);

// Pointwise closed-form connection, as a matrix-valued 1-form Mx dx + My dy.
struct MatOneForm {
    Eigen::Matrix2d mx;
    Eigen::Matrix2d my;
};
MatOneForm connection_at(const ClosedTriple& t, complex z);

// Components of (w11, w22) at a point, from closed-form data.
void connection_components_at(const ClosedTriple& t, complex z,
                              Eigen::Vector2d& w11, Eigen::Vector2d& w22);

// Assemble the gl(2) matrix 1-form from the two generating forms.
MatOneForm connection_matrix(const Eigen::Vector2d& w11,
                             const Eigen::Vector2d& w22);

// Max interior norm of d(omega) + omega ^ omega. All residuals in this
// module are reported in log-polar components (flat value weighted by r^2),
// the norm that is uniform over the annulus. `boundary_collar` (log-radius
// units) additionally excludes rows near both edges; refinement studies need
// a fixed evaluation region, since the rows nearest the boundary move with
// the grid and carry the largest truncation constants.
double flatness_residual(const ConnectionForm& c, double boundary_collar = 0.0);

// Max interior residuals of the two equations of the eta system
// (*d*eta = 2*(*eta ^ du) - 2 e^u |eta|^2 and the Kazdan-Warner equation
// in eta form), with eta = e^{-u} w11. The first is normalized pointwise by
// the magnitude of its terms, which grow like a negative power of r.
std::pair<double, double> eta_residual(const SampledTriple& t,
                                       double boundary_collar = 0.0);

// Holomorphic cubic coefficient Xi0 = (a/(2z) - i dh/dz)/2.
ComplexField cubic_form(const SampledTriple& t);

// Max interior |d(xi)/dzbar| weighted by r^2 (log-polar components, matching
// the other residual norms).
double holomorphy_residual(const ComplexField& xi);
complex cubic_form_at(const ClosedTriple& t, complex z);

// Metric density w = e^{-u} for g = w |dz|^2.
ScalarField metric_density(const SampledTriple& t);

// K = -Laplace(log w)/(2w); throws on nonpositive w.
ScalarField gaussian_curvature(const ScalarField& w);

// Checks Im F'' = -2h against both sign conventions on a slit annulus
// (branch arg z in (-pi, pi), samples near the cut excluded) and reports
// which one the data satisfies.
struct PrepotentialCheck {
    double residual_minus = 0.0;  // |Im F'' + 2h|
    double residual_plus = 0.0;   // |Im F'' - 2h|
    double best = 0.0;
    char matched_sign = '?';  // '-' for the Im F'' = -2h convention
};
PrepotentialCheck prepotential_consistency(
    const std::function<complex(complex)>& F, const ClosedScalar& h,
    double r_in, double r_out, int n_samples = 256);

// "~ 0" tolerance: max(1e-8, C * grid_spacing^2), C calibrated on the flat
// structure.
double residual_tolerance(const LogPolarGrid& g, double C = 50.0);

}  // namespace sk2d

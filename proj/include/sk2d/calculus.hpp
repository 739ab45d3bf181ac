#pragma once

#include "sk2d/grid.hpp"

namespace sk2d {

// Flat Laplacian (d2/dx2 + d2/dy2). In grid coordinates this is
// exp(-2 rho) * (d2/drho2 + d2/dtheta2); centered second order on interior
// rows, one-sided on the two boundary rows (first order there).
ScalarField laplacian(const ScalarField& f);

// Exterior derivative of a scalar: df = f_x dx + f_y dy.
OneFormField gradient(const ScalarField& f);

// Discrete d/dz = (d/dx - i d/dy)/2.
ComplexField wirtinger_dz(const ComplexField& f);
ComplexField wirtinger_dz(const ScalarField& f);

// d/dzbar = (d/dx + i d/dy)/2; vanishes on holomorphic samples.
ComplexField wirtinger_dzbar(const ComplexField& f);

// Hodge star with *dx = dy, *dy = -dx (so ** = -1 on 1-forms).
OneFormField hodge_star(const OneFormField& w);

// Circle loop for contour integrals and parallel transport.
struct Loop {
    complex center{0.0, 0.0};
    double radius = 1.0;
    int orientation = +1;  // +1 counterclockwise
    int n_steps = 0;       // hint; 0 = pick automatically

    complex point(double t) const {  // t in [0, 2pi]
        double s = orientation >= 0 ? t : -t;
        return center + radius * complex(std::cos(s), std::sin(s));
    }
    complex velocity(double t) const {  // d(point)/dt
        double s = orientation >= 0 ? t : -t;
        double o = orientation >= 0 ? 1.0 : -1.0;
        return radius * o * complex(-std::sin(s), std::cos(s));
    }
};

// Closed-form 1-form: components (a_x, a_y) at a point.
using OneFormFn = std::function<void(complex, double&, double&)>;

// The harmonic generator of H^1 of the punctured disc,
// phi = (y dx - x dy)/(x^2 + y^2), relative to `puncture`.
void phi_form(complex z, complex puncture, double& ax, double& ay);

// Loop integral of a closed-form 1-form; periodic trapezoid rule
// (spectrally accurate for smooth integrands).
double contour_integral(const OneFormFn& w, const Loop& loop);

// Same for a sampled 1-form, with bilinear interpolation onto the loop;
// throws std::domain_error if the loop leaves the field's annulus.
double contour_integral(const OneFormField& w, const Loop& loop);

}  // namespace sk2d

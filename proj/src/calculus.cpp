#include "sk2d/calculus.hpp"

#include <cmath>

namespace sk2d {

namespace {

// d/drho at row i, second order centered inside, second-order one-sided on
// the boundary rows.
template <typename T>
T d_rho(const LogPolarGrid& g, const std::vector<T>& v, int i, int j) {
    double h = g.drho();
    if (i == 0)
        return (-3.0 * v[g.index(0, j)] + 4.0 * v[g.index(1, j)] -
                v[g.index(2, j)]) /
               (2.0 * h);
    if (i == g.n_rho() - 1)
        return (3.0 * v[g.index(i, j)] - 4.0 * v[g.index(i - 1, j)] +
                v[g.index(i - 2, j)]) /
               (2.0 * h);
    return (v[g.index(i + 1, j)] - v[g.index(i - 1, j)]) / (2.0 * h);
}

template <typename T>
T d_theta(const LogPolarGrid& g, const std::vector<T>& v, int i, int j) {
    return (v[g.index(i, j + 1)] - v[g.index(i, j - 1)]) / (2.0 * g.dtheta());
}

template <typename T>
T d2_rho(const LogPolarGrid& g, const std::vector<T>& v, int i, int j) {
    double h2 = g.drho() * g.drho();
    if (i == 0)
        return (2.0 * v[g.index(0, j)] - 5.0 * v[g.index(1, j)] +
                4.0 * v[g.index(2, j)] - v[g.index(3, j)]) /
               h2;
    if (i == g.n_rho() - 1)
        return (2.0 * v[g.index(i, j)] - 5.0 * v[g.index(i - 1, j)] +
                4.0 * v[g.index(i - 2, j)] - v[g.index(i - 3, j)]) /
               h2;
    return (v[g.index(i + 1, j)] - 2.0 * v[g.index(i, j)] +
            v[g.index(i - 1, j)]) /
           h2;
}

template <typename T>
T d2_theta(const LogPolarGrid& g, const std::vector<T>& v, int i, int j) {
    double h2 = g.dtheta() * g.dtheta();
    return (v[g.index(i, j + 1)] - 2.0 * v[g.index(i, j)] +
            v[g.index(i, j - 1)]) /
           h2;
}

}  // namespace

ScalarField laplacian(const ScalarField& f) {
    const auto& g = f.grid();
    ScalarField out(f.grid_ptr());
    const auto& v = f.values();
    for (int i = 0; i < g.n_rho(); ++i) {
        double scale = std::exp(-2.0 * g.rho(i));
        for (int j = 0; j < g.n_theta(); ++j)
            out.at(i, j) = scale * (d2_rho(g, v, i, j) + d2_theta(g, v, i, j));
    }
    return out;
}

OneFormField gradient(const ScalarField& f) {
    const auto& g = f.grid();
    OneFormField out(f.grid_ptr());
    const auto& v = f.values();
    for (int i = 0; i < g.n_rho(); ++i) {
        double er = std::exp(-g.rho(i));
        for (int j = 0; j < g.n_theta(); ++j) {
            double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            double fr = d_rho(g, v, i, j);
            double ft = d_theta(g, v, i, j);
            out.ax(i, j) = er * (c * fr - s * ft);
            out.ay(i, j) = er * (s * fr + c * ft);
        }
    }
    return out;
}

namespace {

// Cartesian partials of a complex field, via the log-polar chain rule.
void cartesian_partials(const ComplexField& f, ComplexField& fx,
                        ComplexField& fy) {
    const auto& g = f.grid();
    const auto& v = f.values();
    for (int i = 0; i < g.n_rho(); ++i) {
        double er = std::exp(-g.rho(i));
        for (int j = 0; j < g.n_theta(); ++j) {
            double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            complex fr = d_rho(g, v, i, j);
            complex ft = d_theta(g, v, i, j);
            fx.at(i, j) = er * (c * fr - s * ft);
            fy.at(i, j) = er * (s * fr + c * ft);
        }
    }
}

}  // namespace

ComplexField wirtinger_dz(const ComplexField& f) {
    ComplexField fx(f.grid_ptr()), fy(f.grid_ptr());
    cartesian_partials(f, fx, fy);
    ComplexField out(f.grid_ptr());
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            out.at(i, j) =
                0.5 * (fx.at(i, j) - complex(0.0, 1.0) * fy.at(i, j));
    return out;
}

ComplexField wirtinger_dz(const ScalarField& f) {
    ComplexField c(f.grid_ptr());
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) c.at(i, j) = f.at(i, j);
    return wirtinger_dz(c);
}

ComplexField wirtinger_dzbar(const ComplexField& f) {
    ComplexField fx(f.grid_ptr()), fy(f.grid_ptr());
    cartesian_partials(f, fx, fy);
    ComplexField out(f.grid_ptr());
    const auto& g = f.grid();
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            out.at(i, j) =
                0.5 * (fx.at(i, j) + complex(0.0, 1.0) * fy.at(i, j));
    return out;
}

OneFormField hodge_star(const OneFormField& w) {
    const auto& g = w.grid();
    OneFormField out(w.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            out.ax(i, j) = -w.ay(i, j);
            out.ay(i, j) = w.ax(i, j);
        }
    return out;
}

void phi_form(complex z, complex puncture, double& ax, double& ay) {
    complex w = z - puncture;
    double r2 = std::norm(w);
    ax = w.imag() / r2;
    ay = -w.real() / r2;
}

double contour_integral(const OneFormFn& w, const Loop& loop) {
    int n = loop.n_steps > 0 ? loop.n_steps : 1024;
    double sum = 0.0;
    double dt = 2.0 * M_PI / n;
    for (int k = 0; k < n; ++k) {
        double t = k * dt;
        complex z = loop.point(t);
        complex v = loop.velocity(t);
        double ax, ay;
        w(z, ax, ay);
        sum += ax * v.real() + ay * v.imag();
    }
    return sum * dt;
}

double contour_integral(const OneFormField& w, const Loop& loop) {
    OneFormFn fn = [&w](complex z, double& ax, double& ay) {
        w.interp(z, ax, ay);  // throws domain_error if outside
    };
    Loop l = loop;
    if (l.n_steps <= 0) l.n_steps = 4 * w.grid().n_theta();
    return contour_integral(fn, l);
}

}  // namespace sk2d

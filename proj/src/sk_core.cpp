#include "sk2d/sk_core.hpp"

#include <cmath>

namespace sk2d {

SampledTriple sample_triple(GridPtr grid, const ClosedTriple& t) {
    ScalarField h = sample(grid, t.h.value);
    ScalarField u = sample(grid, t.u.value);
    return SampledTriple(std::move(h), std::move(u), t.a);
}

ScalarField kw_source(const SampledTriple& t) {
    const auto& g = t.h.grid();
    OneFormField dh = gradient(t.h);
    ScalarField q(t.h.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            double px, py;
            phi_form(g.point(i, j), g.center(), px, py);
            double ex = dh.ax(i, j) + t.a * px;
            double ey = dh.ay(i, j) + t.a * py;
            q.at(i, j) = ex * ex + ey * ey;
        }
    return q;
}

// Residuals are measured in log-polar coordinate components: the flat value
// at each node is weighted by r^2 = e^{2 rho}. The flat components of these
// equations grow like 1/r^2 toward the puncture, so the weighted norm is the
// one that is uniform over the annulus (and the one whose tolerance scales
// as grid_spacing^2 with an O(1) constant).

double harmonicity_residual(const SampledTriple& t) {
    const auto& g = t.h.grid();
    ScalarField lap = laplacian(t.h);
    double m = 0.0;
    for (int i = 1; i < g.n_rho() - 1; ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            m = std::max(m, std::exp(2.0 * g.rho(i)) * std::abs(lap.at(i, j)));
    return m;
}

double kw_triple_residual(const SampledTriple& t) {
    const auto& g = t.u.grid();
    ScalarField lap = laplacian(t.u);
    ScalarField q = kw_source(t);
    double m = 0.0;
    for (int i = 1; i < g.n_rho() - 1; ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            double r = lap.at(i, j) -
                       q.at(i, j) * std::exp(2.0 * t.u.at(i, j));
            m = std::max(m, std::exp(2.0 * g.rho(i)) * std::abs(r));
        }
    return m;
}

ConnectionForm connection_from_triple(const SampledTriple& t) {
    const auto& g = t.h.grid();
    OneFormField dh = gradient(t.h);
    OneFormField du = gradient(t.u);
    ConnectionForm c{OneFormField(t.h.grid_ptr()), OneFormField(t.h.grid_ptr())};
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            double px, py;
            phi_form(g.point(i, j), g.center(), px, py);
            double eu = std::exp(t.u.at(i, j));
            double ex = dh.ax(i, j) + t.a * px;
            double ey = dh.ay(i, j) + t.a * py;
            // 2 w11 = e^u (dh + a phi) - du, 2 w22 = -e^u (dh + a phi) - du;
            // the trace condition w11 + w22 = -du holds by construction.
            c.omega11.ax(i, j) = 0.5 * (eu * ex - du.ax(i, j));
            c.omega11.ay(i, j) = 0.5 * (eu * ey - du.ay(i, j));
            c.omega22.ax(i, j) = -0.5 * (eu * ex + du.ax(i, j));
            c.omega22.ay(i, j) = -0.5 * (eu * ey + du.ay(i, j));
        }
    return c;
}

void connection_components_at(const ClosedTriple& t, complex z,
                              Eigen::Vector2d& w11, Eigen::Vector2d& w22) {
    double hx, hy, ux, uy;
    t.h.grad(z, hx, hy);
    t.u.grad(z, ux, uy);
    double eu = std::exp(t.u.value(z));
    double px = 0.0, py = 0.0;
    if (t.a != 0.0) phi_form(z, t.puncture, px, py);
    double ex = hx + t.a * px;
    double ey = hy + t.a * py;
    w11 = {0.5 * (eu * ex - ux), 0.5 * (eu * ey - uy)};
    w22 = {-0.5 * (eu * ex + ux), -0.5 * (eu * ey + uy)};
}

MatOneForm connection_matrix(const Eigen::Vector2d& w11,
                             const Eigen::Vector2d& w22) {
    // Matrix pattern [[w11, -*w11], [*w22, w22]] with *(ax,ay) = (-ay,ax).
    MatOneForm m;
    m.mx << w11(0), w11(1), -w22(1), w22(0);
    m.my << w11(1), -w11(0), w22(0), w22(1);
    return m;
}

MatOneForm connection_at(const ClosedTriple& t, complex z) {
    Eigen::Vector2d w11, w22;
    connection_components_at(t, z, w11, w22);
    return connection_matrix(w11, w22);
}

namespace {

// d of a sampled 1-form: coefficient of dx^dy.
ScalarField exterior_d(const OneFormField& w) {
    const auto& g = w.grid();
    ScalarField p(w.grid_ptr()), q(w.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            p.at(i, j) = w.ax(i, j);
            q.at(i, j) = w.ay(i, j);
        }
    OneFormField dp = gradient(p);
    OneFormField dq = gradient(q);
    ScalarField out(w.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            out.at(i, j) = dq.ax(i, j) - dp.ay(i, j);
    return out;
}

double wedge(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

}  // namespace

double flatness_residual(const ConnectionForm& c, double boundary_collar) {
    const auto& g = c.omega11.grid();
    const OneFormField& w11 = c.omega11;
    const OneFormField& w22 = c.omega22;

    // Entries: m11 = w11, m12 = -*w11, m21 = *w22, m22 = w22.
    OneFormField m12(c.omega11.grid_ptr()), m21(c.omega11.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            m12.ax(i, j) = w11.ay(i, j);
            m12.ay(i, j) = -w11.ax(i, j);
            m21.ax(i, j) = -w22.ay(i, j);
            m21.ay(i, j) = w22.ax(i, j);
        }

    ScalarField d11 = exterior_d(w11), d12 = exterior_d(m12),
                d21 = exterior_d(m21), d22 = exterior_d(w22);

    // Curvature 2-form entries, F = d omega + omega ^ omega. Derivatives of
    // derivatives: stay two rows away from the boundary.
    double m = 0.0;
    for (int i = 2; i < g.n_rho() - 2; ++i) {
        if (g.rho(i) < g.rho_min() + boundary_collar ||
            g.rho(i) > g.rho_max() - boundary_collar)
            continue;
        for (int j = 0; j < g.n_theta(); ++j) {
            double wgt = std::exp(2.0 * g.rho(i));
            double a11x = w11.ax(i, j), a11y = w11.ay(i, j);
            double a12x = m12.ax(i, j), a12y = m12.ay(i, j);
            double a21x = m21.ax(i, j), a21y = m21.ay(i, j);
            double a22x = w22.ax(i, j), a22y = w22.ay(i, j);
            double f11 = d11.at(i, j) + wedge(a11x, a11y, a11x, a11y) +
                         wedge(a12x, a12y, a21x, a21y);
            double f12 = d12.at(i, j) + wedge(a11x, a11y, a12x, a12y) +
                         wedge(a12x, a12y, a22x, a22y);
            double f21 = d21.at(i, j) + wedge(a21x, a21y, a11x, a11y) +
                         wedge(a22x, a22y, a21x, a21y);
            double f22 = d22.at(i, j) + wedge(a21x, a21y, a12x, a12y) +
                         wedge(a22x, a22y, a22x, a22y);
            m = std::max({m, wgt * std::abs(f11), wgt * std::abs(f12),
                          wgt * std::abs(f21), wgt * std::abs(f22)});
        }
    }
    return m;
}

std::pair<double, double> eta_residual(const SampledTriple& t,
                                       double boundary_collar) {
    const auto& g = t.h.grid();
    ConnectionForm c = connection_from_triple(t);
    OneFormField du = gradient(t.u);

    OneFormField eta(t.h.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            double s = std::exp(-t.u.at(i, j));
            eta.ax(i, j) = s * c.omega11.ax(i, j);
            eta.ay(i, j) = s * c.omega11.ay(i, j);
        }

    OneFormField star_eta = hodge_star(eta);
    ScalarField d_star_eta = exterior_d(star_eta);
    ScalarField lap_u = laplacian(t.u);

    double r1 = 0.0, r2 = 0.0;
    for (int i = 2; i < g.n_rho() - 2; ++i) {
        if (g.rho(i) < g.rho_min() + boundary_collar ||
            g.rho(i) > g.rho_max() - boundary_collar)
            continue;
        for (int j = 0; j < g.n_theta(); ++j) {
            double wgt = std::exp(2.0 * g.rho(i));
            double eu = std::exp(t.u.at(i, j));
            double ex = eta.ax(i, j), ey = eta.ay(i, j);
            double n2 = ex * ex + ey * ey;
            // *d*eta = 2 * (*eta ^ du) - 2 e^u |eta|^2; on a 2-form * is the
            // dx^dy coefficient.
            double lhs1 = d_star_eta.at(i, j);
            double t1 = 2.0 * wedge(star_eta.ax(i, j), star_eta.ay(i, j),
                                    du.ax(i, j), du.ay(i, j));
            double t2 = 2.0 * eu * n2;
            // eta itself scales like a negative power of r (z^n families),
            // so the first equation is scored relative to its own terms.
            double scale = 1.0 + wgt * (std::abs(lhs1) + std::abs(t1) +
                                        std::abs(t2));
            r1 = std::max(r1, wgt * std::abs(lhs1 - (t1 - t2)) / scale);

            double bx = 2.0 * ex + std::exp(-t.u.at(i, j)) * du.ax(i, j);
            double by = 2.0 * ey + std::exp(-t.u.at(i, j)) * du.ay(i, j);
            double rhs2 = (bx * bx + by * by) * std::exp(2.0 * t.u.at(i, j));
            r2 = std::max(r2, wgt * std::abs(lap_u.at(i, j) - rhs2));
        }
    }
    return {r1, r2};
}

ComplexField cubic_form(const SampledTriple& t) {
    const auto& g = t.h.grid();
    ComplexField dhz = wirtinger_dz(t.h);
    ComplexField out(t.h.grid_ptr());
    const complex I{0.0, 1.0};
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            complex z = g.point(i, j) - g.center();
            out.at(i, j) = 0.5 * (t.a / (2.0 * z) - dhz.at(i, j) * I);
        }
    return out;
}

double holomorphy_residual(const ComplexField& xi) {
    const auto& g = xi.grid();
    ComplexField dbar = wirtinger_dzbar(xi);
    double m = 0.0;
    for (int i = 2; i < g.n_rho() - 2; ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            m = std::max(m,
                         std::exp(2.0 * g.rho(i)) * std::abs(dbar.at(i, j)));
    return m;
}

complex cubic_form_at(const ClosedTriple& t, complex z) {
    double hx, hy;
    t.h.grad(z, hx, hy);
    complex dhz = 0.5 * complex(hx, -hy);
    complex w = z - t.puncture;
    const complex I{0.0, 1.0};
    return 0.5 * (t.a / (2.0 * w) - dhz * I);
}

ScalarField metric_density(const SampledTriple& t) {
    const auto& g = t.u.grid();
    ScalarField w(t.u.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            w.at(i, j) = std::exp(-t.u.at(i, j));
    return w;
}

ScalarField gaussian_curvature(const ScalarField& w) {
    const auto& g = w.grid();
    ScalarField logw(w.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j) {
            double x = w.at(i, j);
            if (!(x > 0.0))
                throw std::domain_error(
                    "gaussian_curvature: metric density must be positive");
            logw.at(i, j) = std::log(x);
        }
    ScalarField lap = laplacian(logw);
    ScalarField k(w.grid_ptr());
    for (int i = 0; i < g.n_rho(); ++i)
        for (int j = 0; j < g.n_theta(); ++j)
            k.at(i, j) = -lap.at(i, j) / (2.0 * w.at(i, j));
    return k;
}

PrepotentialCheck prepotential_consistency(
    const std::function<complex(complex)>& F, const ClosedScalar& h,
    double r_in, double r_out, int n_samples) {
    PrepotentialCheck out;
    // Sample the slit annulus, arg z in (-0.9 pi, 0.9 pi): the branch cut
    // along the negative reals is excluded.
    int n_r = std::max(4, n_samples / 16);
    int n_t = std::max(8, n_samples / n_r);
    for (int ir = 0; ir < n_r; ++ir) {
        double r = r_in * std::pow(r_out / r_in, (ir + 0.5) / n_r);
        for (int it = 0; it < n_t; ++it) {
            double th = -0.9 * M_PI + 1.8 * M_PI * (it + 0.5) / n_t;
            complex z = std::polar(r, th);
            // F'' by 4th-order central differences; the step stays well away
            // from the cut for these sample points.
            double d = 1e-4 * r;
            auto d2 = [&](complex dir) {
                complex e = d * dir;
                return (-F(z + 2.0 * e) + 16.0 * F(z + e) - 30.0 * F(z) +
                        16.0 * F(z - e) - F(z - 2.0 * e)) /
                       (12.0 * d * d);
            };
            complex Fpp = d2(complex(1.0, 0.0));
            double im = Fpp.imag();
            double hv = h.value(z);
            out.residual_minus = std::max(out.residual_minus,
                                          std::abs(im + 2.0 * hv));
            out.residual_plus = std::max(out.residual_plus,
                                         std::abs(im - 2.0 * hv));
        }
    }
    if (out.residual_minus <= out.residual_plus) {
        out.best = out.residual_minus;
        out.matched_sign = '-';
    } else {
        out.best = out.residual_plus;
        out.matched_sign = '+';
    }
    return out;
}

double residual_tolerance(const LogPolarGrid& g, double C) {
    double h = std::max(g.drho(), g.dtheta());
    return std::max(1e-8, C * h * h);
}

}  // namespace sk2d

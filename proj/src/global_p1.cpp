#include "sk2d/global_p1.hpp"

#include "sk2d/asymptotics.hpp"
#include "sk2d/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sk2d {

ConeBudget cone_budget(const std::vector<ConeDatum>& cones) {
    ConeBudget b;
    for (const auto& c : cones) {
        b.beta_sum += 2.0 * c.order;
        if (c.order <= -1.0) b.hypothesis_ok = false;
    }
    b.satisfied = b.beta_sum >= -4.0 - 1e-12;
    return b;
}

std::pair<double, double> gauss_bonnet_bounded(
    const std::function<double(complex)>& w, double r_in, double r_out,
    int n_rho, int n_theta, complex center) {
    GridPtr g = make_grid(std::log(r_in), std::log(r_out), n_rho, n_theta,
                          center);
    ScalarField wf = sample(g, w);
    for (double v : wf.values())
        if (!(v > 0.0))
            throw std::domain_error("gauss_bonnet_bounded: w must be > 0");
    ScalarField K = gaussian_curvature(wf);

    // The identity is evaluated on the one-row-inset annulus so that both the
    // curvature and the boundary fluxes use centered stencils only.
    int lo = 1, hi = g->n_rho() - 2;

    // Area term: K dA = K w e^{2 rho} drho dtheta; trapezoid in rho, full
    // weight in the periodic theta direction.
    double area = 0.0;
    for (int i = lo; i <= hi; ++i) {
        double wrow = (i == lo || i == hi) ? 0.5 : 1.0;
        double e2r = std::exp(2.0 * g->rho(i));
        for (int j = 0; j < g->n_theta(); ++j)
            area += wrow * K.at(i, j) * wf.at(i, j) * e2r;
    }
    area *= g->drho() * g->dtheta();

    // Geodesic curvature terms reduce to the outward flux of
    // lambda = (1/2) log w through the boundary circles (the flat-circle
    // contributions +-2 pi cancel between the two components).
    auto lam = [&wf](int i, int j) { return 0.5 * std::log(wf.at(i, j)); };
    double ih = 1.0 / (2.0 * g->drho());
    double flux_out = 0.0, flux_in = 0.0;
    for (int j = 0; j < g->n_theta(); ++j) {
        flux_out += ih * (lam(hi + 1, j) - lam(hi - 1, j));
        flux_in += ih * (lam(lo + 1, j) - lam(lo - 1, j));
    }
    flux_out *= g->dtheta();
    flux_in *= g->dtheta();

    return {area + flux_out - flux_in, 0.0};
}

MobiusMap mobius_normalizer(complex z1, complex z2, complex z3) {
    if (std::abs(z1 - z2) < 1e-12 || std::abs(z2 - z3) < 1e-12 ||
        std::abs(z1 - z3) < 1e-12)
        throw std::invalid_argument("mobius_normalizer: points must be distinct");
    // (z1, z2, z3) -> (0, 1, inf) by the cross ratio, then (0, 1, inf) ->
    // (0, 1, -1) by w / (2 - w).
    complex p = z2 - z3, q = -z1 * (z2 - z3);
    complex r = z2 - z1, s = -z3 * (z2 - z1);
    MobiusMap m;
    m.a = p;
    m.b = q;
    m.c = 2.0 * r - p;
    m.d = 2.0 * s - q;
    return m;
}

namespace {

struct Layout {
    std::vector<complex> z;
    std::vector<double> alpha;
    double alpha_sum = 0.0;
    complex c;
    double spread = 0.0;  // max |z_j - c|
    double R = 0.0;
    double r_hole = 0.0;
    std::vector<double> r_out;
};

Layout plan_layout(const std::vector<complex>& zs,
                   const std::vector<double>& al, const P1Options& opt) {
    Layout lay;
    lay.z = zs;
    lay.alpha = al;
    int k = static_cast<int>(zs.size());
    if (k < 3) throw std::domain_error("p1_family_construct: need k >= 3");
    if (al.size() != zs.size())
        throw std::invalid_argument("p1_family_construct: size mismatch");
    for (double a : al)
        if (!(a < 1.0))
            throw std::domain_error(
                "p1_family_construct: cone data needs alpha_j < 1");
    lay.alpha_sum = std::accumulate(al.begin(), al.end(), 0.0);
    if (!(lay.alpha_sum > 2.0))
        throw std::domain_error(
            "p1_family_construct: sum of alpha must exceed 2");

    double minsep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            minsep = std::min(minsep, std::abs(zs[i] - zs[j]));
    if (minsep < 1e-9)
        throw std::domain_error("p1_family_construct: punctures must be distinct");

    lay.c = std::accumulate(zs.begin(), zs.end(), complex{0.0, 0.0}) /
            double(k);
    auto extent = [&lay, &zs] {
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (complex z : zs) {
            mx = std::max(mx, std::abs(z - lay.c));
            mn = std::min(mn, std::abs(z - lay.c));
        }
        return std::pair<double, double>{mx, mn};
    };
    auto [mx, mn] = extent();
    if (mn < 0.05 * mx) {
        // A puncture sits on the chart center; nudge the center off it.
        lay.c += mx * complex(0.1234, 0.0789);
        std::tie(mx, mn) = extent();
    }
    lay.spread = mx;
    lay.R = opt.outer_radius_factor * mx;
    lay.r_hole = opt.hole_radius_factor * mn;

    lay.r_out.resize(k);
    for (int j = 0; j < k; ++j) {
        double dj = std::abs(zs[j] - lay.c);
        double room = std::min(0.9 * (dj - lay.r_hole), 0.9 * (lay.R - dj));
        double sep = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i)
            if (i != j) sep = std::min(sep, std::abs(zs[i] - zs[j]));
        lay.r_out[j] = opt.local_outer_factor * std::min(sep, room);
        if (!(lay.r_out[j] > 10.0 * opt.local_r_min))
            throw std::domain_error(
                "p1_family_construct: punctures too crowded for local charts");
    }
    return lay;
}

ScalarField solve_subproblem(newton::Problem& np, double tol, int max_iter,
                             const char* what, double& worst_residual) {
    auto [u, rep] = newton::solve(np, tol, max_iter);
    worst_residual = std::max(worst_residual, rep.final_residual);
    if (!rep.converged)
        throw std::runtime_error(std::string("p1_family_construct: ") + what +
                                 " subproblem stalled at residual " +
                                 std::to_string(rep.final_residual));
    return std::move(u);
}

}  // namespace

double P1Family::v_at(complex z) const {
    int k = static_cast<int>(alpha.size());
    for (int j = 0; j < k; ++j) {
        double rh = std::abs(z - punctures[j].position);
        if (rh <= 0.5 * local_r_out[j]) {
            if (rh < local_V[j].grid().r_min())
                throw std::domain_error("P1Family::v_at: below local chart");
            return local_V[j].interp(z) - alpha[j] * std::log(rh);
        }
    }
    return global_v->interp(z);
}

P1Family p1_family_construct(const std::vector<complex>& zs,
                             const std::vector<double>& al,
                             const P1Options& opt) {
    Layout lay = plan_layout(zs, al, opt);
    int k = static_cast<int>(zs.size());

    GridPtr gg = make_grid(std::log(lay.r_hole), std::log(lay.R),
                           opt.global_n_rho, opt.global_n_theta, lay.c);
    std::vector<GridPtr> lg(k);
    for (int j = 0; j < k; ++j)
        lg[j] = make_grid(std::log(opt.local_r_min), std::log(lay.r_out[j]),
                          opt.local_n_rho, opt.local_n_theta, zs[j]);

    // Nearest masked puncture per global node (-1 when unmasked).
    std::vector<int> mask(gg->size(), -1);
    std::vector<int> mask_nodes;
    for (int i = 1; i < gg->n_rho() - 1; ++i)
        for (int j = 0; j < gg->n_theta(); ++j) {
            complex p = gg->point(i, j);
            for (int m = 0; m < k; ++m)
                if (std::abs(p - zs[m]) < opt.mask_factor * lay.r_out[m]) {
                    mask[gg->index(i, j)] = m;
                    mask_nodes.push_back(gg->index(i, j));
                    break;
                }
        }

    // Superposition of the prescribed cone and decay behavior; both the
    // initial guess and the interface data before the first local solve.
    double excess = lay.alpha_sum - 2.0;
    auto v_sing = [&lay, excess, k](complex z) {
        double v = 0.0;
        for (int j = 0; j < k; ++j)
            v -= lay.alpha[j] * std::log(std::abs(z - lay.z[j]));
        return v + 0.5 * excess * std::log(1.0 + std::norm(z - lay.c));
    };

    std::vector<double> vg(gg->size());
    for (int i = 0; i < gg->n_rho(); ++i)
        for (int j = 0; j < gg->n_theta(); ++j)
            vg[gg->index(i, j)] = v_sing(gg->point(i, j));

    std::vector<ScalarField> Vs;
    bool have_locals = false;
    double worst_res = 0.0;
    double delta = std::numeric_limits<double>::infinity();
    bool converged = false;
    // Aitken relaxation state for the interface values: the plain
    // alternating sweep contracts by only ~0.8 per round here.
    std::vector<double> next_bc;
    std::vector<double> prev_d;

    std::optional<ScalarField> global_field;
    for (int sweep = 0; sweep < opt.max_schwarz_iters; ++sweep) {
        // Global sweep: Dirichlet staircase around each puncture, zero
        // Neumann across the (regular) center hole, prescribed decay slope
        // at the outer circle.
        newton::Problem np;
        np.grid = gg;
        np.role.assign(gg->size(), newton::Role::Interior);
        np.bc.assign(gg->size(), 0.0);
        np.source.resize(gg->size());
        np.u0 = vg;
        for (int i = 0; i < gg->n_rho(); ++i) {
            double e2r = std::exp(2.0 * gg->rho(i));
            for (int j = 0; j < gg->n_theta(); ++j)
                np.source[gg->index(i, j)] = e2r;
        }
        for (int j = 0; j < gg->n_theta(); ++j) {
            np.role[gg->index(0, j)] = newton::Role::NeumannInner;
            np.role[gg->index(gg->n_rho() - 1, j)] = newton::Role::NeumannOuter;
            np.bc[gg->index(gg->n_rho() - 1, j)] = -2.0;
        }
        std::vector<double> used_bc(mask_nodes.size());
        for (size_t t = 0; t < mask_nodes.size(); ++t) {
            int n = mask_nodes[t];
            int m = mask[n];
            complex p = gg->point(n / gg->n_theta(), n % gg->n_theta());
            double val = !next_bc.empty() ? next_bc[t]
                         : have_locals
                             ? Vs[m].interp(p) -
                                   lay.alpha[m] *
                                       std::log(std::abs(p - lay.z[m]))
                             : v_sing(p);
            np.role[n] = newton::Role::Dirichlet;
            np.bc[n] = val;
            used_bc[t] = val;
        }
        ScalarField ugf = solve_subproblem(np, opt.newton_tol,
                                           opt.max_newton_iters, "global",
                                           worst_res);
        vg = ugf.values();
        global_field.emplace(std::move(ugf));

        // Local sweeps in V = v + alpha rho-hat, outer data from the fresh
        // global solution, asymptotic Robin closure at the deep end.
        std::vector<ScalarField> newVs;
        newVs.reserve(k);
        for (int m = 0; m < k; ++m) {
            const auto& g = *lg[m];
            double sigma = 2.0 - 2.0 * lay.alpha[m];
            newton::Problem lp;
            lp.grid = lg[m];
            lp.role.assign(g.size(), newton::Role::Interior);
            lp.bc.assign(g.size(), 0.0);
            lp.source.resize(g.size());
            lp.robin_sigma = sigma;
            lp.u0.resize(g.size());
            for (int i = 0; i < g.n_rho(); ++i) {
                double src = std::exp(sigma * g.rho(i));
                for (int j = 0; j < g.n_theta(); ++j) {
                    int n = g.index(i, j);
                    lp.source[n] = src;
                    lp.u0[n] = have_locals
                                   ? Vs[m].at(i, j)
                                   : v_sing(g.point(i, j)) +
                                         lay.alpha[m] * g.rho(i);
                }
            }
            for (int j = 0; j < g.n_theta(); ++j) {
                lp.role[g.index(0, j)] = newton::Role::RobinAsymInner;
                int top = g.n_rho() - 1;
                lp.role[g.index(top, j)] = newton::Role::Dirichlet;
                lp.bc[g.index(top, j)] =
                    global_field->interp(g.point(top, j)) +
                    lay.alpha[m] * g.rho(top);
            }
            newVs.push_back(solve_subproblem(lp, opt.newton_tol,
                                             opt.max_newton_iters, "local",
                                             worst_res));
        }
        Vs = std::move(newVs);
        have_locals = true;

        delta = 0.0;
        std::vector<double> d(mask_nodes.size());
        std::vector<double> val(mask_nodes.size());
        for (size_t t = 0; t < mask_nodes.size(); ++t) {
            int n = mask_nodes[t];
            int m = mask[n];
            complex p = gg->point(n / gg->n_theta(), n % gg->n_theta());
            val[t] = Vs[m].interp(p) -
                     lay.alpha[m] * std::log(std::abs(p - lay.z[m]));
            d[t] = val[t] - used_bc[t];
            delta = std::max(delta, std::abs(d[t]));
        }
        if (delta < opt.schwarz_tol) {
            converged = true;
            break;
        }
        // Aitken step: estimate the contraction factor from successive
        // interface updates and extrapolate the fixed point.
        double factor = 0.0;
        if (!prev_d.empty()) {
            double num = std::inner_product(d.begin(), d.end(),
                                            prev_d.begin(), 0.0);
            double den = std::inner_product(prev_d.begin(), prev_d.end(),
                                            prev_d.begin(), 0.0);
            if (den > 0.0) {
                double qf = std::clamp(num / den, 0.0, 0.95);
                factor = qf / (1.0 - qf);
            }
        }
        next_bc.resize(mask_nodes.size());
        for (size_t t = 0; t < mask_nodes.size(); ++t)
            next_bc[t] = val[t] + factor * d[t];
        prev_d = std::move(d);
    }
    if (!converged)
        throw std::runtime_error(
            "p1_family_construct: domain decomposition stalled, interface "
            "update " +
            std::to_string(delta));

    P1Family fam;
    fam.alpha = lay.alpha;
    fam.center = lay.c;
    fam.outer_radius = lay.R;
    fam.hole_radius = lay.r_hole;
    fam.moduli_dim = 3 * k - 6;
    fam.global_v = std::move(global_field);
    fam.local_V = std::move(Vs);
    fam.local_r_out = lay.r_out;
    fam.converged = converged;
    fam.schwarz_delta = delta;
    fam.newton_residual = worst_res;
    for (int j = 0; j < k; ++j) {
        ConeDatum cd;
        cd.position = lay.z[j];
        cd.order = lay.alpha[j] / 2.0;
        fam.punctures.push_back(cd);
    }
    {
        ConeDatum inf;
        inf.at_infinity = true;
        inf.order = -3.0;
        fam.punctures.push_back(inf);
    }
    for (int j = 0; j < k; ++j)
        fam.local_dV.push_back(gradient(fam.local_V[j]));

    // Seam consistency between the two chart solutions.
    for (int j = 0; j < k; ++j) {
        double rs = 0.75 * lay.r_out[j];
        for (int t = 0; t < 64; ++t) {
            double th = 2.0 * M_PI * t / 64;
            complex p = lay.z[j] + rs * complex(std::cos(th), std::sin(th));
            double loc = fam.local_V[j].interp(p) - lay.alpha[j] * std::log(rs);
            double glob = fam.global_v->interp(p);
            fam.overlap_mismatch =
                std::max(fam.overlap_mismatch, std::abs(loc - glob));
        }
    }

    // Cone-order fits: deep radii at each puncture (the slowly decaying
    // O(r^{2 - 2 alpha}) correction forces a deep window), a wide far-field
    // window in the 1/z chart for infinity.
    auto logspace = [](double lo, double hi, int n) {
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i)
            r[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
        return r;
    };
    for (int j = 0; j < k; ++j) {
        auto wloc = [&fam, j](complex z) {
            double rh = std::abs(z - fam.punctures[j].position);
            return std::exp(-(fam.local_V[j].interp(z) -
                              fam.alpha[j] * std::log(rh)));
        };
        auto fit = fit_singularity(
            wloc, logspace(2.0 * opt.local_r_min, 2000.0 * opt.local_r_min, 10),
            lay.z[j], 32);
        fam.fitted_orders.push_back(fit.beta / 2.0);
    }
    {
        auto wzeta = [&fam](complex zeta) {
            complex z = fam.center + 1.0 / zeta;
            double w = std::exp(-fam.global_v->interp(z));
            double az2 = std::norm(zeta);
            return w / (az2 * az2);
        };
        auto fit = fit_singularity(
            wzeta,
            logspace(1.0 / (0.9 * lay.R), 1.0 / (5.0 * lay.spread), 10),
            {0.0, 0.0}, 32);
        fam.fitted_order_infinity = fit.beta / 2.0;
        fam.punctures.back().order = fam.fitted_order_infinity;
    }
    return fam;
}

P1Family family_perturb(const P1Family& fam, int index, complex displacement,
                        const P1Options& opt) {
    int k = static_cast<int>(fam.alpha.size());
    if (index < 0 || index >= k)
        throw std::invalid_argument("family_perturb: bad puncture index");
    std::vector<complex> zs(k);
    for (int j = 0; j < k; ++j) zs[j] = fam.punctures[j].position;
    zs[index] += displacement;
    return p1_family_construct(zs, fam.alpha, opt);
}

ConnectionEvalFn puncture_connection(const P1Family& fam, int j) {
    int k = static_cast<int>(fam.alpha.size());
    if (j < 0 || j >= k)
        throw std::invalid_argument("puncture_connection: bad index");
    ClosedTriple t;
    t.h.value = [](complex z) { return z.real(); };
    t.h.grad = [](complex, double& gx, double& gy) {
        gx = 1.0;
        gy = 0.0;
    };
    complex zj = fam.punctures[j].position;
    double alpha = fam.alpha[j];
    ScalarField V = fam.local_V[j];
    OneFormField dV = fam.local_dV[j];
    t.u.value = [V, zj, alpha](complex z) {
        return V.interp(z) - alpha * std::log(std::abs(z - zj));
    };
    t.u.grad = [dV, zj, alpha](complex z, double& gx, double& gy) {
        dV.interp(z, gx, gy);
        double r2 = std::norm(z - zj);
        gx -= alpha * (z - zj).real() / r2;
        gy -= alpha * (z - zj).imag() / r2;
    };
    t.a = 0.0;
    t.puncture = zj;
    t.r_in = fam.local_V[j].grid().r_min();
    t.r_out = fam.local_r_out[j];
    return closed_form_connection(t);
}

Eigen::Matrix2d puncture_holonomy(const P1Family& fam, int j, double r_loop) {
    const auto& g = fam.local_V[j].grid();
    if (r_loop <= 0.0)
        r_loop = std::exp(0.5 * (g.rho_min() + g.rho_max()));
    Loop loop;
    loop.center = fam.punctures[j].position;
    loop.radius = r_loop;
    loop.n_steps = 512;
    // The connection is bilinearly interpolated, so its kinks cap the step
    // error the integrator can certify; 1e-5 sits above that cap and below
    // the interpolation error itself.
    return parallel_transport(puncture_connection(fam, j), loop, 1e-5);
}

double normalized_metric_difference(const P1Family& f1, const P1Family& f2,
                                    int n_samples) {
    auto norm_of = [](const P1Family& f) {
        return mobius_normalizer(f.punctures[0].position,
                                 f.punctures[1].position,
                                 f.punctures[2].position);
    };
    MobiusMap m1 = norm_of(f1);
    MobiusMap m2 = norm_of(f2);

    auto pulled = [](const P1Family& f, const MobiusMap& m, complex zeta) {
        complex z = m.inverse(zeta);
        double j2 = std::norm(m.d_inverse(zeta));
        return f.w_sk(z) * j2;
    };

    const double radii[] = {0.35, 0.7, 1.3, 2.2, 3.5};
    int per = std::max(8, n_samples / 5);
    double diff = 0.0;
    int valid = 0;
    for (double r : radii) {
        for (int t = 0; t < per; ++t) {
            double th = 2.0 * M_PI * (t + 0.37) / per;
            complex zeta = r * complex(std::cos(th), std::sin(th));
            try {
                double w1 = pulled(f1, m1, zeta);
                double w2 = pulled(f2, m2, zeta);
                diff = std::max(diff, std::abs(w1 - w2) / (w1 + w2));
                ++valid;
            } catch (const std::domain_error&) {
                // Sample fell off a chart (center hole or too deep); skip.
            }
        }
    }
    if (valid < 5 * per / 4)
        throw std::runtime_error(
            "normalized_metric_difference: too few comparable samples");
    return diff;
}

}  // namespace sk2d

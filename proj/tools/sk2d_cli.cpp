#include "sk2d/asymptotics.hpp"
#include "sk2d/calculus.hpp"
#include "sk2d/families.hpp"
#include "sk2d/global_p1.hpp"
#include "sk2d/holonomy.hpp"
#include "sk2d/kw_solver.hpp"
#include "sk2d/sk_core.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using json = nlohmann::json;
using namespace sk2d;

namespace {

constexpr const char* kSchema = "sk2d/1";

struct CommonArgs {
    std::string family = "log";
    double A = 1.0, B = -1.0, K = -1.0, a = 0.0;
    int n = 2;
    int n_rho = 96, n_theta = 96;
    double rmin = 0.0, rmax = 0.0;  // 0 = family default
    double radius = 0.0;
    double rtol = 1e-9;
    std::string out;
    std::string json_path;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
    cmd->add_option("--family", c.family, "family name");
    cmd->add_option("--A", c.A, "log / flat-harmonic coefficient");
    cmd->add_option("--B", c.B, "log / flat-harmonic offset");
    cmd->add_option("--K", c.K, "curvature of the Liouville input metric");
    cmd->add_option("--n", c.n, "power for the z^n family");
    cmd->add_option("--a", c.a, "coefficient of the angular harmonic form");
    cmd->add_option("--grid-nrho", c.n_rho, "radial nodes");
    cmd->add_option("--grid-ntheta", c.n_theta, "angular nodes");
    cmd->add_option("--rmin", c.rmin, "inner radius");
    cmd->add_option("--rmax", c.rmax, "outer radius");
    cmd->add_option("--radius", c.radius, "loop / contour radius");
    cmd->add_option("--rtol", c.rtol, "transport tolerance");
    cmd->add_option("--out", c.out, "output directory for CSV fields");
    cmd->add_option("--json", c.json_path, "JSON output path (default stdout)");
}

ClosedFormMetric build_family(const CommonArgs& c, const CLI::App* cmd) {
    // Forward only flags the user actually set; each family keeps its own
    // defaults otherwise.
    json params = json::object();
    if (cmd->count("--A")) params["A"] = c.A;
    if (cmd->count("--B")) params["B"] = c.B;
    if (cmd->count("--K")) params["K"] = c.K;
    if (cmd->count("--n")) params["n"] = c.n;
    ClosedFormMetric m = make_family(c.family, params);
    m.triple.a = c.a;
    return m;
}

void emit(const CommonArgs& c, json out) {
    out["schema"] = kSchema;
    if (c.json_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::ofstream f(c.json_path);
        if (!f) throw std::runtime_error("cannot open " + c.json_path);
        f << out.dump(2) << "\n";
    }
}

GridPtr family_grid(const ClosedFormMetric& m, const CommonArgs& c) {
    double rin = c.rmin > 0.0 ? c.rmin : m.triple.r_in;
    double rout = c.rmax > 0.0 ? c.rmax : m.triple.r_out;
    if (!(rin > 0.0 && rin < rout))
        throw std::invalid_argument("need 0 < rmin < rmax");
    return make_grid(std::log(rin), std::log(rout), c.n_rho, c.n_theta,
                     m.triple.puncture);
}

json matrix_json(const Eigen::Matrix2d& m) {
    return json::array(
        {json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

int cmd_family(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    GridPtr g = family_grid(m, c);
    SampledTriple t = sample_triple(g, m.triple);
    json out = triple_metadata(m);
    out["grid"] = {{"rho_min", g->rho_min()},
                   {"rho_max", g->rho_max()},
                   {"n_rho", g->n_rho()},
                   {"n_theta", g->n_theta()}};
    if (!c.out.empty()) {
        dump_csv(metric_density(t), c.out + "/w.csv");
        dump_csv(t.u, c.out + "/u.csv");
        ConnectionForm conn = connection_from_triple(t);
        dump_csv(conn.omega11, c.out + "/omega11.csv");
        dump_csv(conn.omega22, c.out + "/omega22.csv");
        dump_csv(cubic_form(t), c.out + "/xi0.csv");
        out["files"] = {"w.csv", "u.csv", "omega11.csv", "omega22.csv",
                        "xi0.csv"};
    }
    emit(c, out);
    return 0;
}

int cmd_solve_kw(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    GridPtr g = family_grid(m, c);
    ScalarField q(g);
    for (int i = 0; i < g->n_rho(); ++i)
        for (int j = 0; j < g->n_theta(); ++j) {
            complex z = g->point(i, j);
            double gx, gy, px, py;
            m.triple.h.grad(z, gx, gy);
            phi_form(z, m.triple.puncture, px, py);
            gx += m.triple.a * px;
            gy += m.triple.a * py;
            q.at(i, j) = gx * gx + gy * gy;
        }
    std::vector<double> inner(g->n_theta()), outer(g->n_theta());
    for (int j = 0; j < g->n_theta(); ++j) {
        inner[j] = m.triple.u.value(g->point(0, j));
        outer[j] = m.triple.u.value(g->point(g->n_rho() - 1, j));
    }
    KWProblem p{g, std::move(q), std::move(inner), std::move(outer),
                std::nullopt};
    auto [u, rep] = solve_kw(p, std::max(c.rtol, 1e-10));
    double err = 0.0;
    for (int i = 0; i < g->n_rho(); ++i)
        for (int j = 0; j < g->n_theta(); ++j)
            err = std::max(err, std::abs(u.at(i, j) -
                                         m.triple.u.value(g->point(i, j))));
    if (!c.out.empty()) dump_csv(u, c.out + "/u_solved.csv");
    emit(c, json{{"converged", rep.converged},
                 {"iterations", rep.iterations},
                 {"final_residual", rep.final_residual},
                 {"max_error_vs_closed_form", err}});
    return rep.converged ? 0 : 3;
}

int cmd_holonomy(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    Loop loop;
    loop.center = m.triple.puncture;
    loop.radius = c.radius > 0.0
                      ? c.radius
                      : std::sqrt(m.triple.r_in * m.triple.r_out);
    Eigen::Matrix2d hol =
        parallel_transport(closed_form_connection(m.triple), loop, c.rtol);
    emit(c, json{{"matrix", matrix_json(hol)},
                 {"trace", hol.trace()},
                 {"radius", loop.radius}});
    return 0;
}

int cmd_classify(const CommonArgs& c, const std::string& in_path) {
    json in;
    if (in_path.empty()) {
        std::cin >> in;
    } else {
        std::ifstream f(in_path);
        if (!f) throw std::invalid_argument("cannot open " + in_path);
        f >> in;
    }
    auto mj = in.at("matrix");
    Eigen::Matrix2d m;
    m << mj[0][0].get<double>(), mj[0][1].get<double>(),
        mj[1][0].get<double>(), mj[1][1].get<double>();
    MonodromyClass cls = classify(m, 1e-5);
    json out{{"tag", to_string(cls.tag)}, {"trace", cls.trace}};
    if (cls.beta_mod2)
        out["beta_mod2"] = {cls.beta_mod2->first, cls.beta_mod2->second};
    emit(c, out);
    return 0;
}

int cmd_asymptotics(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    double rin = c.rmin > 0.0 ? c.rmin : 1e-6;
    double rout = c.rmax > 0.0 ? c.rmax : 1e-2;
    std::vector<double> radii(12);
    for (int i = 0; i < 12; ++i)
        radii[i] = rout * std::pow(rin / rout, double(i) / 11);
    SingularityFit fit =
        fit_singularity(m.w, radii, m.triple.puncture);
    json out{{"kind", fit.kind == SingularityFit::Kind::Power ? "power"
                                                              : "log-type"},
             {"C", fit.C},
             {"fit_residual", fit.fit_residual},
             {"ambiguous", fit.ambiguous}};
    if (fit.kind == SingularityFit::Kind::Power)
        out["beta"] = fit.beta;
    else {
        out["N"] = fit.N;
        out["beta"] = fit.beta;
    }
    if (m.xi0) {
        double r0 = c.radius > 0.0
                        ? c.radius
                        : std::sqrt(m.triple.r_in * m.triple.r_out);
        try {
            int N = cubic_order(m.xi0, r0, m.triple.puncture);
            out["cubic_N"] = N;
            out["bound_ok"] = check_bound(fit, N);
        } catch (const std::runtime_error&) {
            // Xi vanishes identically for the flat families.
        }
    }
    emit(c, out);
    return 0;
}

int cmd_gauss_bonnet(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    double rin = c.rmin > 0.0 ? c.rmin : m.triple.r_in;
    double rout = c.rmax > 0.0 ? c.rmax : m.triple.r_out;
    auto [lhs, rhs] = gauss_bonnet_bounded(m.w, rin, rout, c.n_rho, c.n_theta,
                                           m.triple.puncture);
    emit(c, json{{"lhs", lhs}, {"rhs", rhs}, {"defect", lhs - rhs}});
    return 0;
}

int cmd_p1(const CommonArgs& c, const std::string& punctures_path,
           std::vector<double>& orders) {
    std::ifstream f(punctures_path);
    if (!f)
        throw std::invalid_argument("cannot open " + punctures_path);
    json pj;
    f >> pj;
    std::vector<complex> zs;
    for (const auto& p : pj)
        zs.emplace_back(p[0].get<double>(), p[1].get<double>());
    // Orders are alpha_j / 2; the solver takes the metric exponents alpha_j.
    std::vector<double> alpha;
    for (double o : orders) alpha.push_back(2.0 * o);
    P1Family fam = p1_family_construct(zs, alpha);

    json cones = json::array();
    for (const auto& cd : fam.punctures)
        cones.push_back(json{{"position", {cd.position.real(),
                                           cd.position.imag()}},
                             {"at_infinity", cd.at_infinity},
                             {"order", cd.order}});
    json out{{"punctures", cones},
             {"moduli_dim", fam.moduli_dim},
             {"converged", fam.converged},
             {"schwarz_delta", fam.schwarz_delta},
             {"overlap_mismatch", fam.overlap_mismatch},
             {"fitted_orders", fam.fitted_orders},
             {"fitted_order_infinity", fam.fitted_order_infinity}};
    if (!c.out.empty()) {
        dump_csv(*fam.global_v, c.out + "/v_global.csv");
        for (size_t j = 0; j < fam.local_V.size(); ++j)
            dump_csv(fam.local_V[j],
                     c.out + "/V_local_" + std::to_string(j) + ".csv");
    }
    emit(c, out);
    return 0;
}

int cmd_verify(const CommonArgs& c, const CLI::App* cmd) {
    ClosedFormMetric m = build_family(c, cmd);
    GridPtr g = family_grid(m, c);
    SampledTriple t = sample_triple(g, m.triple);
    double tol = residual_tolerance(*g);

    json checks = json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, double value, double bound) {
        bool ok = value <= bound;
        all_ok = all_ok && ok;
        checks.push_back(json{{"name", name},
                              {"value", value},
                              {"bound", bound},
                              {"pass", ok}});
    };

    record("harmonicity", harmonicity_residual(t), tol);
    if (m.special_kahler) {
        record("kazdan_warner", kw_triple_residual(t), tol);
        ConnectionForm conn = connection_from_triple(t);
        record("flatness", flatness_residual(conn), tol);
        auto [eta1, eta2] = eta_residual(t);
        record("eta_system", std::max(eta1, eta2), tol);
        record("xi_holomorphy", holomorphy_residual(cubic_form(t)), tol);
    }
    ScalarField w = metric_density(t);
    ScalarField K = gaussian_curvature(w);
    double min_K = 0.0;
    for (int i = 1; i < g->n_rho() - 1; ++i)
        for (int j = 0; j < g->n_theta(); ++j)
            min_K = std::min(min_K, K.at(i, j));
    record("curvature_nonnegative", -min_K, 1e-6);

    emit(c, json{{"family", c.family},
                 {"checks", checks},
                 {"pass", all_ok}});
    return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D special Kahler structures: families, solvers, checks"};
    app.require_subcommand(1);

    CommonArgs c;
    std::string in_path, punctures_path;
    std::vector<double> orders;

    auto* s_family = app.add_subcommand("family", "dump family fields");
    auto* s_solve = app.add_subcommand("solve-kw", "solve the KW equation");
    auto* s_hol = app.add_subcommand("holonomy", "parallel transport");
    auto* s_cls = app.add_subcommand("classify", "SL(2,R) class of a matrix");
    auto* s_asy = app.add_subcommand("asymptotics", "fit singularity data");
    auto* s_gb = app.add_subcommand("gauss-bonnet", "bounded-domain check");
    auto* s_p1 = app.add_subcommand("p1", "construct a P^1 family");
    auto* s_ver = app.add_subcommand("verify", "run the invariant suite");
    for (auto* s : {s_family, s_solve, s_hol, s_cls, s_asy, s_gb, s_p1, s_ver})
        add_common(s, c);
    s_cls->add_option("--in", in_path, "JSON file holding {\"matrix\": ...}");
    s_p1->add_option("--punctures", punctures_path,
                     "JSON file: array of [x, y] pairs")
        ->required();
    s_p1->add_option("--orders", orders, "cone orders alpha_j / 2")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (s_family->parsed()) return cmd_family(c, s_family);
        if (s_solve->parsed()) return cmd_solve_kw(c, s_solve);
        if (s_hol->parsed()) return cmd_holonomy(c, s_hol);
        if (s_cls->parsed()) return cmd_classify(c, in_path);
        if (s_asy->parsed()) return cmd_asymptotics(c, s_asy);
        if (s_gb->parsed()) return cmd_gauss_bonnet(c, s_gb);
        if (s_p1->parsed()) return cmd_p1(c, punctures_path, orders);
        if (s_ver->parsed()) return cmd_verify(c, s_ver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        // json parse/type errors land here
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

#include "sk2d/families.hpp"

#include <cmath>

namespace sk2d {

using json = nlohmann::json;

MeromorphicFn power_map(int n) {
    if (n < 1) throw std::invalid_argument("power_map: n must be >= 1");
    MeromorphicFn m;
    m.f = [n](complex z) { return std::pow(z, n); };
    m.df = [n](complex z) { return double(n) * std::pow(z, n - 1); };
    m.d2f = [n](complex z) {
        return n < 2 ? complex{0.0, 0.0}
                     : double(n) * double(n - 1) * std::pow(z, n - 2);
    };
    return m;
}

MeromorphicFn mobius_map(complex a, complex b, complex c, complex d) {
    complex det = a * d - b * c;
    if (std::abs(det) < 1e-14)
        throw std::invalid_argument("mobius_map: degenerate coefficients");
    MeromorphicFn m;
    m.f = [=](complex z) { return (a * z + b) / (c * z + d); };
    m.df = [=](complex z) {
        complex q = c * z + d;
        return det / (q * q);
    };
    m.d2f = [=](complex z) {
        complex q = c * z + d;
        return -2.0 * c * det / (q * q * q);
    };
    return m;
}

ClosedFormMetric log_family(double A, double B) {
    if (A < 0.0 || B >= 0.0)
        throw std::domain_error("log_family: requires A >= 0 and B < 0");
    ClosedFormMetric m;
    m.family = "log";
    m.params = json{{"A", A}, {"B", B}};

    auto h = [A, B](complex z) { return A * std::log(std::abs(z)) + B; };
    m.w = [h](complex z) { return -h(z); };
    m.triple.h.value = h;
    m.triple.h.grad = [A](complex z, double& gx, double& gy) {
        double r2 = std::norm(z);
        gx = A * z.real() / r2;
        gy = A * z.imag() / r2;
    };
    m.triple.u.value = [h](complex z) { return -std::log(-h(z)); };
    m.triple.u.grad = [A, h](complex z, double& gx, double& gy) {
        double r2 = std::norm(z);
        double hv = h(z);
        gx = -A * z.real() / (r2 * hv);
        gy = -A * z.imag() / (r2 * hv);
    };
    m.triple.a = 0.0;
    m.triple.r_in = 1e-3;
    m.triple.r_out = 1.0;  // h < 0 up to |z| = 1 since B < 0

    if (A > 0.0) {
        m.kind = SingularityKind::LogType;
        m.beta = 0.0;  // N + 1
        m.cubic_N = -1;
    } else {
        m.kind = SingularityKind::Power;  // flat, w = -B
        m.beta = 0.0;
        // Xi vanishes identically; no integer order.
    }
    m.xi0 = [A](complex z) { return complex{0.0, -A / 4.0} / z; };
    Eigen::Matrix2d hol;
    hol << 1.0, -2.0 * A * M_PI / B, 0.0, 1.0;
    m.holonomy = hol;
    return m;
}

ClosedFormMetric liouville_metric(const MeromorphicFn& f, double K,
                                  json params) {
    if (K >= 0.0)
        throw std::domain_error(
            "liouville_metric: requires K < 0 (negative curvature)");
    ClosedFormMetric m;
    m.family = "liouville";
    m.params = std::move(params);
    m.params["K"] = K;

    auto fv = f.f;
    auto dfv = f.df;
    auto d2fv = f.d2f;
    m.cc_factor = [=](complex z) {
        double fp = std::abs(dfv(z));
        if (fp == 0.0)
            throw std::domain_error("liouville_metric: f' vanishes on domain");
        double den = 1.0 + K * std::norm(fv(z));
        return 4.0 * fp * fp / (den * den);
    };
    m.cc_curvature = K;
    m.w = [=](complex z) {
        double fp = std::abs(dfv(z));
        if (fp == 0.0)
            throw std::domain_error("liouville_metric: f' vanishes on domain");
        return 0.5 * std::abs(1.0 + K * std::norm(fv(z))) / fp;
    };

    double sk = std::sqrt(-K);
    m.triple.h.value = [sk](complex z) { return sk * z.real(); };
    m.triple.h.grad = [sk](complex, double& gx, double& gy) {
        gx = sk;
        gy = 0.0;
    };
    // u = (1/2) log w_cc
    m.triple.u.value = [cc = m.cc_factor](complex z) {
        return 0.5 * std::log(cc(z));
    };
    m.triple.u.grad = [=](complex z, double& gx, double& gy) {
        complex g1 = d2fv(z) / dfv(z);                  // d log f'
        complex g2 = std::conj(fv(z)) * dfv(z);         // for d|f|^2
        double den = 1.0 + K * std::norm(fv(z));
        gx = g1.real() - 2.0 * K * g2.real() / den;
        gy = -g1.imag() + 2.0 * K * g2.imag() / den;
    };
    m.triple.a = 0.0;
    m.triple.r_in = 1e-3;
    // High radial derivatives of u blow up toward the unit circle; keep the
    // default annulus away from it.
    m.triple.r_out = 0.7;

    m.kind = SingularityKind::Power;
    m.cubic_N = 0;
    // Cubic coefficient from the (h, u, a) description: constant -i sqrt(-K)/4.
    m.xi0 = [sk](complex) { return complex{0.0, -sk / 4.0}; };
    return m;
}

ClosedFormMetric liouville_zn(int n) {
    ClosedFormMetric m = liouville_metric(power_map(n), -1.0, json{{"n", n}});
    m.family = "liouville-zn";
    m.beta = 1.0 - n;  // leading exponent of |z|^{1-n}(1-|z|^{2n})/(2n)
    return m;
}

ClosedFormMetric poincare_derived() {
    ClosedFormMetric m;
    m.family = "poincare";
    m.params = json::object();
    m.w = [](complex z) {
        double r = std::abs(z);
        return -r * std::log(r);
    };
    m.triple.h.value = [](complex z) { return z.real(); };
    m.triple.h.grad = [](complex, double& gx, double& gy) {
        gx = 1.0;
        gy = 0.0;
    };
    m.triple.u.value = [](complex z) {
        double r = std::abs(z);
        return -std::log(r * (-std::log(r)));
    };
    m.triple.u.grad = [](complex z, double& gx, double& gy) {
        double r2 = std::norm(z);
        double s = -std::log(std::abs(z));  // positive on 0 < r < 1
        double c = 1.0 / s - 1.0;
        gx = c * z.real() / r2;
        gy = c * z.imag() / r2;
    };
    m.triple.a = 0.0;
    m.triple.r_in = 1e-3;
    // log log r derivatives degenerate as r -> 1.
    m.triple.r_out = 0.5;

    m.kind = SingularityKind::LogType;
    m.beta = 1.0;  // N + 1
    m.cubic_N = 0;
    m.xi0 = [](complex) { return complex{0.0, -0.25}; };
    m.cc_factor = [](complex z) {
        double r2 = std::norm(z);
        double lr = std::log(std::abs(z));
        return 1.0 / (r2 * lr * lr);
    };
    m.cc_curvature = -1.0;
    return m;
}

ClosedFormMetric flat_from_harmonic(const ClosedScalar& h, json params) {
    ClosedFormMetric m;
    m.family = "flat-harmonic";
    m.params = std::move(params);
    auto hv = h.value;
    auto hg = h.grad;
    m.w = [hv](complex z) {
        double v = hv(z);
        if (v >= 0.0)
            throw std::domain_error("flat_from_harmonic: h must be negative");
        return -v;
    };
    m.triple.h = h;
    m.triple.u.value = [hv](complex z) { return -std::log(-hv(z)); };
    m.triple.u.grad = [hv, hg](complex z, double& gx, double& gy) {
        double v = hv(z);
        hg(z, gx, gy);
        gx = -gx / v;
        gy = -gy / v;
    };
    m.triple.a = 0.0;
    // The curvature here is small and positive; the log-polar Laplacian's
    // error grows like 1/r, so the default annulus keeps the inner edge
    // where the curvature still dominates that error.
    m.triple.r_in = 0.05;
    m.triple.r_out = 0.9;
    m.kind = SingularityKind::Power;  // smooth h: w -> -h(0) > 0
    m.beta = 0.0;
    m.xi0 = [hg](complex z) {
        double gx, gy;
        hg(z, gx, gy);
        complex dhz = 0.5 * complex(gx, -gy);
        return -0.5 * complex{0.0, 1.0} * dhz;
    };
    return m;
}

ClosedFormMetric conical_model(double beta, double C) {
    if (!(C > 0.0)) throw std::domain_error("conical_model: C must be > 0");
    ClosedFormMetric m;
    m.family = "conical-model";
    m.params = json{{"beta", beta}, {"C", C}};
    m.special_kahler = false;  // fit target / prediction model only
    m.w = [beta, C](complex z) { return C * std::pow(std::abs(z), beta); };
    m.triple.h.value = [](complex) { return -1.0; };
    m.triple.h.grad = [](complex, double& gx, double& gy) { gx = gy = 0.0; };
    m.triple.u.value = [beta, C](complex z) {
        return -std::log(C) - beta * std::log(std::abs(z));
    };
    m.triple.u.grad = [beta](complex z, double& gx, double& gy) {
        double r2 = std::norm(z);
        gx = -beta * z.real() / r2;
        gy = -beta * z.imag() / r2;
    };
    m.kind = SingularityKind::Power;
    m.beta = beta;
    return m;
}

ClosedFormMetric make_family(const std::string& name, const json& params) {
    auto get = [&params](const char* key, double dflt) {
        return params.contains(key) ? params.at(key).get<double>() : dflt;
    };
    if (name == "log") return log_family(get("A", 1.0), get("B", -1.0));
    if (name == "liouville-zn")
        return liouville_zn(params.contains("n") ? params.at("n").get<int>() : 2);
    if (name == "poincare") return poincare_derived();
    if (name == "flat-harmonic") {
        // h = B + A Re z, negative on the annulus for |A| r_out < -B.
        double A = get("A", 0.5), B = get("B", -1.5);
        if (B + std::abs(A) >= 0.0)
            throw std::invalid_argument(
                "flat-harmonic: need B + |A| < 0 so h < 0 on the unit disc");
        ClosedScalar h;
        h.value = [A, B](complex z) { return B + A * z.real(); };
        h.grad = [A](complex, double& gx, double& gy) {
            gx = A;
            gy = 0.0;
        };
        ClosedFormMetric m = flat_from_harmonic(h, json{{"A", A}, {"B", B}});
        if (A != 0.0) m.cubic_N = 0;
        return m;
    }
    if (name == "conical-model")
        return conical_model(get("beta", 0.0), get("C", 1.0));
    throw std::invalid_argument("unknown family: " + name);
}

std::vector<std::string> family_names() {
    return {"log", "liouville-zn", "poincare", "flat-harmonic",
            "conical-model"};
}

json triple_metadata(const ClosedFormMetric& m) {
    return json{{"family", m.family}, {"params", m.params}, {"a", m.triple.a}};
}

}  // namespace sk2d

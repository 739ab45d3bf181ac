#include "sk2d/holonomy.hpp"

#include <cmath>

namespace sk2d {

ConnectionEvalFn closed_form_connection(const ClosedTriple& t) {
    return [t](complex z) { return connection_at(t, z); };
}

ConnectionEvalFn sampled_connection(const ConnectionForm& c) {
    return [c](complex z) {
        Eigen::Vector2d w11, w22;
        double ax, ay;
        c.omega11.interp(z, ax, ay);
        w11 << ax, ay;
        c.omega22.interp(z, ax, ay);
        w22 << ax, ay;
        return connection_matrix(w11, w22);
    };
}

namespace {

// Right-hand side of M' = -omega(gamma'(t)) M.
Eigen::Matrix2d rhs(const ConnectionEvalFn& conn, const Loop& loop, double t,
                    const Eigen::Matrix2d& m) {
    MatOneForm om = conn(loop.point(t));
    complex v = loop.velocity(t);
    return -(om.mx * v.real() + om.my * v.imag()) * m;
}

Eigen::Matrix2d rk4_step(const ConnectionEvalFn& conn, const Loop& loop,
                         double t, double h, const Eigen::Matrix2d& m) {
    Eigen::Matrix2d k1 = rhs(conn, loop, t, m);
    Eigen::Matrix2d k2 = rhs(conn, loop, t + 0.5 * h, m + 0.5 * h * k1);
    Eigen::Matrix2d k3 = rhs(conn, loop, t + 0.5 * h, m + 0.5 * h * k2);
    Eigen::Matrix2d k4 = rhs(conn, loop, t + h, m + h * k3);
    return m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Eigen::Matrix2d parallel_transport(const ConnectionEvalFn& conn,
                                   const Loop& loop, double rtol) {
    constexpr double two_pi = 2.0 * M_PI;
    int n0 = loop.n_steps > 0 ? loop.n_steps : 256;
    double t = 0.0;
    double h = two_pi / n0;
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();

    while (t < two_pi) {
        if (t + h > two_pi) h = two_pi - t;
        // Step doubling: one step of h against two of h/2.
        Eigen::Matrix2d big = rk4_step(conn, loop, t, h, m);
        Eigen::Matrix2d half = rk4_step(conn, loop, t, 0.5 * h, m);
        half = rk4_step(conn, loop, t + 0.5 * h, 0.5 * h, half);
        double err = (big - half).cwiseAbs().maxCoeff() /
                     std::max(1.0, half.cwiseAbs().maxCoeff());
        double tol_step = rtol * h / two_pi;
        if (err <= tol_step) {
            // Fifth-order local extrapolation.
            m = half + (half - big) / 15.0;
            t += h;
            if (err < 0.25 * tol_step) h *= 2.0;
        } else {
            h *= 0.5;
            if (h < 1e-12)
                throw std::runtime_error(
                    "parallel_transport: step size underflow");
        }
    }

    double det = m.determinant();
    if (std::abs(det - 1.0) > 10.0 * std::max(rtol, 1e-12) + 1e-9)
        throw std::runtime_error(
            "parallel_transport: determinant drifted from 1 (got " +
            std::to_string(det) + ")");
    return m.transpose();
}

const char* to_string(MonodromyTag t) {
    switch (t) {
        case MonodromyTag::Trivial: return "trivial";
        case MonodromyTag::MinusIdentity: return "minus-identity";
        case MonodromyTag::ParabolicPlus: return "parabolic-plus";
        case MonodromyTag::ParabolicMinus: return "parabolic-minus";
        case MonodromyTag::Elliptic: return "elliptic";
    }
    return "?";
}

MonodromyClass classify(const Eigen::Matrix2d& m, double tol) {
    double det = m.determinant();
    if (std::abs(det - 1.0) > tol)
        throw std::invalid_argument("classify: matrix is not in SL(2,R)");
    MonodromyClass c;
    c.trace = m.trace();
    double off = std::max({std::abs(m(0, 1)), std::abs(m(1, 0)),
                           std::abs(m(0, 0) - m(1, 1))});
    if (std::abs(c.trace - 2.0) <= tol) {
        bool ident = off <= tol && std::abs(m(0, 0) - 1.0) <= tol;
        c.tag = ident ? MonodromyTag::Trivial : MonodromyTag::ParabolicPlus;
    } else if (std::abs(c.trace + 2.0) <= tol) {
        bool ident = off <= tol && std::abs(m(0, 0) + 1.0) <= tol;
        c.tag =
            ident ? MonodromyTag::MinusIdentity : MonodromyTag::ParabolicMinus;
    } else if (std::abs(c.trace) < 2.0) {
        c.tag = MonodromyTag::Elliptic;
        // tr = 2 cos(pi beta): beta is determined mod 2 up to sign.
        double b = std::acos(0.5 * c.trace) / M_PI;  // in (0, 1)
        c.beta_mod2 = {b, 2.0 - b};
    } else {
        // Hyperbolic does not occur for cone monodromy; report it anyway so
        // a broken connection is visible rather than misclassified.
        throw std::invalid_argument("classify: hyperbolic trace " +
                                    std::to_string(c.trace));
    }
    return c;
}

PredictedClasses predicted_class(double beta, bool is_log_type) {
    PredictedClasses p;
    if (is_log_type) {
        // beta = N + 1 integer; the log term forces a nontrivial parabolic.
        long n1 = std::lround(beta);
        if (std::abs(beta - double(n1)) > 1e-9)
            throw std::invalid_argument(
                "predicted_class: log type needs integer exponent");
        p.tags = {(n1 % 2 == 0) ? MonodromyTag::ParabolicPlus
                                : MonodromyTag::ParabolicMinus};
        p.trace = (n1 % 2 == 0) ? 2.0 : -2.0;
        return p;
    }
    double frac = beta - std::floor(beta);
    long k = std::lround(beta);
    if (std::abs(beta - double(k)) < 1e-9) {
        // Integer power exponent: trivial or -Id or either parabolic sign,
        // depending on parity.
        if (((k % 2) + 2) % 2 == 0)
            p.tags = {MonodromyTag::Trivial, MonodromyTag::ParabolicPlus};
        else
            p.tags = {MonodromyTag::MinusIdentity,
                      MonodromyTag::ParabolicMinus};
        p.trace = (((k % 2) + 2) % 2 == 0) ? 2.0 : -2.0;
    } else {
        p.tags = {MonodromyTag::Elliptic};
        p.trace = 2.0 * std::cos(M_PI * frac);
    }
    return p;
}

bool allowed_by_prediction(const MonodromyClass& c, const PredictedClasses& p,
                           double trace_tol) {
    bool tag_ok = false;
    for (MonodromyTag t : p.tags)
        if (t == c.tag) tag_ok = true;
    if (!tag_ok) return false;
    if (p.trace) return std::abs(c.trace - *p.trace) <= trace_tol;
    return true;
}

bool sp2z_check(double beta, double tol) {
    auto near_multiple = [tol, beta](double q) {
        double s = beta / q;
        return std::abs(s - std::round(s)) * q <= tol;
    };
    return near_multiple(0.5) || near_multiple(1.0 / 3.0);
}

}  // namespace sk2d

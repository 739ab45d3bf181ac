#include "sk2d/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sk2d {

namespace {

// Least squares y = slope * x + intercept; returns rms residual.
double line_fit(const std::vector<double>& x, const std::vector<double>& y,
                double& slope, double& intercept) {
    int n = static_cast<int>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx < 1e-12)
        throw std::runtime_error("fit_singularity: radii too clustered");
    slope = sxy / sxx;
    intercept = my - slope * mx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double e = y[i] - slope * x[i] - intercept;
        ss += e * e;
    }
    return std::sqrt(ss / n);
}

}  // namespace

SingularityFit fit_singularity(const std::function<double(complex)>& w,
                               std::vector<double> radii, complex center,
                               int n_angular) {
    if (radii.size() < 6)
        throw std::invalid_argument("fit_singularity: need >= 6 radii");
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    if (radii.back() <= 0.0)
        throw std::domain_error("fit_singularity: radii must be positive");
    if (std::log10(radii.front() / radii.back()) < 2.0 - 1e-9)
        throw std::invalid_argument(
            "fit_singularity: radii must span >= 2 decades");

    std::vector<double> lr(radii.size()), lw(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) {
        double sum = 0.0;
        for (int j = 0; j < n_angular; ++j) {
            double th = 2.0 * M_PI * j / n_angular;
            double v = w(center + radii[k] * complex(std::cos(th),
                                                     std::sin(th)));
            if (!(v > 0.0))
                throw std::domain_error(
                    "fit_singularity: nonpositive metric sample");
            sum += v;
        }
        lr[k] = std::log(radii[k]);
        lw[k] = std::log(sum / n_angular);
    }

    SingularityFit fit;
    double slope_p, icpt_p;
    double res_p = line_fit(lr, lw, slope_p, icpt_p);

    bool log_feasible = radii.front() < 1.0;
    double res_l = std::numeric_limits<double>::infinity();
    double slope_l = 0.0, icpt_l = 0.0;
    if (log_feasible) {
        // log wbar - log(-log r) = (N+1) log r + log C
        std::vector<double> yl(lw.size());
        for (size_t k = 0; k < lw.size(); ++k)
            yl[k] = lw[k] - std::log(-lr[k]);
        res_l = line_fit(lr, yl, slope_l, icpt_l);
    }

    if (res_l < 0.5 * res_p) {
        fit.kind = SingularityFit::Kind::LogType;
        long n1 = std::lround(slope_l);
        fit.N = static_cast<int>(n1) - 1;
        fit.beta = double(n1);
        fit.C = std::exp(icpt_l);
        fit.fit_residual = res_l;
    } else {
        fit.kind = SingularityFit::Kind::Power;
        fit.beta = slope_p;
        fit.C = std::exp(icpt_p);
        fit.fit_residual = res_p;
        fit.ambiguous = res_l < res_p;  // log model competitive but not 2x
    }
    return fit;
}

int cubic_order(const std::function<complex(complex)>& xi0, double r0,
                complex center, int n_steps,
                const std::function<complex(complex)>* dxi0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("cubic_order: r0 must be > 0");
    double delta = 1e-5 * r0;
    double acc = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_steps; ++k) {
        double t = 2.0 * M_PI * k / n_steps;
        complex z = center + r0 * complex(std::cos(t), std::sin(t));
        complex xi = xi0(z);
        min_abs = std::min(min_abs, std::abs(xi));
        complex dz = dxi0 ? (*dxi0)(z)
                          : (xi0(z + delta) - xi0(z - delta)) / (2.0 * delta);
        // (1/2pi i) Xi'/Xi dz with dz = i (z - center) dt.
        acc += (dz / xi * (z - center)).real();
    }
    if (min_abs < 1e-12)
        throw std::runtime_error(
            "cubic_order: cubic form nearly vanishes on the circle; "
            "retry at a different radius");
    double winding = acc / n_steps;
    long n = std::lround(winding);
    if (std::abs(winding - double(n)) >= 0.1)
        throw std::runtime_error("cubic_order: winding " +
                                 std::to_string(winding) +
                                 " is not close to an integer");
    return static_cast<int>(n);
}

bool check_bound(const SingularityFit& fit, int N) {
    if (fit.kind == SingularityFit::Kind::LogType) return fit.N == N;
    return fit.beta < double(N) + 1.0 - 1e-6;
}

}  // namespace sk2d

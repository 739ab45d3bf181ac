#pragma once

#include "sk2d/grid.hpp"

#include <vector>

namespace sk2d {

// Fitted singularity data for a metric density near a puncture:
// either w ~ C r^beta (power) or w ~ -C r^{N+1} log r (log type).
struct SingularityFit {
    enum class Kind { Power, LogType } kind = Kind::Power;
    double beta = 0.0;   // power exponent; log type stores beta = N + 1
    int N = 0;           // log type only
    double C = 0.0;      // leading coefficient, > 0
    double fit_residual = 0.0;
    // The discarded model was nearly as good; kind is then a coin toss and
    // callers should refit on a wider radius range.
    bool ambiguous = false;
};

// Angular-averages w on circles of the given radii around `center`, then
// least-squares fits log wbar against log r (power model) and against
// log r with a unit-coefficient log(-log r) offset (log model). The log
// model is selected only when its residual is below half the power model's.
// Radii must be positive, >= 6 of them spanning >= 2 decades; the log model
// is only attempted when all radii are < 1.
SingularityFit fit_singularity(const std::function<double(complex)>& w,
                               std::vector<double> radii,
                               complex center = {0.0, 0.0},
                               int n_angular = 64);

// Winding number of the cubic coefficient around the circle |z - center| = r0,
// i.e. the order of its zero or pole there. Quadrature of Xi'/Xi with the
// derivative by central differences (step 1e-5 * r0) unless an analytic
// derivative is supplied. Throws std::runtime_error if |Xi| nearly vanishes
// on the circle or the result is further than 0.1 from an integer.
int cubic_order(const std::function<complex(complex)>& xi0, double r0,
                complex center = {0.0, 0.0}, int n_steps = 512,
                const std::function<complex(complex)>* dxi0 = nullptr);

// Classification bound: power case needs beta < N + 1 strictly; log case
// needs the fitted N to match the cubic-form order.
bool check_bound(const SingularityFit& fit, int N);

}  // namespace sk2d

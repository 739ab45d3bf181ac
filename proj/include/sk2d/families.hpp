#pragma once

#include "sk2d/sk_core.hpp"

#include <json.hpp>
#include <optional>
#include <string>

namespace sk2d {

// Meromorphic input for the Liouville construction, as paired evaluators.
struct MeromorphicFn {
    std::function<complex(complex)> f;
    std::function<complex(complex)> df;
    std::function<complex(complex)> d2f;
};

MeromorphicFn power_map(int n);                                  // z^n
MeromorphicFn mobius_map(complex a, complex b, complex c, complex d);

enum class SingularityKind { Power, LogType, None };

// Closed-form special Kahler structure from one of the worked examples,
// evaluable at arbitrary points of its annulus; these are the oracles for
// everything else.
struct ClosedFormMetric {
    std::string family;
    nlohmann::json params;
    bool special_kahler = true;  // false for the pure-power model metric

    std::function<double(complex)> w;  // metric density, w > 0 on the domain
    ClosedTriple triple;               // (h, u, a) with analytic gradients

    // Known singularity data.
    SingularityKind kind = SingularityKind::None;
    double beta = 0.0;  // power exponent; for log type beta = N + 1
    std::optional<int> cubic_N;

    std::function<complex(complex)> xi0;  // closed-form cubic coefficient
    std::optional<Eigen::Matrix2d> holonomy;  // known Hol at the unit circle

    // Liouville families: the intermediate constant-curvature factor and its
    // curvature, kept for validation.
    std::function<double(complex)> cc_factor;
    double cc_curvature = 0.0;
};

// g = -(A log|z| + B) |dz|^2, A >= 0, B < 0; known parabolic holonomy.
ClosedFormMetric log_family(double A, double B);

// Special Kahler metric 1/sqrt(w_cc) |dz|^2 from a constant-curvature
// conformal factor w_cc = 4|f'|^2 / (1 + K|f|^2)^2; requires K < 0.
ClosedFormMetric liouville_metric(const MeromorphicFn& f, double K,
                                  nlohmann::json params = {});
ClosedFormMetric liouville_zn(int n);  // f = z^n, K = -1

// g = -|z| log|z| |dz|^2, from the Poincare metric on the punctured disc.
ClosedFormMetric poincare_derived();

// Flat-coordinate structure from a negative harmonic function.
ClosedFormMetric flat_from_harmonic(const ClosedScalar& h,
                                    nlohmann::json params = {});

// Pure cone model w = C |z|^beta; fit target only, not special Kahler.
ClosedFormMetric conical_model(double beta, double C);

// Registry keyed by family name: "log", "liouville-zn", "poincare",
// "flat-harmonic", "conical-model". Throws std::invalid_argument for an
// unknown name or bad parameters.
ClosedFormMetric make_family(const std::string& name,
                             const nlohmann::json& params);
std::vector<std::string> family_names();

nlohmann::json triple_metadata(const ClosedFormMetric& m);

}  // namespace sk2d

#pragma once

#include "sk2d/calculus.hpp"
#include "sk2d/sk_core.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace sk2d {

// Connection evaluator: the matrix-valued 1-form at a point.
using ConnectionEvalFn = std::function<MatOneForm(complex)>;

ConnectionEvalFn closed_form_connection(const ClosedTriple& t);

// Interpolated evaluator for solver output (bilinear in (rho, theta)).
ConnectionEvalFn sampled_connection(const ConnectionForm& c);

// Parallel transport around the loop: integrates M' = -omega(gamma') M with
// adaptive step-doubled RK4 targeting rtol, then returns the transpose.
//
// Convention (frozen): counterclockwise loop, transpose of the ODE solution.
// This reproduces the known log-family holonomy [[1, -2 A pi / B], [0, 1]]
// entrywise at the unit circle. Throws std::runtime_error on step underflow
// or determinant drift beyond 10 * rtol.
Eigen::Matrix2d parallel_transport(const ConnectionEvalFn& conn,
                                   const Loop& loop, double rtol = 1e-9);

enum class MonodromyTag {
    Trivial,
    MinusIdentity,
    ParabolicPlus,
    ParabolicMinus,
    Elliptic,
};

const char* to_string(MonodromyTag t);

struct MonodromyClass {
    MonodromyTag tag;
    double trace = 0.0;
    // Elliptic only: beta mod 2 up to the beta <-> -beta ambiguity.
    std::optional<std::pair<double, double>> beta_mod2;
};

// SL(2,R) conjugacy classification by trace; throws std::invalid_argument if
// |det - 1| > tol.
MonodromyClass classify(const Eigen::Matrix2d& m, double tol = 1e-6);

// Classes allowed by the monodromy theorem for the given cone exponent
// (log type uses beta = N + 1 by convention, always an integer).
struct PredictedClasses {
    std::vector<MonodromyTag> tags;
    std::optional<double> trace;  // 2 cos(pi beta) for non-integer beta
};
PredictedClasses predicted_class(double beta, bool is_log_type);

bool allowed_by_prediction(const MonodromyClass& c, const PredictedClasses& p,
                           double trace_tol = 1e-6);

// Hol conjugate into Sp(2,Z) iff beta in (1/2)Z union (1/3)Z.
bool sp2z_check(double beta, double tol = 1e-9);

}  // namespace sk2d

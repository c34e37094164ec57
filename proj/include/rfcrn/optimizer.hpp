#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rfcrn/core.hpp"
#include "rfcrn/dutycycle.hpp"
#include "rfcrn/mdp.hpp"

namespace rfcrn {

using ScalarFn = std::function<double(double)>;

/// Raised when a scan of (0, eps_max] finds no sign change.
class NoRootError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Threshold-valued fields are in units of `unit` (sigma_w^2 for detector
/// thresholds). `ascent_scale` is the length that gradient ascent treats as
/// one unit of its normalised coordinate; 0 means `unit`.
struct OptimizerConfig {
    double eps0 = 0.01;
    double eps1 = 0.02;
    double secant_tol = 1e-12;
    double step_beta = 0.05;
    double grad_tol = 1e-9;
    int max_iter = 100000;
    double fd_h = 1e-4;
    double eps_max = 50.0;     ///< right end of the search range
    int scan_points = 20000;   ///< grid used to bracket a root after secant failure
    double unit = 1.0;
    double ascent_scale = 0.0;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

struct RootResult {
    double root = 0.0;
    int iterations = 0;
    bool fallback = false;  ///< secant failed; result came from scan + bisection
};

/// Bisection on [a, b]; phi(a), phi(b) must differ in sign. Returns the end of
/// the final bracket on phi(a)'s side.
double bisection_root(const ScalarFn& phi, double a, double b, double tol, int max_iter = 200);

/// Secant recurrence from (eps0, eps1). On stagnation, divergence or leaving
/// (0, eps_max] it scans the range for the first sign change and bisects.
/// Throws NoRootError when the scan finds no sign change.
RootResult secant_root(const ScalarFn& phi, const OptimizerConfig& cfg);

struct AscentResult {
    double eps = 0.0;
    int iterations = 0;
    bool boundary = false;  ///< upper bound returned directly
    double gradient = 0.0;  ///< last finite-difference gradient
};

/// Projected gradient ascent eps_k = eps_{k-1} + beta * m_k * dO/deps on (0, upper],
/// in coordinates normalised by ascent_scale and |obj(eps_start)|. The multiplier
/// m_k starts at 1, doubles after a step that does not lower the objective and
/// halves (step rejected) otherwise. Stops when the step or gradient falls below
/// grad_tol. Returns the
/// upper bound immediately when the gradient there is positive or below
/// grad_tol. Throws NumericError with the last iterate on non-convergence.
AscentResult gradient_ascent(const ScalarFn& obj, double eps_start, double upper,
                             const OptimizerConfig& cfg);

struct GridResult {
    double eps = 0.0;
    double value = 0.0;
    int index = 0;
};

/// Best feasible point of an n-point uniform grid on [lo, hi]; first one wins
/// ties. Throws NumericError when no grid point is feasible.
GridResult grid_search_oracle(const ScalarFn& obj, const std::function<bool(double)>& feasible,
                              double lo, double hi, int n_points);

enum class CapacityModel { duty_cycle, mdp };

std::string to_string(CapacityModel m);
CapacityModel capacity_model_from(const std::string& name);

/// Objective and collision constraint of one threshold problem. The MDP
/// objective needs a quantisation; the constraint is P_c in both models.
struct ThresholdProblem {
    Scenario scenario;
    CapacityModel model = CapacityModel::duty_cycle;
    std::optional<Quantization> quant;

    static ThresholdProblem duty_cycle(const Scenario& s);
    static ThresholdProblem mdp(const Scenario& s, int n_tau);

    double objective(double eps) const;
    double collision(double eps) const;
    double rate(double eps) const { return rate_scale(scenario) * objective(eps); }
};

struct OptimizeResult {
    double eps_star = 0.0;
    double eps_c = 0.0;       ///< constraint boundary; eps_max when unconstrained
    double objective = 0.0;
    double collision = 0.0;
    double rate = 0.0;        ///< bits/s at eps_star

    std::string model;
    std::string branch;       ///< constrained-interior, constrained-boundary, unconstrained
    bool secant_fallback = false;
    int secant_iterations = 0;
    int ascent_iterations = 0;
    double gamma1 = 0.0;

    /// One JSON object on a single line.
    std::string diagnostics_json() const;
};

/// Secant search for P_c(eps_c) = P_bar_c, then gradient ascent from eps_c.
/// When gamma1 <= P_bar_c the range becomes (0, eps_max], bounded by the first
/// crossing if the collision curve still overshoots the target.
/// `cfg` thresholds are in units of sigma_w^2.
OptimizeResult optimize_threshold(const ThresholdProblem& problem,
                                  const OptimizerConfig& cfg = {});

}  // namespace rfcrn

#include "rfcrn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace rfcrn {

void OptimizerConfig::validate() const
{
    const auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw ValidationError(name, "must be > 0");
        }
    };
    positive(eps0, "eps0");
    positive(eps1, "eps1");
    positive(secant_tol, "secant_tol");
    positive(step_beta, "step_beta");
    positive(grad_tol, "grad_tol");
    positive(fd_h, "fd_h");
    positive(eps_max, "eps_max");
    positive(unit, "unit");
    if (eps0 == eps1) {
        throw ValidationError("eps1", "must differ from eps0");
    }
    if (max_iter < 1) {
        throw ValidationError("max_iter", "must be >= 1");
    }
    if (scan_points < 2) {
        throw ValidationError("scan_points", "must be >= 2");
    }
    if (!(ascent_scale >= 0.0)) {
        throw ValidationError("ascent_scale", "must be >= 0");
    }
}

double bisection_root(const ScalarFn& phi, double a, double b, double tol, int max_iter)
{
    double fa = phi(a);
    const double fb = phi(b);
    if (fa == 0.0) {
        return a;
    }
    if (fb == 0.0) {
        return b;
    }
    if (std::signbit(fa) == std::signbit(fb)) {
        throw NoRootError("bisection: phi has the same sign at both ends of the bracket");
    }
    for (int k = 0; k < max_iter && std::abs(b - a) > tol; ++k) {
        const double m = 0.5 * (a + b);
        const double fm = phi(m);
        if (fm == 0.0) {
            return m;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return a;
}

namespace {

struct Bracket {
    double lo;
    double hi;
};

// First sign change of phi on the grid hi * i / n, i = 1..n.
std::optional<Bracket> scan_sign_change(const ScalarFn& phi, double hi, int n)
{
    double prev_x = hi / n;
    double prev = phi(prev_x);
    if (prev == 0.0) {
        return Bracket{prev_x, prev_x};
    }
    for (int i = 2; i <= n; ++i) {
        const double x = hi * i / n;
        const double f = phi(x);
        if (f == 0.0 || std::signbit(f) != std::signbit(prev)) {
            return Bracket{prev_x, x};
        }
        prev_x = x;
        prev = f;
    }
    return std::nullopt;
}

RootResult scan_and_bisect(const ScalarFn& phi, const OptimizerConfig& cfg, int iterations)
{
    const double hi = cfg.eps_max * cfg.unit;
    const auto bracket = scan_sign_change(phi, hi, cfg.scan_points);
    if (!bracket) {
        throw NoRootError("no sign change of phi on (0, " + std::to_string(hi) + "]");
    }
    RootResult r;
    r.iterations = iterations;
    r.fallback = true;
    r.root = bracket->lo == bracket->hi
                 ? bracket->lo
                 : bisection_root(phi, bracket->lo, bracket->hi, cfg.secant_tol * cfg.unit);
    return r;
}

}  // namespace

RootResult secant_root(const ScalarFn& phi, const OptimizerConfig& cfg)
{
    cfg.validate();
    const double hi = cfg.eps_max * cfg.unit;
    const double tol = cfg.secant_tol * cfg.unit;
    double a = cfg.eps0 * cfg.unit;
    double b = cfg.eps1 * cfg.unit;
    double fa = phi(a);
    double fb = phi(b);
    if (fa == 0.0) {
        return {a, 0, false};
    }
    for (int k = 1; k <= cfg.max_iter; ++k) {
        if (fb == 0.0) {
            return {b, k - 1, false};
        }
        const double denom = fb - fa;
        if (denom == 0.0 || !std::isfinite(denom)) {
            return scan_and_bisect(phi, cfg, k);
        }
        const double c = b - fb * (b - a) / denom;
        if (!std::isfinite(c) || c <= 0.0 || c > hi) {
            return scan_and_bisect(phi, cfg, k);
        }
        a = b;
        fa = fb;
        b = c;
        fb = phi(b);
        if (std::abs(b - a) < tol) {
            return {b, k, false};
        }
    }
    return scan_and_bisect(phi, cfg, cfg.max_iter);
}

AscentResult gradient_ascent(const ScalarFn& obj, double eps_start, double upper,
                             const OptimizerConfig& cfg)
{
    cfg.validate();
    const double s = cfg.ascent_scale > 0.0 ? cfg.ascent_scale : cfg.unit;
    const double h = cfg.fd_h * cfg.unit;
    const double lower = h;
    if (!(upper > lower)) {
        throw ValidationError("upper", "ascent range (0, upper] is narrower than fd_h");
    }
    double norm = std::abs(obj(eps_start));
    if (!(norm > 1e-300) || !std::isfinite(norm)) {
        norm = 1.0;
    }
    // Derivative with respect to the normalised coordinate eps / s.
    const auto grad = [&](double e) {
        const double lo = std::max(0.0, e - h);
        return (obj(e + h) - obj(lo)) / (e + h - lo) * s / norm;
    };

    AscentResult r;
    double x = std::clamp(eps_start, lower, upper);
    double fx = obj(x);
    double g = grad(x);
    if (x == upper && (g > 0.0 || std::abs(g) < cfg.grad_tol)) {
        r.eps = upper;
        r.boundary = true;
        r.gradient = g;
        return r;
    }
    // Step multiplier doubles after an improving step and halves after an
    // overshoot, so flat Gaussian tails are crossed in a few dozen iterations.
    double m = 1.0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        r.iterations = k;
        const double next = std::clamp(x + cfg.step_beta * m * g * s, lower, upper);
        const double step = std::abs(next - x) / s;
        if (step < cfg.grad_tol || std::abs(g) < cfg.grad_tol) {
            r.eps = x;
            r.gradient = g;
            r.boundary = x == upper;
            return r;
        }
        const double fn = obj(next);
        if (fn >= fx) {
            x = next;
            fx = fn;
            m = std::min(m * 2.0, 1e12);
            g = grad(x);
            if (!std::isfinite(g)) {
                break;
            }
        } else {
            m *= 0.5;
        }
    }
    std::ostringstream msg;
    msg.precision(10);
    msg << "gradient ascent did not converge: last iterate " << x << ", gradient " << g;
    throw NumericError(msg.str());
}

GridResult grid_search_oracle(const ScalarFn& obj, const std::function<bool(double)>& feasible,
                              double lo, double hi, int n_points)
{
    if (n_points < 2) {
        throw ValidationError("n_points", "must be >= 2");
    }
    if (!(hi > lo)) {
        throw ValidationError("range", "hi must exceed lo");
    }
    GridResult best;
    bool found = false;
    for (int i = 0; i < n_points; ++i) {
        const double e = lo + (hi - lo) * i / (n_points - 1);
        if (!feasible(e)) {
            continue;
        }
        const double v = obj(e);
        if (!found || v > best.value) {
            best = {e, v, i};
            found = true;
        }
    }
    if (!found) {
        throw NumericError("grid search: no feasible grid point");
    }
    return best;
}

std::string to_string(CapacityModel m)
{
    return m == CapacityModel::mdp ? "mdp" : "duty-cycle";
}

CapacityModel capacity_model_from(const std::string& name)
{
    if (name == "duty-cycle" || name == "duty") {
        return CapacityModel::duty_cycle;
    }
    if (name == "mdp") {
        return CapacityModel::mdp;
    }
    throw ValidationError("model", "unknown capacity model '" + name + "'");
}

ThresholdProblem ThresholdProblem::duty_cycle(const Scenario& s)
{
    return ThresholdProblem{s, CapacityModel::duty_cycle, std::nullopt};
}

ThresholdProblem ThresholdProblem::mdp(const Scenario& s, int n_tau)
{
    return ThresholdProblem{s, CapacityModel::mdp, quantize(s.params, n_tau)};
}

double ThresholdProblem::objective(double eps) const
{
    if (model == CapacityModel::mdp) {
        return mdp_objective(*quant, scenario, eps);
    }
    return rfcrn::objective(scenario, eps);
}

double ThresholdProblem::collision(double eps) const
{
    return collision_prob(scenario, eps);
}

std::string OptimizeResult::diagnostics_json() const
{
    const nlohmann::json j = {
        {"model", model},
        {"branch", branch},
        {"eps_star", eps_star},
        {"eps_c", eps_c},
        {"objective", objective},
        {"collision", collision},
        {"rate_bps", rate},
        {"gamma1", gamma1},
        {"secant_iterations", secant_iterations},
        {"secant_fallback", secant_fallback},
        {"ascent_iterations", ascent_iterations},
    };
    return j.dump();
}

OptimizeResult optimize_threshold(const ThresholdProblem& problem, const OptimizerConfig& cfg)
{
    cfg.validate();
    const Scenario& s = problem.scenario;
    OptimizerConfig c = cfg;
    c.unit = s.sensing.sigma_w2;
    c.ascent_scale = s.sensing.sigma_w2 / std::sqrt(static_cast<double>(s.sensing.N_s));

    const double target = s.params.P_bar_c();
    const ScalarFn phi = [&](double e) { return problem.collision(e) - target; };
    const ScalarFn obj = [&](double e) { return problem.objective(e); };
    const double hi = c.eps_max * c.unit;

    OptimizeResult r;
    r.model = to_string(problem.model);
    r.gamma1 = gamma1(s);

    double start = 0.0;
    bool constrained = true;
    if (r.gamma1 > target) {
        const RootResult root = secant_root(phi, c);
        r.eps_c = root.root;
        r.secant_fallback = root.fallback;
        r.secant_iterations = root.iterations;
        // Secant may land a hair on the infeasible side.
        for (double d = c.secant_tol * c.unit; phi(r.eps_c) > 0.0; d *= 2.0) {
            r.eps_c = std::max(0.0, r.eps_c - d);
        }
        start = r.eps_c;
    } else {
        constrained = false;
        r.eps_c = hi;
        double best = -1.0;
        for (int i = 1; i <= c.scan_points; ++i) {
            const double e = hi * i / c.scan_points;
            if (phi(e) > 0.0) {
                const double prev = hi * (i - 1) / c.scan_points;
                r.eps_c = i == 1 ? prev : bisection_root(phi, prev, e, c.secant_tol * c.unit);
                r.secant_fallback = true;
                break;
            }
            if (const double v = obj(e); v > best) {
                best = v;
                start = e;
            }
        }
        if (start == 0.0) {
            start = r.eps_c;
        }
    }

    const AscentResult asc = gradient_ascent(obj, start, r.eps_c, c);
    r.eps_star = asc.eps;
    r.ascent_iterations = asc.iterations;
    r.branch = !constrained ? "unconstrained"
               : asc.boundary ? "constrained-boundary"
                              : "constrained-interior";
    r.objective = obj(r.eps_star);
    r.collision = problem.collision(r.eps_star);
    r.rate = rate_scale(s) * r.objective;
    return r;
}

}  // namespace rfcrn

#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rfcrn/core.hpp"
#include "rfcrn/dutycycle.hpp"

namespace rfcrn {

/// Outcome of the four battery-size conditions that make the harvesting jump
/// land inside the chain. (c) uses n_tau for the undefined n_beta, i.e. the
/// real-valued form of (b).
struct AssumptionCheck {
    bool a = true;  ///< n_kappa + n_tau - 1 <= N_b - 1
    bool b = true;  ///< floor(E^h / e_q) <= N_b - n_tau
    bool c = true;  ///< E^h / e_q < N_b - n_tau + 1
    bool d = true;  ///< N_b > (E^h / (e_s + e_t) + 1) n_tau - 1

    bool ok() const noexcept { return a && b && c && d; }
    /// e.g. "(a), (d)"; empty when ok().
    std::string failures() const;
};

/// Battery discretisation in energy quanta.
struct Quantization {
    int n_b = 0;                 ///< number of battery states
    int n_tau = 0;               ///< harvesting states; quanta per active slot
    int n_kappa = 0;             ///< quanta gained per busy harvesting slot
    double e_q = 0.0;            ///< quantum energy (J)
    double harvest_quanta = 0.0; ///< E^h / e_q before flooring
    AssumptionCheck assumption;

    /// Structural constructor for given integers; e_q and harvest_quanta are
    /// set to 1 and n_kappa. Requires 1 <= n_tau < n_b, n_kappa >= 0.
    static Quantization make(int n_b, int n_tau, int n_kappa);
};

/// e_q = (e_s + e_t) / n_tau, N_b = floor(B_max / e_q),
/// n_kappa = floor(g n_tau phi P_p T_t / (e_s + e_t)).
/// Throws ValidationError when n_kappa = 0 or an assumption condition fails.
Quantization quantize(const SystemParams& p, int n_tau);

/// Row-stochastic N_b x N_b battery transition matrix.
class TransitionMatrix {
public:
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    explicit TransitionMatrix(Sparse u);

    int size() const noexcept { return static_cast<int>(u_.rows()); }
    double operator()(int i, int j) const { return u_.coeff(i, j); }
    const Sparse& sparse() const noexcept { return u_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(u_); }
    /// max_i |sum_j U_ij - 1|
    double row_sum_error() const;

    /// Row-major CSV dump, one matrix row per line.
    void write_csv(std::ostream& out) const;

private:
    Sparse u_;
};

/// kappa = p_o^{c_h}: probability a harvesting slot gains n_kappa quanta.
/// tau: probability an active slot spends n_tau quanta.
TransitionMatrix build_transition_matrix(const Quantization& q, double kappa, double tau);
TransitionMatrix build_transition_matrix(const Quantization& q, const Scenario& s, double eps);

struct SteadyState {
    Eigen::VectorXd pi;
    int iterations = 0;     ///< 0 for the closed form
    double residual = 0.0;  ///< ||pi U - pi||_1 when known
};

/// Closed-form stationary vector: tau/D on harvesting states, kappa/D on the
/// first n_kappa active states, 0 elsewhere, D = n_kappa kappa + n_tau tau.
/// Throws NumericError for kappa = 0, tau = 0 or n_kappa = 0.
SteadyState steady_state_closed_form(const Quantization& q, double kappa, double tau);
SteadyState steady_state_closed_form(const Quantization& q, const Scenario& s, double eps);

/// Power iteration pi <- pi U from the uniform vector until the L1 change
/// drops below `tol`. Throws NumericError for a periodic recurrent class or
/// when max_iter is exhausted (message carries the residual).
SteadyState steady_state_numeric(const TransitionMatrix& u, double tol = 1e-14,
                                 int max_iter = 2'000'000);

/// Period of each closed class, maximised; 1 means every recurrent class is aperiodic.
int chain_period(const TransitionMatrix& u);

/// tau(eps) = [1 - P_f] p_i^{c_t} + [1 - P_d] p_o^{c_t}
double active_spend_prob(const Scenario& s, double eps);

/// Exact quantised activity sum_{i >= n_tau} pi_i = n_kappa kappa / D.
double prob_active_mdp(const Quantization& q, const Scenario& s, double eps);

/// Large-n_tau form E^h kappa / (E^h kappa + (e_s + e_t) tau).
double prob_active_mdp_continuous(const Scenario& s, double eps);

/// Limit of the continuous form as eps grows: E^h kappa / (E^h kappa + e_s + e_t).
double gamma2(const Scenario& s);

/// O^M(eps) = [1 - P_f] P^M_a, exact (quantised) or continuous activity.
double mdp_objective(const Quantization& q, const Scenario& s, double eps);
double mdp_objective_continuous(const Scenario& s, double eps);

}  // namespace rfcrn

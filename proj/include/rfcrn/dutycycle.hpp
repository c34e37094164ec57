#pragma once

#include "rfcrn/core.hpp"
#include "rfcrn/sensing.hpp"

namespace rfcrn {

/// Idle/busy probabilities of the harvest (c_h) and transmit (c_t) subchannels.
class ChannelPair {
public:
    /// Throws ValidationError unless both idle probabilities lie in [0, 1].
    static ChannelPair from_idle(double p_i_h, double p_i_t);

    double p_i_h() const noexcept { return p_i_h_; }
    double p_o_h() const noexcept { return 1.0 - p_i_h_; }
    double p_i_t() const noexcept { return p_i_t_; }
    double p_o_t() const noexcept { return 1.0 - p_i_t_; }

private:
    ChannelPair(double p_i_h, double p_i_t) : p_i_h_(p_i_h), p_i_t_(p_i_t) {}
    double p_i_h_;
    double p_i_t_;
};

/// Everything the stochastic models need for one (params, channels, detector) setting.
struct Scenario {
    SystemParams params;
    ChannelPair pair;
    SensingModel sensing;

    static Scenario make(const SystemParams& params, const ChannelPair& pair)
    {
        return Scenario{params, pair, SensingModel::from(params)};
    }
};

/// Mean harvested energy per sleeping slot, rho_h = g xi p_o^{c_h}.
double harvest_rate(const SystemParams& p, const ChannelPair& pair);

/// Probability that an active slot ends in a transmission:
/// [1 - P_f] p_i^{c_t} + [1 - P_d] p_o^{c_t}.
double transmit_prob(const ChannelPair& pair, const SensingModel& m, double eps);

/// Mean energy spent per active slot, rho_c = e_s + transmit_prob * e_t.
double consume_rate(const SystemParams& p, const ChannelPair& pair, const SensingModel& m,
                    double eps);

/// Duty-cycle activity rho_h / (rho_h + rho_c). Throws NumericError if both
/// rates vanish.
double prob_active(double rho_h, double rho_c);
double prob_active(const Scenario& s, double eps);

/// Large-threshold asymptote rho_h / (rho_h + e_s + e_t).
double gamma1(const Scenario& s);

/// (T_t / T_slot) C [1 - P_f] P_a p_i^{c_t}, bits/s.
double rate_capacity(const Scenario& s, double eps);

/// [1 - P_d] P_a.
double collision_prob(const Scenario& s, double eps);

/// O(eps) = [1 - P_f] P_a; rate_capacity = rate_scale * O.
double objective(const Scenario& s, double eps);

/// (T_t / T_slot) C p_i^{c_t}: the factor between objective and rate.
double rate_scale(const Scenario& s);

}  // namespace rfcrn

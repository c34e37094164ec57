#include "rfcrn/dutycycle.hpp"

#include <cmath>

namespace rfcrn {

ChannelPair ChannelPair::from_idle(double p_i_h, double p_i_t)
{
    if (!(p_i_h >= 0.0 && p_i_h <= 1.0)) {
        throw ValidationError("p_i_h", "must lie in [0, 1]");
    }
    if (!(p_i_t >= 0.0 && p_i_t <= 1.0)) {
        throw ValidationError("p_i_t", "must lie in [0, 1]");
    }
    return ChannelPair(p_i_h, p_i_t);
}

double harvest_rate(const SystemParams& p, const ChannelPair& pair)
{
    return p.g() * p.xi() * pair.p_o_h();
}

double transmit_prob(const ChannelPair& pair, const SensingModel& m, double eps)
{
    const double pf = prob_false_alarm(m, eps);
    const double pd = prob_detection(m, eps);
    return (1.0 - pf) * pair.p_i_t() + (1.0 - pd) * pair.p_o_t();
}

double consume_rate(const SystemParams& p, const ChannelPair& pair, const SensingModel& m,
                    double eps)
{
    return p.e_s() + transmit_prob(pair, m, eps) * p.e_t();
}

double prob_active(double rho_h, double rho_c)
{
    const double total = rho_h + rho_c;
    if (!(total > 0.0)) {
        throw NumericError("prob_active: harvest and consumption rates are both zero");
    }
    return rho_h / total;
}

double prob_active(const Scenario& s, double eps)
{
    return prob_active(harvest_rate(s.params, s.pair),
                       consume_rate(s.params, s.pair, s.sensing, eps));
}

double gamma1(const Scenario& s)
{
    const double rho_h = harvest_rate(s.params, s.pair);
    return prob_active(rho_h, s.params.e_s() + s.params.e_t());
}

double rate_scale(const Scenario& s)
{
    return s.params.T_t() / s.params.T_slot() * s.params.link_capacity() * s.pair.p_i_t();
}

double objective(const Scenario& s, double eps)
{
    return (1.0 - prob_false_alarm(s.sensing, eps)) * prob_active(s, eps);
}

double rate_capacity(const Scenario& s, double eps)
{
    return rate_scale(s) * objective(s, eps);
}

double collision_prob(const Scenario& s, double eps)
{
    return (1.0 - prob_detection(s.sensing, eps)) * prob_active(s, eps);
}

}  // namespace rfcrn

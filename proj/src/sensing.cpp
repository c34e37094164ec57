#include "rfcrn/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfcrn {

SensingModel SensingModel::make(double sigma_w2, double sigma_p2, double g, long long N_s)
{
    if (!(std::isfinite(sigma_w2) && sigma_w2 > 0.0)) {
        throw ValidationError("sigma_w2", "must be > 0");
    }
    if (!(std::isfinite(sigma_p2) && sigma_p2 >= 0.0)) {
        throw ValidationError("sigma_p2", "must be >= 0");
    }
    if (!(std::isfinite(g) && g >= 0.0)) {
        throw ValidationError("g", "must be >= 0");
    }
    if (N_s < 1) {
        throw ValidationError("N_s", "must be >= 1");
    }
    return SensingModel{sigma_w2, sigma_p2, g, N_s};
}

SensingModel SensingModel::from(const SystemParams& p)
{
    return make(p.sigma_w2(), p.sigma_p2(), p.g(), p.N_s());
}

namespace {

void check_threshold(double eps)
{
    if (!(eps >= 0.0) || std::isnan(eps)) {
        throw std::domain_error("detection threshold must be >= 0");
    }
}

}  // namespace

double prob_false_alarm(const SensingModel& m, double eps)
{
    check_threshold(eps);
    if (std::isinf(eps)) {
        return 0.0;
    }
    return q_function((eps / m.sigma_w2 - 1.0) * std::sqrt(static_cast<double>(m.N_s)));
}

double prob_detection(const SensingModel& m, double eps)
{
    check_threshold(eps);
    if (std::isinf(eps)) {
        return 0.0;
    }
    const double busy_power = (m.pu_snr() + 1.0) * m.sigma_w2;
    return q_function((eps / busy_power - 1.0) * std::sqrt(static_cast<double>(m.N_s)));
}

ThresholdWindow transition_window(const SensingModel& m, double width)
{
    const double spread = width / std::sqrt(static_cast<double>(m.N_s));
    const double lo = m.sigma_w2 * std::max(0.0, 1.0 - spread);
    const double hi = m.sigma_w2 * (1.0 + m.pu_snr()) * (1.0 + spread);
    return {lo, hi};
}

}  // namespace rfcrn

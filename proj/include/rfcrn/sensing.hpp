#pragma once

#include "rfcrn/core.hpp"

namespace rfcrn {

/// Energy detector operating point on the transmit subchannel.
struct SensingModel {
    double sigma_w2 = 1.0;  ///< noise variance (W)
    double sigma_p2 = 0.1;  ///< PU signal variance (W)
    double g = 1.0;         ///< PU-to-SU channel gain
    long long N_s = 2000;   ///< samples per sensing period

    /// Throws ValidationError when an invariant is broken.
    static SensingModel make(double sigma_w2, double sigma_p2, double g, long long N_s);
    static SensingModel from(const SystemParams& p);

    /// Received PU-signal SNR g * sigma_p2 / sigma_w2.
    double pu_snr() const noexcept { return g * sigma_p2 / sigma_w2; }
};

/// P_f(eps) = Q((eps / sigma_w2 - 1) sqrt(N_s)). Throws std::domain_error for eps < 0.
double prob_false_alarm(const SensingModel& m, double eps);

/// P_d(eps | g) = Q((eps / ((g sigma_p2 / sigma_w2 + 1) sigma_w2) - 1) sqrt(N_s)).
double prob_detection(const SensingModel& m, double eps);

/// Threshold interval (absolute units) that contains both detector
/// transitions with `width` standard deviations of margin on each side.
struct ThresholdWindow {
    double lo;
    double hi;
};
ThresholdWindow transition_window(const SensingModel& m, double width = 5.0);

}  // namespace rfcrn

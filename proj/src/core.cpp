#include "rfcrn/core.hpp"

#include <cmath>
#include <sstream>

namespace rfcrn {

double q_function(double x)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("q_function: non-finite argument");
    }
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

long long robust_floor(double x)
{
    const double slack = 1e-9 * std::max(1.0, std::abs(x));
    return static_cast<long long>(std::floor(x + slack));
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    return splitmix64(splitmix64(base) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

double SystemParams::snr_su() const noexcept
{
    if (raw_.g_su > 0.0) {
        return raw_.P_t * raw_.g_su / raw_.sigma_w2;
    }
    return raw_.snr_su;
}

double SystemParams::link_capacity() const noexcept
{
    return raw_.W * std::log2(1.0 + snr_su());
}

namespace {

void require(bool ok, const char* field, const char* what)
{
    if (!ok) {
        throw ValidationError(field, what);
    }
}

void require_positive(double v, const char* field)
{
    require(std::isfinite(v) && v > 0.0, field, "must be a finite value > 0");
}

}  // namespace

SystemParams validate_params(const RawParams& raw)
{
    require_positive(raw.W, "W");
    require_positive(raw.T_s, "T_s");
    if (raw.T_slot) {
        require_positive(*raw.T_slot, "T_slot");
    }

    double t_t = 0.0;
    if (raw.T_t) {
        require_positive(*raw.T_t, "T_t");
        t_t = *raw.T_t;
        if (raw.T_slot) {
            const double mismatch = std::abs(raw.T_s + t_t - *raw.T_slot);
            require(mismatch <= 1e-12 * *raw.T_slot, "T_slot", "must equal T_s + T_t");
        }
    } else {
        const double t_slot = raw.T_slot.value_or(100e-3);
        require(t_slot > raw.T_s, "T_slot", "must exceed T_s");
        t_t = t_slot - raw.T_s;
    }

    require_positive(raw.P_s, "P_s");
    require_positive(raw.P_t, "P_t");
    require_positive(raw.P_nc, "P_nc");
    require_positive(raw.P_p, "P_p");
    require(std::isfinite(raw.eta) && raw.eta > 0.0 && raw.eta <= 1.0, "eta", "must lie in (0, 1]");
    require(std::isfinite(raw.phi) && raw.phi > 0.0 && raw.phi <= 1.0, "phi", "must lie in (0, 1]");
    require_positive(raw.sigma_w2, "sigma_w2");
    require_positive(raw.sigma_p2, "sigma_p2");
    require(std::isfinite(raw.g) && raw.g >= 0.0, "g", "must be >= 0");
    require(std::isfinite(raw.P_bar_c) && raw.P_bar_c > 0.0 && raw.P_bar_c < 1.0, "P_bar_c",
            "must lie in (0, 1)");
    require(raw.N_s >= 1, "N_s", "must be a positive integer");
    require(std::isfinite(raw.snr_su) && raw.snr_su >= 0.0, "snr_su", "must be >= 0");
    require(std::isfinite(raw.g_su) && raw.g_su >= 0.0, "g_su", "must be >= 0");

    SystemParams p;
    p.raw_ = raw;
    p.T_t_ = t_t;

    const double e_active = p.e_s() + p.e_t();
    if (raw.B_max) {
        require_positive(*raw.B_max, "B_max");
        p.B_max_ = *raw.B_max;
    } else {
        p.B_max_ = 2.0 * e_active;
    }
    require(std::isfinite(raw.B_0) && raw.B_0 >= 0.0 && raw.B_0 <= p.B_max_, "B_0",
            "must lie in [0, B_max]");

    if (p.B_max_ < e_active) {
        std::ostringstream msg;
        msg << "B_max (" << p.B_max_ << " J) is below e_s + e_t (" << e_active
            << " J); the SU can never enter active mode";
        p.warnings_.push_back(msg.str());
    }
    return p;
}

}  // namespace rfcrn

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfcrn {

/// Raised when a configuration or input value breaks a documented invariant.
/// `field()` names the offending key so the CLI can report it verbatim.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a numerical routine cannot produce a trustworthy answer
/// (non-convergence, loss of positive definiteness, ELBO decrease, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Upper-tail probability of the standard normal, Q(x) = P(Z > x).
/// Throws std::domain_error for non-finite input.
double q_function(double x);

/// floor() that tolerates representation error on ratios that are
/// mathematically integral (e.g. 0.6/0.2).
long long robust_floor(double x);

/// SplitMix64 step; used to derive independent per-task seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Unvalidated parameter values as read from a config file. Every quantity is
/// in SI units and linear scale; unit suffixes are resolved by the config
/// reader. Optional members fall back to documented defaults.
struct RawParams {
    double W = 1e6;
    std::optional<double> T_slot;
    double T_s = 2e-3;
    std::optional<double> T_t;
    double P_s = 110e-3;
    double P_t = 50e-3;
    double P_nc = 115.9e-3;
    double P_p = 1.0;
    double eta = 0.27227013080779128;  // -5.65 dB
    double phi = 0.2;
    double sigma_w2 = 1.0;
    double sigma_p2 = 0.1;
    double g = 1.0;
    std::optional<double> B_max;
    double B_0 = 0.0;
    double P_bar_c = 0.1;
    long long N_s = 2000;
    double snr_su = 10.0;
    /// When positive, the SU link SNR is derived as P_t * g_su / sigma_w2.
    double g_su = 0.0;
};

/// Validated, immutable system constants. Derived energies are computed on
/// access so they always reflect the stored primitives.
class SystemParams {
public:
    double W() const noexcept { return raw_.W; }
    double T_s() const noexcept { return raw_.T_s; }
    double T_t() const noexcept { return T_t_; }
    double T_slot() const noexcept { return raw_.T_s + T_t_; }
    double P_s() const noexcept { return raw_.P_s; }
    double P_t() const noexcept { return raw_.P_t; }
    double P_nc() const noexcept { return raw_.P_nc; }
    double P_p() const noexcept { return raw_.P_p; }
    double eta() const noexcept { return raw_.eta; }
    double phi() const noexcept { return raw_.phi; }
    double sigma_w2() const noexcept { return raw_.sigma_w2; }
    double sigma_p2() const noexcept { return raw_.sigma_p2; }
    double g() const noexcept { return raw_.g; }
    double B_max() const noexcept { return B_max_; }
    double B_0() const noexcept { return raw_.B_0; }
    double P_bar_c() const noexcept { return raw_.P_bar_c; }
    long long N_s() const noexcept { return raw_.N_s; }
    double g_su() const noexcept { return raw_.g_su; }

    /// Sensing energy per active slot.
    double e_s() const noexcept { return raw_.T_s * raw_.P_s; }
    /// Transmission energy per slot in which the SU transmits.
    double e_t() const noexcept { return T_t_ * (raw_.P_t / raw_.eta + raw_.P_nc); }
    /// Harvested energy per busy slot before the channel gain.
    double xi() const noexcept { return raw_.phi * raw_.P_p * T_t_; }
    /// Energy actually stored per busy harvesting slot (g * xi).
    double harvest_energy() const noexcept { return raw_.g * xi(); }
    double snr_su() const noexcept;
    /// SU link capacity W log2(1 + SNR) in bits/s.
    double link_capacity() const noexcept;

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    /// The values as supplied, before defaults were resolved. Edit a copy
    /// and revalidate to derive a variant (defaults then follow the edit).
    const RawParams& raw() const noexcept { return raw_; }

private:
    friend SystemParams validate_params(const RawParams&);
    SystemParams() = default;

    RawParams raw_;
    double T_t_ = 0.0;
    double B_max_ = 0.0;
    std::vector<std::string> warnings_;
};

/// Checks every invariant, fills defaults (T_slot/T_t completion,
/// B_max = 2(e_s + e_t)) and returns the immutable parameter set.
/// Throws ValidationError naming the first offending field.
SystemParams validate_params(const RawParams& raw);

}  // namespace rfcrn

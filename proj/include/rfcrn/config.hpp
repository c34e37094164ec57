#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rfcrn/core.hpp"

namespace rfcrn {

/// Parses a scalar with an optional unit suffix into SI / linear units.
/// Recognised suffixes: s, ms, us, W, mW, uW, J, mJ, uJ, Hz, kHz, MHz, dB.
/// "dB" values are converted to a linear ratio. Throws ValidationError
/// (field = `key`) on malformed input.
double parse_quantity(std::string_view text, std::string_view key = "value");

/// Plain-text key=value configuration. Lines starting with '#' are comments;
/// later assignments override earlier ones.
class Config {
public:
    static Config parse(std::string_view text, std::string_view origin = "<string>");
    static Config load(const std::string& path);
    /// Built-in preset by name ("default", "tabulated", "voip", "game",
    /// "cluster-separated", "cluster-overlap", "pipeline").
    static Config preset(const std::string& name);
    static std::vector<std::string> preset_names();

    /// Applies a "KEY=VALUE" override.
    void set(std::string_view assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    /// Comma-separated list of quantities.
    std::vector<double> get_list(const std::string& key) const;
    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

    /// Keys under "prefix." with the prefix stripped, in sorted order.
    std::vector<std::string> subkeys(const std::string& prefix) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    /// Canonical text form (sorted key=value lines); round-trips through parse().
    std::string dump() const;

private:
    std::map<std::string, std::string> values_;
};

/// Extracts the SystemParams primitives from a config; keys are the field
/// names (W, T_slot, T_s, T_t, P_s, ..., N_s, snr_su, g_su).
RawParams raw_params_from(const Config& cfg);
SystemParams params_from(const Config& cfg);

}  // namespace rfcrn

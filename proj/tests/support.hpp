#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rfcrn/config.hpp"
#include "rfcrn/dutycycle.hpp"

namespace rfcrn::test {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("rfcrn-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& text) const
    {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p;
    }

private:
    std::filesystem::path path_;
};

/// Direction changes of forward differences; steps below 1e-13 of the largest
/// magnitude are treated as flat and skipped.
inline int sign_changes(const std::vector<double>& f)
{
    double scale = 0.0;
    for (double v : f) {
        scale = std::max(scale, std::abs(v));
    }
    int changes = 0, last = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double d = f[i] - f[i - 1];
        if (std::abs(d) <= 1e-13 * scale) {
            continue;
        }
        const int s = d > 0 ? 1 : -1;
        if (last != 0 && s != last) {
            ++changes;
        }
        last = s;
    }
    return changes;
}

inline Scenario default_scenario(double p_i_h = 0.2, double p_i_t = 0.8)
{
    return Scenario::make(params_from(Config::preset("default")),
                          ChannelPair::from_idle(p_i_h, p_i_t));
}

/// Random but valid system/channel settings for property tests. Powers,
/// durations and detector settings vary around the default preset.
struct ScenarioGen {
    std::mt19937_64 rng;
    double fixed_P_bar_c = 0.0;  ///< used instead of a random target when positive
    explicit ScenarioGen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    Scenario next()
    {
        RawParams r;
        r.T_s = uniform(1e-3, 5e-3);
        r.T_t = uniform(50e-3, 150e-3);
        r.P_s = uniform(20e-3, 200e-3);
        r.P_t = uniform(10e-3, 100e-3);
        r.P_nc = uniform(10e-3, 150e-3);
        r.eta = uniform(0.2, 0.9);
        r.phi = uniform(0.05, 0.9);
        r.P_p = uniform(0.2, 2.0);
        r.sigma_p2 = log_uniform(0.02, 1.0);
        r.g = uniform(0.3, 1.5);
        r.N_s = static_cast<long long>(uniform(200, 5000));
        r.P_bar_c = uniform(0.02, 0.3);
        if (fixed_P_bar_c > 0.0) {
            r.P_bar_c = fixed_P_bar_c;
        }
        return Scenario::make(validate_params(r),
                              ChannelPair::from_idle(uniform(0.05, 0.95), uniform(0.05, 0.95)));
    }
};

}  // namespace rfcrn::test

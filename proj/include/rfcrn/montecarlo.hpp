#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rfcrn/dutycycle.hpp"

namespace rfcrn {

/// Per-slot channel state process. `iid` draws each slot independently;
/// `markov` keeps the marginal busy probability but correlates consecutive
/// slots with lag-one correlation `burst_corr`.
enum class ChannelProcess { iid, markov };

struct SimConfig {
    explicit SimConfig(Scenario s) : scenario(std::move(s)) {}

    long long N_t = 100000;
    std::uint64_t seed = 1;
    double eps = 1.0;
    Scenario scenario;
    int batches = 100;  ///< batch count for batch-means standard errors
    ChannelProcess process = ChannelProcess::iid;
    double burst_corr = 0.0;

    void validate() const;
};

struct SimReport {
    double actual_capacity = 0.0;  ///< bits/s
    double active_fraction = 0.0;
    double collision_rate = 0.0;   ///< collisions per busy transmit-channel slot
    double mean_battery = 0.0;     ///< J, averaged at slot start

    double se_capacity = 0.0;
    double se_active = 0.0;
    double se_collision = 0.0;

    long long slots = 0;
    long long active_count = 0;
    long long transmit_count = 0;
    long long collision_count = 0;
    long long busy_count = 0;      ///< slots with S_ct = 1
    long long harvest_count = 0;   ///< sleeping slots with S_ch = 1
    double min_battery = 0.0;
    double max_battery = 0.0;
};

/// Slot-level simulation with a continuous battery gated by B_t >= e_s + e_t.
SimReport simulate(const SimConfig& cfg);

struct SweepRow {
    double eps = 0.0;
    SimReport report;
};

/// One simulation per threshold with seed derive_seed(cfg.seed, index), run on
/// up to `threads` workers (0: hardware concurrency). Rows follow grid order.
std::vector<SweepRow> actual_capacity_sweep(const std::vector<double>& eps_grid,
                                            const SimConfig& cfg, unsigned threads = 0);

/// "# schema=v1" header, then eps,capacity_bps,active_frac,collision_rate,mean_battery_J.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace rfcrn

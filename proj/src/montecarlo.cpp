#include "rfcrn/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace rfcrn {

void SimConfig::validate() const
{
    if (N_t < 1) {
        throw ValidationError("N_t", "must be >= 1");
    }
    if (batches < 2 || batches > N_t) {
        throw ValidationError("batches", "must lie in [2, N_t]");
    }
    if (!(eps >= 0.0)) {
        throw ValidationError("eps", "must be >= 0");
    }
    if (!(burst_corr >= 0.0 && burst_corr < 1.0)) {
        throw ValidationError("burst_corr", "must lie in [0, 1)");
    }
}

namespace {

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : rng_(seed) {}
    double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 rng_;
};

// Busy/idle state of one subchannel.
class Channel {
public:
    Channel(double p_busy, ChannelProcess process, double corr)
        : p_busy_(p_busy), markov_(process == ChannelProcess::markov),
          stay_busy_(p_busy + corr * (1.0 - p_busy)), enter_busy_(p_busy * (1.0 - corr))
    {
    }

    bool next(Uniform& u)
    {
        double p = p_busy_;
        if (markov_ && started_) {
            p = busy_ ? stay_busy_ : enter_busy_;
        }
        started_ = true;
        busy_ = u() < p;
        return busy_;
    }

private:
    double p_busy_;
    bool markov_;
    double stay_busy_;
    double enter_busy_;
    bool started_ = false;
    bool busy_ = false;
};

double batch_se(const std::vector<double>& means)
{
    const double n = static_cast<double>(means.size());
    double mean = 0.0;
    for (double m : means) {
        mean += m;
    }
    mean /= n;
    double ss = 0.0;
    for (double m : means) {
        ss += (m - mean) * (m - mean);
    }
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

SimReport simulate(const SimConfig& cfg)
{
    cfg.validate();
    const Scenario& s = cfg.scenario;
    const SystemParams& p = s.params;
    const double e_s = p.e_s();
    const double e_t = p.e_t();
    const double need = e_s + e_t;
    const double harvest = p.harvest_energy();
    const double b_max = p.B_max();
    const double pf = prob_false_alarm(s.sensing, cfg.eps);
    const double pd = prob_detection(s.sensing, cfg.eps);
    const double slot_rate = p.T_t() / p.T_slot() * p.link_capacity();

    Uniform u(cfg.seed);
    Channel ch_h(s.pair.p_o_h(), cfg.process, cfg.burst_corr);
    Channel ch_t(s.pair.p_o_t(), cfg.process, cfg.burst_corr);

    SimReport r;
    r.slots = cfg.N_t;
    double battery = p.B_0();
    double battery_sum = 0.0;
    r.min_battery = r.max_battery = battery;

    std::vector<double> batch_active, batch_success, batch_collision;
    batch_active.reserve(cfg.batches);
    batch_success.reserve(cfg.batches);
    batch_collision.reserve(cfg.batches);
    long long b_active = 0, b_success = 0, b_collision = 0, b_busy = 0, b_len = 0;
    long long success = 0;
    int batch_index = 0;
    long long batch_end = cfg.N_t / cfg.batches;

    for (long long t = 0; t < cfg.N_t; ++t) {
        battery_sum += battery;
        const bool busy_h = ch_h.next(u);
        const bool busy_t = ch_t.next(u);
        const bool active = battery >= need;

        if (active) {
            ++r.active_count;
            ++b_active;
            const bool sensed_busy = u() < (busy_t ? pd : pf);
            battery -= e_s;
            if (!sensed_busy) {
                battery -= e_t;
                ++r.transmit_count;
                if (busy_t) {
                    ++r.collision_count;
                    ++b_collision;
                } else {
                    ++success;
                    ++b_success;
                }
            }
            if (battery < -1e-12 * need) {
                throw NumericError("battery went negative in an active slot");
            }
            battery = std::max(battery, 0.0);
        } else if (busy_h) {
            ++r.harvest_count;
            battery = std::min(battery + harvest, b_max);
        }
        if (busy_t) {
            ++r.busy_count;
            ++b_busy;
        }
        r.min_battery = std::min(r.min_battery, battery);
        r.max_battery = std::max(r.max_battery, battery);

        ++b_len;
        if (t + 1 == batch_end) {
            batch_active.push_back(static_cast<double>(b_active) / b_len);
            batch_success.push_back(static_cast<double>(b_success) / b_len);
            batch_collision.push_back(b_busy ? static_cast<double>(b_collision) / b_busy : 0.0);
            b_active = b_success = b_collision = b_busy = b_len = 0;
            ++batch_index;
            batch_end = batch_index + 1 == cfg.batches
                            ? cfg.N_t
                            : cfg.N_t * (batch_index + 1) / cfg.batches;
        }
    }

    const double n = static_cast<double>(cfg.N_t);
    r.active_fraction = r.active_count / n;
    r.actual_capacity = slot_rate * success / n;
    r.collision_rate = r.busy_count ? static_cast<double>(r.collision_count) / r.busy_count : 0.0;
    r.mean_battery = battery_sum / n;
    r.se_active = batch_se(batch_active);
    r.se_capacity = slot_rate * batch_se(batch_success);
    r.se_collision = batch_se(batch_collision);
    return r;
}

std::vector<SweepRow> actual_capacity_sweep(const std::vector<double>& eps_grid,
                                            const SimConfig& cfg, unsigned threads)
{
    if (eps_grid.empty()) {
        throw ValidationError("eps_grid", "must not be empty");
    }
    std::vector<SweepRow> rows(eps_grid.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(eps_grid.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < eps_grid.size(); i = next++) {
            try {
                SimConfig point = cfg;
                point.eps = eps_grid[i];
                point.seed = derive_seed(cfg.seed, i);
                rows[i] = {eps_grid[i], simulate(point)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "# schema=v1\n";
    out << "eps,capacity_bps,active_frac,collision_rate,mean_battery_J\n";
    out.precision(10);
    for (const auto& row : rows) {
        out << row.eps << ',' << row.report.actual_capacity << ',' << row.report.active_fraction
            << ',' << row.report.collision_rate << ',' << row.report.mean_battery << '\n';
    }
}

}  // namespace rfcrn

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfcrn/clustering.hpp"
#include "rfcrn/config.hpp"
#include "rfcrn/dutycycle.hpp"
#include "rfcrn/montecarlo.hpp"
#include "rfcrn/optimizer.hpp"
#include "rfcrn/traffic.hpp"
#include "rfcrn/variational.hpp"

namespace rfcrn {

struct ExperimentSpec {
    std::string name;  ///< cluster-bench, threshold-sweep, power-sweep, mdp-check, full-pipeline
    Config config;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;
};

struct ExperimentOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary;  ///< human-readable lines for stdout
};

std::vector<std::string> experiment_names();

/// Dispatches on spec.name; throws ValidationError for an unknown name.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

ExperimentOutput run_cluster_bench(const ExperimentSpec& spec);
ExperimentOutput run_threshold_sweep(const ExperimentSpec& spec);
ExperimentOutput run_power_sweep(const ExperimentSpec& spec);
ExperimentOutput run_mdp_check(const ExperimentSpec& spec);
ExperimentOutput run_full_pipeline(const ExperimentSpec& spec);

// Config readers shared by the runners and tests.

/// p_i_h and p_i_t.
ChannelPair pair_from(const Config& cfg);
/// opt.eps0, opt.eps1, opt.secant_tol, opt.step_beta, opt.grad_tol, opt.fd_h, opt.max_iter.
OptimizerConfig optimizer_config_from(const Config& cfg);
/// cluster.kappa0, cluster.nu0, cluster.lambda_scale.
NiwPrior prior_from(const Config& cfg, int dim);
/// cluster.alpha, cluster.vb_truncation, cluster.vb_init, cluster.vb_max_iter, cluster.vb_tol.
VbOptions vb_options_from(const Config& cfg, std::uint64_t seed);
/// sim.slots, sim.batches, sim.process (iid | markov), sim.burst_corr.
SimConfig sim_config_from(const Config& cfg, const Scenario& s, std::uint64_t seed);

/// Runs one clustering method on standardised features. Methods: gibbs, vb,
/// kmeans (K = `k_true`), oracle (returns `truth`).
std::vector<int> cluster_labels(const std::string& method, const Eigen::MatrixXd& x,
                                const std::vector<int>& truth, int k_true, const Config& cfg,
                                std::uint64_t seed);

/// Synthetic subchannels for the end-to-end flow.
struct PipelineData {
    std::vector<TrafficProfile> profiles;
    std::vector<int> subchannel_profile;     ///< true profile index per subchannel
    std::vector<ChannelStats> subchannel_stats;
    Eigen::MatrixXd features;                ///< standardised rows
    std::vector<int> point_subchannel;
    std::vector<int> point_truth;
};

PipelineData build_pipeline_data(const Config& cfg, std::uint64_t seed);

struct PipelineOutcome {
    double accuracy = 0.0;
    int k_plus = 0;
    ChannelSelection selection;
    double p_i_h_model = 0.0;  ///< class-pooled estimates used for the optimisation
    double p_i_t_model = 0.0;
    double p_i_h_true = 0.0;   ///< the selected subchannels' own estimates
    double p_i_t_true = 0.0;
    OptimizeResult opt;      ///< duty-cycle model
    OptimizeResult opt_mdp;  ///< quantised-battery model with n_tau levels per active slot
    double mc_capacity = 0.0;
    double mc_capacity_se = 0.0;
    double mc_capacity_mdp = 0.0;  ///< simulated at opt_mdp.eps_star, same seed
};

/// Per-subchannel majority label, class-pooled lambda/p_i, channel selection,
/// optimisation under both capacity models on the pooled statistics, then
/// simulation on the selected subchannels' own statistics.
PipelineOutcome evaluate_labels(const PipelineData& data, const std::vector<int>& point_labels,
                                const Config& cfg, std::uint64_t seed);

}  // namespace rfcrn

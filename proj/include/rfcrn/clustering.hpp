#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rfcrn/core.hpp"
#include "rfcrn/niw.hpp"

namespace rfcrn {

/// pi_k = v_k prod_{j<k} (1 - v_j). Throws std::domain_error unless every v_k is in (0, 1).
std::vector<double> stick_breaking_weights(const std::vector<double>& v);

/// Prior probability that point n joins each occupied cluster (m_k / (n - 1 + alpha))
/// or opens a new one (last entry, alpha / (n - 1 + alpha)). `counts` must sum to n - 1.
std::vector<double> crp_conditional(const std::vector<int>& counts, double alpha, int n);

/// Per-column centring and scaling; zero-variance columns are only centred.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x);

struct ClusterSummary {
    int size = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd scatter;   ///< sum over members of (x - mean)(x - mean)^T
    std::vector<int> members;  ///< subchannel ids, sorted and unique
};

/// Hard clustering with labels 0..k_plus-1.
struct ClusterModel {
    std::vector<int> z;
    int k_plus = 0;
    std::vector<ClusterSummary> clusters;
    double wcss = 0.0;  ///< within-cluster sum of squares in the fitted space

    /// Relabels `labels` to 0..K-1 in order of first appearance and computes
    /// summaries from `x`. `subchannel_ids`, when non-empty, fills members.
    static ClusterModel from_labels(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                    const std::vector<int>& subchannel_ids = {});
};

/// Starting partition of the sampler. `singletons` puts every point in its own
/// cluster; `sequential_crp` visits points in shuffled order and draws each from
/// its collapsed conditional given the points already placed; `random_partition`
/// deals the shuffled points round-robin into `init_clusters` clusters.
enum class GibbsInit { singletons, sequential_crp, random_partition };

/// Collapsed Gibbs sampler over CRP assignments with NIW-conjugate clusters.
class GibbsSampler {
public:
    GibbsSampler(Eigen::MatrixXd x, NiwPrior prior, double alpha, std::uint64_t seed,
                 GibbsInit init = GibbsInit::singletons, int init_clusters = 0);

    /// One pass over all points in random order; records K+ afterwards.
    void sweep();

    int k_plus() const noexcept { return static_cast<int>(clusters_.size()); }
    const std::vector<int>& assignments() const noexcept { return z_; }
    const std::vector<int>& k_trace() const noexcept { return k_trace_; }
    const ClusterStats& cluster_stats(int k) const { return clusters_.at(k).stats; }
    int sweeps_done() const noexcept { return sweeps_; }

    /// Largest deviation between cached statistics and a recomputation from the
    /// assignments (counts, sums, outer products). Infinite if a tracked cluster is empty.
    double consistency_error() const;

private:
    struct Cluster {
        ClusterStats stats;
        StudentT pred;
    };

    void place(int n, int sweep);
    void refresh(int k);
    void remove_point(int n);

    Eigen::MatrixXd x_;
    NiwPrior prior_;
    double alpha_;
    std::mt19937_64 rng_;
    StudentT prior_pred_;
    std::vector<int> z_;
    std::vector<Cluster> clusters_;
    std::vector<int> k_trace_;
    int sweeps_ = 0;
};

struct GibbsResult {
    ClusterModel model;
    std::vector<int> k_trace;
};

/// Runs `sweeps` sweeps and reports the final-sweep assignment.
GibbsResult gibbs_fit(const Eigen::MatrixXd& x, const NiwPrior& prior, double alpha, int sweeps,
                      std::uint64_t seed, GibbsInit init = GibbsInit::singletons,
                      int init_clusters = 0);

/// k-means++ seeding: K rows of x.
Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng);

/// Lloyd iterations from k-means++ seeds; best WCSS over `restarts`.
ClusterModel kmeans_fit(const Eigen::MatrixXd& x, int k, int restarts, std::uint64_t seed);

/// Fraction of points matched under the best one-to-one label matching.
double clustering_accuracy(const std::vector<int>& z_hat, const std::vector<int>& z_true);

struct SubchannelProfile {
    int id = 0;
    double lambda = 0.0;  ///< packets/s
    double p_i = 1.0;
    double p_o = 0.0;
    int label = 0;
};

struct ChannelSelection {
    int c_h = 0;  ///< harvest subchannel id (largest lambda)
    int c_t = 0;  ///< transmit subchannel id (smallest lambda)
};

/// Ties go to the lowest id; if every lambda is equal both are drawn at random
/// (distinct when more than one profile) from `seed`.
ChannelSelection select_channels(const std::vector<SubchannelProfile>& profiles,
                                 std::uint64_t seed = 0);

}  // namespace rfcrn

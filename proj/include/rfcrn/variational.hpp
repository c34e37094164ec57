#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rfcrn/clustering.hpp"
#include "rfcrn/niw.hpp"

namespace rfcrn {

struct VbOptions {
    double alpha = 1.0;
    int truncation = 20;      ///< K_T
    int init_clusters = 0;    ///< k-means++ seeds for the initial hard responsibilities; 0 = K_T
    int restarts = 1;         ///< independent initialisations; the highest final ELBO wins
    int max_iter = 1000;
    double tol = 1e-8;        ///< stop when |delta ELBO| < tol * (1 + |ELBO|)
    double prune = 0.5;       ///< components with less total responsibility are dropped
    std::uint64_t seed = 1;

    void validate() const;
};

/// Mean-field posterior over the truncated stick-breaking mixture.
struct VbState {
    int truncation = 0;
    Eigen::MatrixXd zeta;  ///< (K_T - 1) x 2 Beta parameters of the sticks
    // Gaussian-Wishart factor per component.
    Eigen::VectorXd beta;
    Eigen::VectorXd nu;
    std::vector<Eigen::VectorXd> m;
    std::vector<Eigen::MatrixXd> W;
    Eigen::MatrixXd resp;  ///< N x K_T responsibilities
    Eigen::VectorXd weight;  ///< column sums of resp
    std::vector<double> elbo_trace;
    int iterations = 0;
    bool converged = false;
};

struct VbResult {
    ClusterModel model;
    VbState state;
};

/// Coordinate ascent on the evidence lower bound, restarted `restarts` times
/// (seed, then derive_seed(seed, r)). Throws NumericError if the bound
/// decreases by more than 1e-6 between iterations of any run.
VbResult vb_fit(const Eigen::MatrixXd& x, const NiwPrior& prior, const VbOptions& options = {});

}  // namespace rfcrn

#pragma once

#include <Eigen/Dense>

#include "rfcrn/core.hpp"

namespace rfcrn {

/// Normal-inverse-Wishart prior on a Gaussian cluster's (mean, covariance).
struct NiwPrior {
    Eigen::VectorXd mu0;
    double kappa0 = 0.01;
    double nu0 = 5.0;
    Eigen::MatrixXd Lambda0;

    /// mu0 = 0, Lambda0 = lambda_scale * I.
    static NiwPrior standard(int dim, double kappa0 = 0.01, double nu0 = 5.0,
                             double lambda_scale = 1.0);

    int dim() const noexcept { return static_cast<int>(mu0.size()); }
    /// Throws ValidationError unless kappa0 > 0, nu0 > dim - 1 and Lambda0 is symmetric PD.
    void validate() const;
};

/// Sufficient statistics of the points assigned to one cluster.
struct ClusterStats {
    int count = 0;
    Eigen::VectorXd sum;
    Eigen::MatrixXd outer;  ///< sum of x x^T

    static ClusterStats empty(int dim);
    void add(const Eigen::VectorXd& x);
    void remove(const Eigen::VectorXd& x);
};

struct NiwPosterior {
    Eigen::VectorXd mu;
    double kappa = 0.0;
    double nu = 0.0;
    Eigen::MatrixXd Lambda;
};

NiwPosterior niw_update(const NiwPrior& prior, const ClusterStats& stats);

/// Multivariate Student-t with a cached Cholesky factor of its scale.
class StudentT {
public:
    /// Throws NumericError when `scale` is not positive definite.
    StudentT(Eigen::VectorXd location, const Eigen::MatrixXd& scale, double dof);

    double log_density(const Eigen::VectorXd& x) const;
    double density(const Eigen::VectorXd& x) const;
    const Eigen::VectorXd& location() const noexcept { return loc_; }
    double dof() const noexcept { return dof_; }

private:
    Eigen::VectorXd loc_;
    Eigen::MatrixXd chol_;  ///< lower factor L with L L^T = scale
    double dof_;
    double log_norm_;
};

/// Predictive of a new point given a cluster: dof nu_n - d + 1, location mu_n,
/// scale Lambda_n (kappa_n + 1) / (kappa_n (nu_n - d + 1)). `cluster_id` is only
/// used in the NumericError message.
StudentT predictive(const NiwPrior& prior, const ClusterStats& stats, int cluster_id = -1);

double posterior_predictive(const Eigen::VectorXd& x, const ClusterStats& stats,
                            const NiwPrior& prior);

}  // namespace rfcrn

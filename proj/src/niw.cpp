#include "rfcrn/niw.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rfcrn {

NiwPrior NiwPrior::standard(int dim, double kappa0, double nu0, double lambda_scale)
{
    NiwPrior p;
    p.mu0 = Eigen::VectorXd::Zero(dim);
    p.kappa0 = kappa0;
    p.nu0 = nu0;
    p.Lambda0 = lambda_scale * Eigen::MatrixXd::Identity(dim, dim);
    p.validate();
    return p;
}

void NiwPrior::validate() const
{
    const int d = dim();
    if (d < 1) {
        throw ValidationError("mu0", "dimension must be >= 1");
    }
    if (!(kappa0 > 0.0)) {
        throw ValidationError("kappa0", "must be > 0");
    }
    if (!(nu0 > d - 1)) {
        throw ValidationError("nu0", "must exceed dim - 1");
    }
    if (Lambda0.rows() != d || Lambda0.cols() != d) {
        throw ValidationError("Lambda0", "shape does not match mu0");
    }
    if (!Lambda0.isApprox(Lambda0.transpose(), 1e-12)) {
        throw ValidationError("Lambda0", "must be symmetric");
    }
    if (Eigen::LLT<Eigen::MatrixXd>(Lambda0).info() != Eigen::Success) {
        throw ValidationError("Lambda0", "must be positive definite");
    }
}

ClusterStats ClusterStats::empty(int dim)
{
    return {0, Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
}

void ClusterStats::add(const Eigen::VectorXd& x)
{
    ++count;
    sum += x;
    outer.noalias() += x * x.transpose();
}

void ClusterStats::remove(const Eigen::VectorXd& x)
{
    --count;
    sum -= x;
    outer.noalias() -= x * x.transpose();
}

NiwPosterior niw_update(const NiwPrior& prior, const ClusterStats& stats)
{
    NiwPosterior post;
    post.kappa = prior.kappa0 + stats.count;
    post.nu = prior.nu0 + stats.count;
    post.mu = (prior.kappa0 * prior.mu0 + stats.sum) / post.kappa;
    post.Lambda = prior.Lambda0 + stats.outer + prior.kappa0 * prior.mu0 * prior.mu0.transpose() -
                  post.kappa * post.mu * post.mu.transpose();
    post.Lambda = 0.5 * (post.Lambda + post.Lambda.transpose());
    return post;
}

StudentT::StudentT(Eigen::VectorXd location, const Eigen::MatrixXd& scale, double dof)
    : loc_(std::move(location)), dof_(dof)
{
    Eigen::LLT<Eigen::MatrixXd> llt(scale);
    if (llt.info() != Eigen::Success || !(dof > 0.0)) {
        throw NumericError("Student-t scale is not positive definite");
    }
    chol_ = llt.matrixL();
    const double d = static_cast<double>(loc_.size());
    log_norm_ = std::lgamma(0.5 * (dof + d)) - std::lgamma(0.5 * dof) -
                0.5 * d * std::log(dof * std::numbers::pi) -
                chol_.diagonal().array().log().sum();
}

double StudentT::log_density(const Eigen::VectorXd& x) const
{
    const Eigen::VectorXd y = chol_.triangularView<Eigen::Lower>().solve(x - loc_);
    const double d = static_cast<double>(loc_.size());
    return log_norm_ - 0.5 * (dof_ + d) * std::log1p(y.squaredNorm() / dof_);
}

double StudentT::density(const Eigen::VectorXd& x) const
{
    return std::exp(log_density(x));
}

StudentT predictive(const NiwPrior& prior, const ClusterStats& stats, int cluster_id)
{
    const NiwPosterior post = niw_update(prior, stats);
    const double d = prior.dim();
    const double dof = post.nu - d + 1.0;
    const Eigen::MatrixXd scale = post.Lambda * ((post.kappa + 1.0) / (post.kappa * dof));
    try {
        return StudentT(post.mu, scale, dof);
    } catch (const NumericError&) {
        throw NumericError("predictive scale of cluster " + std::to_string(cluster_id) +
                           " is not positive definite");
    }
}

double posterior_predictive(const Eigen::VectorXd& x, const ClusterStats& stats,
                            const NiwPrior& prior)
{
    return predictive(prior, stats).density(x);
}

}  // namespace rfcrn

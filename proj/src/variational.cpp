#include "rfcrn/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>

namespace rfcrn {

void VbOptions::validate() const
{
    if (!(alpha > 0.0)) {
        throw ValidationError("alpha", "must be > 0");
    }
    if (truncation < 1) {
        throw ValidationError("truncation", "must be >= 1");
    }
    if (init_clusters < 0) {
        throw ValidationError("init_clusters", "must be >= 0");
    }
    if (restarts < 1) {
        throw ValidationError("restarts", "must be >= 1");
    }
    if (max_iter < 1) {
        throw ValidationError("max_iter", "must be >= 1");
    }
    if (!(tol > 0.0)) {
        throw ValidationError("tol", "must be > 0");
    }
    if (!(prune >= 0.0)) {
        throw ValidationError("prune", "must be >= 0");
    }
}

namespace {

using boost::math::digamma;
constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

// ln B(W, nu): log normaliser of the Wishart density, from ln|W|.
double log_wishart_b(double logdet_w, double nu, int d)
{
    double lg = 0.0;
    for (int i = 1; i <= d; ++i) {
        lg += std::lgamma(0.5 * (nu + 1 - i));
    }
    return -0.5 * nu * logdet_w -
           (0.5 * nu * d * std::numbers::ln2 + 0.25 * d * (d - 1) * std::log(std::numbers::pi) + lg);
}

double expected_logdet(double logdet_w, double nu, int d)
{
    double s = d * std::numbers::ln2 + logdet_w;
    for (int i = 1; i <= d; ++i) {
        s += digamma(0.5 * (nu + 1 - i));
    }
    return s;
}

class Vb {
public:
    Vb(const Eigen::MatrixXd& x, const NiwPrior& prior, const VbOptions& opt)
        : x_(x), prior_(prior), opt_(opt), n_(x.rows()), d_(static_cast<int>(x.cols())),
          k_(opt.truncation)
    {
        Eigen::LLT<Eigen::MatrixXd> llt(prior.Lambda0);
        w0_ = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
        logdet_w0_ = -2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
        s_.truncation = k_;
        s_.beta.resize(k_);
        s_.nu.resize(k_);
        s_.m.assign(k_, Eigen::VectorXd::Zero(d_));
        s_.W.assign(k_, Eigen::MatrixXd::Identity(d_, d_));
        s_.zeta.resize(std::max(k_ - 1, 0), 2);
        logdet_w_.resize(k_);
        elnlam_.resize(k_);
        elnpi_.resize(k_);
        quad_.resize(n_, k_);
    }

    void init_responsibilities()
    {
        std::mt19937_64 rng(opt_.seed);
        const int k0 = static_cast<int>(
            std::min<Eigen::Index>(opt_.init_clusters > 0 ? std::min(opt_.init_clusters, k_) : k_, n_));
        const Eigen::MatrixXd centres = kmeanspp_seed(x_, k0, rng);
        s_.resp = Eigen::MatrixXd::Zero(n_, k_);
        for (Eigen::Index i = 0; i < n_; ++i) {
            Eigen::Index arg = 0;
            (centres.rowwise() - x_.row(i)).rowwise().squaredNorm().minCoeff(&arg);
            s_.resp(i, arg) = 1.0;
        }
    }

    void m_step()
    {
        const Eigen::VectorXd& m0 = prior_.mu0;
        const double b0 = prior_.kappa0;
        s_.weight = s_.resp.colwise().sum().transpose();
        for (int k = 0; k < k_; ++k) {
            const Eigen::VectorXd r = s_.resp.col(k);
            const double nk = s_.weight(k);
            const Eigen::VectorXd sx = x_.transpose() * r;
            const Eigen::MatrixXd sxx = x_.transpose() * r.asDiagonal() * x_;
            s_.beta(k) = b0 + nk;
            s_.nu(k) = prior_.nu0 + nk;
            s_.m[k] = (b0 * m0 + sx) / s_.beta(k);
            Eigen::MatrixXd w_inv = prior_.Lambda0 + sxx + b0 * m0 * m0.transpose() -
                                    s_.beta(k) * s_.m[k] * s_.m[k].transpose();
            w_inv = 0.5 * (w_inv + w_inv.transpose());
            Eigen::LLT<Eigen::MatrixXd> llt(w_inv);
            if (llt.info() != Eigen::Success) {
                throw NumericError("VB: Wishart scale of component " + std::to_string(k) +
                                   " is not positive definite");
            }
            s_.W[k] = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
            logdet_w_(k) = -2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
            elnlam_(k) = expected_logdet(logdet_w_(k), s_.nu(k), d_);
        }
        // Sticks: v_k ~ Beta(1 + N_k, alpha + sum_{j>k} N_j); v_{K_T} = 1.
        double tail = s_.weight.sum();
        double acc = 0.0;
        for (int k = 0; k < k_; ++k) {
            tail -= s_.weight(k);
            if (k == k_ - 1) {
                elnpi_(k) = acc;
                break;
            }
            const double g1 = 1.0 + s_.weight(k);
            const double g2 = opt_.alpha + std::max(tail, 0.0);
            s_.zeta(k, 0) = g1;
            s_.zeta(k, 1) = g2;
            const double dsum = digamma(g1 + g2);
            elnpi_(k) = acc + digamma(g1) - dsum;
            acc += digamma(g2) - dsum;
        }
    }

    void e_step()
    {
        for (int k = 0; k < k_; ++k) {
            const Eigen::MatrixXd diff = x_.rowwise() - s_.m[k].transpose();
            quad_.col(k) = ((diff * s_.W[k]).array() * diff.array()).rowwise().sum();
        }
        Eigen::RowVectorXd offset(k_);
        for (int k = 0; k < k_; ++k) {
            offset(k) = elnpi_(k) + 0.5 * elnlam_(k) - 0.5 * d_ / s_.beta(k) - 0.5 * d_ * kLog2Pi;
        }
        Eigen::MatrixXd& r = s_.resp;
        r = (quad_.array().rowwise() * (-0.5 * s_.nu.transpose().array())).matrix();
        r.rowwise() += offset;
        const Eigen::VectorXd top = r.rowwise().maxCoeff();
        r = (r.colwise() - top).array().exp().matrix();
        const Eigen::VectorXd total = r.rowwise().sum();
        r = r.array().colwise() / total.array();
    }

    double elbo() const
    {
        const double b0 = prior_.kappa0;
        const double nu0 = prior_.nu0;
        const int d = d_;
        const Eigen::VectorXd nk = s_.resp.colwise().sum().transpose();
        double lik = 0.0, pz = 0.0, pv = 0.0, pmu = 0.0, qz = 0.0, qv = 0.0, qmu = 0.0;
        for (int k = 0; k < k_; ++k) {
            const double wq = s_.resp.col(k).dot(quad_.col(k));
            lik += 0.5 * (nk(k) * (elnlam_(k) - d / s_.beta(k) - d * kLog2Pi) - s_.nu(k) * wq);
            pz += nk(k) * elnpi_(k);

            const Eigen::VectorXd dm = s_.m[k] - prior_.mu0;
            pmu += 0.5 * (d * std::log(b0 / (2.0 * std::numbers::pi)) + elnlam_(k) -
                          d * b0 / s_.beta(k) - b0 * s_.nu(k) * dm.dot(s_.W[k] * dm));
            pmu += 0.5 * (nu0 - d - 1) * elnlam_(k) -
                   0.5 * s_.nu(k) * (prior_.Lambda0 * s_.W[k]).trace();
            pmu += log_wishart_b(logdet_w0_, nu0, d);

            const double entropy_w = -log_wishart_b(logdet_w_(k), s_.nu(k), d) -
                                     0.5 * (s_.nu(k) - d - 1) * elnlam_(k) + 0.5 * s_.nu(k) * d;
            qmu += 0.5 * elnlam_(k) + 0.5 * d * std::log(s_.beta(k) / (2.0 * std::numbers::pi)) -
                   0.5 * d - entropy_w;
        }
        qz = (s_.resp.array() > 0.0)
                 .select(s_.resp.array() * s_.resp.array().max(1e-300).log(), 0.0)
                 .sum();
        for (int k = 0; k + 1 < k_; ++k) {
            const double g1 = s_.zeta(k, 0);
            const double g2 = s_.zeta(k, 1);
            const double dsum = digamma(g1 + g2);
            const double elv = digamma(g1) - dsum;
            const double el1v = digamma(g2) - dsum;
            pv += std::log(opt_.alpha) + (opt_.alpha - 1.0) * el1v;
            qv += std::lgamma(g1 + g2) - std::lgamma(g1) - std::lgamma(g2) + (g1 - 1.0) * elv +
                  (g2 - 1.0) * el1v;
        }
        return lik + pz + pv + pmu - qz - qv - qmu;
    }

    VbState& state() { return s_; }

private:
    const Eigen::MatrixXd& x_;
    const NiwPrior& prior_;
    const VbOptions& opt_;
    Eigen::Index n_;
    int d_;
    int k_;
    Eigen::MatrixXd w0_;
    double logdet_w0_ = 0.0;
    VbState s_;
    Eigen::VectorXd logdet_w_;
    Eigen::VectorXd elnlam_;
    Eigen::VectorXd elnpi_;
    Eigen::MatrixXd quad_;
};

VbState run_once(const Eigen::MatrixXd& x, const NiwPrior& prior, const VbOptions& options)
{
    Vb vb(x, prior, options);
    vb.init_responsibilities();
    VbState& s = vb.state();
    for (int it = 1; it <= options.max_iter; ++it) {
        vb.m_step();
        vb.e_step();
        const double value = vb.elbo();
        if (!std::isfinite(value)) {
            throw NumericError("VB: non-finite ELBO at iteration " + std::to_string(it));
        }
        s.iterations = it;
        if (!s.elbo_trace.empty()) {
            const double prev = s.elbo_trace.back();
            if (value < prev - 1e-6) {
                std::ostringstream msg;
                msg.precision(12);
                msg << "VB: ELBO decreased from " << prev << " to " << value << " at iteration "
                    << it;
                throw NumericError(msg.str());
            }
            s.elbo_trace.push_back(value);
            if (std::abs(value - prev) < options.tol * (1.0 + std::abs(value))) {
                s.converged = true;
                break;
            }
        } else {
            s.elbo_trace.push_back(value);
        }
    }
    return std::move(s);
}

}  // namespace

VbResult vb_fit(const Eigen::MatrixXd& x, const NiwPrior& prior, const VbOptions& options)
{
    options.validate();
    prior.validate();
    if (x.rows() < 1) {
        throw ValidationError("X", "need at least one point");
    }
    if (x.cols() != prior.dim()) {
        throw ValidationError("X", "column count does not match the prior dimension");
    }

    VbState s;
    for (int r = 0; r < options.restarts; ++r) {
        VbOptions o = options;
        o.seed = r == 0 ? options.seed : derive_seed(options.seed, static_cast<std::uint64_t>(r));
        VbState cand = run_once(x, prior, o);
        if (r == 0 || cand.elbo_trace.back() > s.elbo_trace.back()) {
            s = std::move(cand);
        }
    }
    s.weight = s.resp.colwise().sum().transpose();

    std::vector<int> keep;
    for (int k = 0; k < s.truncation; ++k) {
        if (s.weight(k) >= options.prune) {
            keep.push_back(k);
        }
    }
    if (keep.empty()) {
        Eigen::Index arg = 0;
        s.weight.maxCoeff(&arg);
        keep.push_back(static_cast<int>(arg));
    }
    std::vector<int> labels(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int best = keep.front();
        for (int k : keep) {
            if (s.resp(i, k) > s.resp(i, best)) {
                best = k;
            }
        }
        labels[i] = best;
    }
    return {ClusterModel::from_labels(x, labels), std::move(s)};
}

}  // namespace rfcrn

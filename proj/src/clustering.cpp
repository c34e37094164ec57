#include "rfcrn/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace rfcrn {

std::vector<double> stick_breaking_weights(const std::vector<double>& v)
{
    std::vector<double> w;
    w.reserve(v.size());
    double rest = 1.0;
    for (double vk : v) {
        if (!(vk > 0.0 && vk < 1.0)) {
            throw std::domain_error("stick-breaking proportions must lie in (0, 1)");
        }
        w.push_back(vk * rest);
        rest *= 1.0 - vk;
    }
    return w;
}

std::vector<double> crp_conditional(const std::vector<int>& counts, double alpha, int n)
{
    if (n < 1) {
        throw ValidationError("n", "must be >= 1");
    }
    if (!(alpha >= 0.0)) {
        throw ValidationError("alpha", "must be >= 0");
    }
    long long total = 0;
    for (int m : counts) {
        if (m < 0) {
            throw ValidationError("counts", "must be non-negative");
        }
        total += m;
    }
    if (total != n - 1) {
        throw ValidationError("counts", "must sum to n - 1");
    }
    const double denom = (n - 1) + alpha;
    std::vector<double> p(counts.size() + 1, 0.0);
    if (!(denom > 0.0)) {
        p.back() = 1.0;  // n = 1 and alpha = 0: nothing else is possible
        return p;
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        p[k] = counts[k] / denom;
    }
    p.back() = alpha / denom;
    return p;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x)
{
    if (x.rows() == 0) {
        throw ValidationError("X", "cannot standardise an empty matrix");
    }
    Standardizer s;
    s.mean = x.colwise().mean();
    const Eigen::MatrixXd centred = x.rowwise() - s.mean;
    s.scale = (centred.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (!(s.scale(j) > 1e-12 * (1.0 + std::abs(s.mean(j))))) {
            s.scale(j) = 1.0;
        }
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const
{
    return (x.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x)
{
    return Standardizer::fit(x).apply(x);
}

ClusterModel ClusterModel::from_labels(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                                       const std::vector<int>& subchannel_ids)
{
    if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
        throw ValidationError("labels", "length must match the number of rows");
    }
    if (!subchannel_ids.empty() && subchannel_ids.size() != labels.size()) {
        throw ValidationError("subchannel_ids", "length must match the number of rows");
    }
    ClusterModel m;
    std::map<int, int> relabel;
    m.z.reserve(labels.size());
    for (int l : labels) {
        const auto [it, fresh] = relabel.emplace(l, static_cast<int>(relabel.size()));
        m.z.push_back(it->second);
    }
    m.k_plus = static_cast<int>(relabel.size());
    const auto d = x.cols();
    m.clusters.assign(m.k_plus, ClusterSummary{0, Eigen::VectorXd::Zero(d),
                                               Eigen::MatrixXd::Zero(d, d), {}});
    for (std::size_t i = 0; i < m.z.size(); ++i) {
        auto& c = m.clusters[m.z[i]];
        ++c.size;
        c.mean += x.row(static_cast<Eigen::Index>(i)).transpose();
        if (!subchannel_ids.empty()) {
            c.members.push_back(subchannel_ids[i]);
        }
    }
    for (auto& c : m.clusters) {
        c.mean /= c.size;
        std::sort(c.members.begin(), c.members.end());
        c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
    }
    for (std::size_t i = 0; i < m.z.size(); ++i) {
        auto& c = m.clusters[m.z[i]];
        const Eigen::VectorXd r = x.row(static_cast<Eigen::Index>(i)).transpose() - c.mean;
        c.scatter.noalias() += r * r.transpose();
        m.wcss += r.squaredNorm();
    }
    return m;
}

namespace {

NiwPrior checked(NiwPrior p)
{
    p.validate();
    return p;
}

int sample_log_weights(const std::vector<double>& logw, std::mt19937_64& rng)
{
    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<double> w(logw.size());
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::exp(logw[k] - top);
        total += w[k];
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (u < w[k]) {
            return static_cast<int>(k);
        }
        u -= w[k];
    }
    return static_cast<int>(w.size()) - 1;
}

}  // namespace

GibbsSampler::GibbsSampler(Eigen::MatrixXd x, NiwPrior prior, double alpha, std::uint64_t seed,
                           GibbsInit init, int init_clusters)
    : x_(std::move(x)), prior_(checked(std::move(prior))), alpha_(alpha), rng_(seed),
      prior_pred_(predictive(prior_, ClusterStats::empty(prior_.dim())))
{
    if (x_.rows() < 1) {
        throw ValidationError("X", "need at least one point");
    }
    if (x_.cols() != prior_.dim()) {
        throw ValidationError("X", "column count does not match the prior dimension");
    }
    if (!(alpha > 0.0)) {
        throw ValidationError("alpha", "must be > 0");
    }
    z_.assign(static_cast<std::size_t>(x_.rows()), -1);
    std::vector<int> order(z_.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    if (init == GibbsInit::sequential_crp) {
        for (int n : order) {
            place(n, 0);
        }
        return;
    }
    if (init == GibbsInit::random_partition) {
        const int k0 = static_cast<int>(std::min<Eigen::Index>(init_clusters, x_.rows()));
        if (k0 < 1) {
            throw ValidationError("init_clusters", "must be >= 1 for a random partition");
        }
        std::vector<ClusterStats> stats(k0, ClusterStats::empty(prior_.dim()));
        for (std::size_t i = 0; i < order.size(); ++i) {
            // Shuffled order, dealt round-robin: every start cluster is non-empty.
            const int k = static_cast<int>(i % static_cast<std::size_t>(k0));
            z_[order[i]] = k;
            stats[k].add(x_.row(order[i]).transpose());
        }
        for (int k = 0; k < k0; ++k) {
            clusters_.push_back({stats[k], predictive(prior_, stats[k], k)});
        }
        return;
    }
    for (int n : order) {
        z_[n] = k_plus();
        ClusterStats st = ClusterStats::empty(prior_.dim());
        st.add(x_.row(n).transpose());
        clusters_.push_back({st, predictive(prior_, st, z_[n])});
    }
}

void GibbsSampler::refresh(int k)
{
    clusters_[k].pred = predictive(prior_, clusters_[k].stats, k);
}

void GibbsSampler::remove_point(int n)
{
    const int k = z_[n];
    Cluster& c = clusters_[k];
    c.stats.remove(x_.row(n).transpose());
    z_[n] = -1;
    if (c.stats.count > 0) {
        refresh(k);
        return;
    }
    const int last = static_cast<int>(clusters_.size()) - 1;
    if (k != last) {
        clusters_[k] = std::move(clusters_[last]);
        for (int& zi : z_) {
            if (zi == last) {
                zi = k;
            }
        }
    }
    clusters_.pop_back();
}

void GibbsSampler::place(int n, int sweep)
{
    const Eigen::VectorXd xn = x_.row(n).transpose();
    const int k_now = k_plus();
    std::vector<double> logw(static_cast<std::size_t>(k_now) + 1);
    for (int k = 0; k < k_now; ++k) {
        logw[k] = std::log(static_cast<double>(clusters_[k].stats.count)) +
                  clusters_[k].pred.log_density(xn);
    }
    logw[k_now] = std::log(alpha_) + prior_pred_.log_density(xn);
    for (double v : logw) {
        if (std::isnan(v)) {
            throw NumericError("Gibbs: NaN predictive at sweep " + std::to_string(sweep) +
                               ", point " + std::to_string(n));
        }
    }
    const int k = sample_log_weights(logw, rng_);
    try {
        if (k == k_now) {
            ClusterStats st = ClusterStats::empty(prior_.dim());
            st.add(xn);
            clusters_.push_back({st, predictive(prior_, st, k)});
        } else {
            clusters_[k].stats.add(xn);
            refresh(k);
        }
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (sweep " + std::to_string(sweep) +
                           ", point " + std::to_string(n) + ")");
    }
    z_[n] = k;
}

void GibbsSampler::sweep()
{
    ++sweeps_;
    std::vector<int> order(z_.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    for (int n : order) {
        remove_point(n);
        place(n, sweeps_);
    }
    k_trace_.push_back(k_plus());
}

double GibbsSampler::consistency_error() const
{
    const int d = prior_.dim();
    std::vector<ClusterStats> fresh(clusters_.size(), ClusterStats::empty(d));
    for (std::size_t i = 0; i < z_.size(); ++i) {
        if (z_[i] < 0 || z_[i] >= k_plus()) {
            return std::numeric_limits<double>::infinity();
        }
        fresh[z_[i]].add(x_.row(static_cast<Eigen::Index>(i)).transpose());
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
        const ClusterStats& c = clusters_[k].stats;
        if (c.count < 1) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, static_cast<double>(std::abs(c.count - fresh[k].count)));
        worst = std::max(worst, (c.sum - fresh[k].sum).cwiseAbs().maxCoeff());
        worst = std::max(worst, (c.outer - fresh[k].outer).cwiseAbs().maxCoeff());
    }
    return worst;
}

GibbsResult gibbs_fit(const Eigen::MatrixXd& x, const NiwPrior& prior, double alpha, int sweeps,
                      std::uint64_t seed, GibbsInit init, int init_clusters)
{
    if (sweeps < 1) {
        throw ValidationError("sweeps", "must be >= 1");
    }
    GibbsSampler sampler(x, prior, alpha, seed, init, init_clusters);
    for (int s = 0; s < sweeps; ++s) {
        sampler.sweep();
    }
    return {ClusterModel::from_labels(x, sampler.assignments()), sampler.k_trace()};
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng)
{
    const auto n = x.rows();
    if (k < 1 || k > n) {
        throw ValidationError("K", "must lie in [1, N]");
    }
    Eigen::MatrixXd centres(k, x.cols());
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    auto first = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    centres.row(0) = x.row(first);
    taken[first] = true;
    Eigen::VectorXd d2 = (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        Eigen::Index pick = -1;
        const double total = d2.sum();
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (u < d2(i)) {
                    pick = i;
                    break;
                }
                u -= d2(i);
            }
            if (pick < 0) {
                pick = n - 1;
                while (d2(pick) == 0.0) {
                    --pick;
                }
            }
        } else {
            // Every remaining point coincides with a centre: take an unused row.
            std::vector<Eigen::Index> free;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!taken[i]) {
                    free.push_back(i);
                }
            }
            pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
        }
        taken[pick] = true;
        centres.row(c) = x.row(pick);
        d2 = d2.cwiseMin((x.rowwise() - centres.row(c)).rowwise().squaredNorm());
    }
    return centres;
}

ClusterModel kmeans_fit(const Eigen::MatrixXd& x, int k, int restarts, std::uint64_t seed)
{
    const auto n = x.rows();
    if (k < 1) {
        throw ValidationError("K", "must be >= 1");
    }
    if (k > n) {
        throw ValidationError("K", "exceeds the number of points");
    }
    if (restarts < 1) {
        throw ValidationError("restarts", "must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<int> best_z;
    double best_wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Eigen::MatrixXd centres = kmeanspp_seed(x, k, rng);
        std::vector<int> z(static_cast<std::size_t>(n), -1);
        double wcss = 0.0;
        for (int iter = 0; iter < 300; ++iter) {
            bool changed = false;
            wcss = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::Index arg = 0;
                const double d = (centres.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&arg);
                wcss += d;
                if (z[i] != static_cast<int>(arg)) {
                    z[i] = static_cast<int>(arg);
                    changed = true;
                }
            }
            if (!changed) {
                break;
            }
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(z[i]) += x.row(i);
                ++counts[z[i]];
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    centres.row(c) = sums.row(c) / counts[c];
                    continue;
                }
                // Empty cluster: move its centre to the worst-fitted point.
                Eigen::Index far = 0;
                Eigen::VectorXd dist(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    dist(i) = (x.row(i) - centres.row(z[i])).squaredNorm();
                }
                dist.maxCoeff(&far);
                centres.row(c) = x.row(far);
            }
        }
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_z = z;
        }
    }
    return ClusterModel::from_labels(x, best_z);
}

double clustering_accuracy(const std::vector<int>& z_hat, const std::vector<int>& z_true)
{
    if (z_hat.size() != z_true.size()) {
        throw ValidationError("z_hat", "length differs from z_true");
    }
    if (z_hat.empty()) {
        return 1.0;
    }
    std::map<int, int> ph, pt;
    for (int l : z_hat) {
        ph.emplace(l, static_cast<int>(ph.size()));
    }
    for (int l : z_true) {
        pt.emplace(l, static_cast<int>(pt.size()));
    }
    // Rows: the side with more labels; columns: the side enumerated by bitmask.
    const bool hat_small = ph.size() <= pt.size();
    const int cols = static_cast<int>(hat_small ? ph.size() : pt.size());
    const int rows = static_cast<int>(hat_small ? pt.size() : ph.size());
    if (cols > 20) {
        throw ValidationError("z_hat", "too many labels on both sides for exact matching");
    }
    std::vector<std::vector<int>> conf(rows, std::vector<int>(cols, 0));
    for (std::size_t i = 0; i < z_hat.size(); ++i) {
        const int a = ph[z_hat[i]];
        const int b = pt[z_true[i]];
        if (hat_small) {
            ++conf[b][a];
        } else {
            ++conf[a][b];
        }
    }
    const std::size_t masks = std::size_t{1} << cols;
    std::vector<int> dp(masks, -1), next(masks);
    dp[0] = 0;
    for (int r = 0; r < rows; ++r) {
        next = dp;
        for (std::size_t mask = 0; mask < masks; ++mask) {
            if (dp[mask] < 0) {
                continue;
            }
            for (int c = 0; c < cols; ++c) {
                const std::size_t bit = std::size_t{1} << c;
                if (!(mask & bit)) {
                    next[mask | bit] = std::max(next[mask | bit], dp[mask] + conf[r][c]);
                }
            }
        }
        dp.swap(next);
    }
    const int matched = *std::max_element(dp.begin(), dp.end());
    return static_cast<double>(matched) / static_cast<double>(z_hat.size());
}

ChannelSelection select_channels(const std::vector<SubchannelProfile>& profiles,
                                 std::uint64_t seed)
{
    if (profiles.empty()) {
        throw ValidationError("profiles", "need at least one subchannel");
    }
    const auto lambda_less = [](const SubchannelProfile& a, const SubchannelProfile& b) {
        return a.lambda < b.lambda || (a.lambda == b.lambda && a.id < b.id);
    };
    const bool all_equal = std::all_of(profiles.begin(), profiles.end(), [&](const auto& p) {
        return p.lambda == profiles.front().lambda;
    });
    if (all_equal && profiles.size() > 1) {
        std::mt19937_64 rng(seed);
        const auto n = profiles.size();
        const auto h = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        auto t = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
        if (t >= h) {
            ++t;
        }
        return {profiles[h].id, profiles[t].id};
    }
    // Highest lambda, lowest id among ties.
    const auto hi = std::min_element(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) {
        return a.lambda > b.lambda || (a.lambda == b.lambda && a.id < b.id);
    });
    const auto lo = std::min_element(profiles.begin(), profiles.end(), lambda_less);
    return {hi->id, lo->id};
}

}  // namespace rfcrn

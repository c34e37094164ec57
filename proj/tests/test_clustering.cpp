#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rfcrn/clustering.hpp"
#include "rfcrn/niw.hpp"
#include "support.hpp"

using namespace rfcrn;

namespace {

Eigen::MatrixXd blobs(const std::vector<Eigen::Vector2d>& centres, int per, double sd,
                      std::uint64_t seed, std::vector<int>* labels = nullptr)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sd);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(centres.size()) * per, 2);
    Eigen::Index r = 0;
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (int i = 0; i < per; ++i, ++r) {
            x(r, 0) = centres[c].x() + n(rng);
            x(r, 1) = centres[c].y() + n(rng);
            if (labels) {
                labels->push_back(static_cast<int>(c));
            }
        }
    }
    return x;
}

// 1-D Student-t predictive from the normal-inverse-gamma update written out by hand.
double hand_predictive_1d(double y, const std::vector<double>& data, double mu0, double kappa0,
                          double nu0, double lambda0)
{
    const double n = static_cast<double>(data.size());
    double xbar = 0.0;
    for (double v : data) {
        xbar += v;
    }
    xbar = n > 0 ? xbar / n : 0.0;
    double ss = 0.0;
    for (double v : data) {
        ss += (v - xbar) * (v - xbar);
    }
    const double kn = kappa0 + n;
    const double mun = (kappa0 * mu0 + n * xbar) / kn;
    const double nun = nu0 + n;
    const double ln = lambda0 + ss + kappa0 * n / kn * (xbar - mu0) * (xbar - mu0);
    const double dof = nun;  // nu_n - d + 1 with d = 1
    const double s2 = ln * (kn + 1) / (kn * dof);
    const double z = (y - mun) * (y - mun) / s2;
    return std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) /
           std::sqrt(dof * M_PI * s2) * std::pow(1 + z / dof, -(dof + 1) / 2);
}

ClusterStats stats_of(const std::vector<double>& data)
{
    ClusterStats st = ClusterStats::empty(1);
    for (double v : data) {
        st.add(Eigen::VectorXd::Constant(1, v));
    }
    return st;
}

}  // namespace

TEST_CASE("stick-breaking weights")
{
    const auto w = stick_breaking_weights({0.5, 0.5, 0.5});
    REQUIRE(w.size() == 3);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.25));
    CHECK(w[2] == doctest::Approx(0.125));
    CHECK_THROWS_AS(stick_breaking_weights({0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(stick_breaking_weights({0.0}), std::domain_error);
}

TEST_CASE("property: stick-breaking mass equals one minus the leftover stick")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-6, 1 - 1e-6);
    std::uniform_int_distribution<int> len(1, 40);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v(len(rng));
        double left = 1.0;
        for (double& vi : v) {
            vi = u(rng);
            left *= 1 - vi;
        }
        const auto w = stick_breaking_weights(v);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        CHECK(sum == doctest::Approx(1 - left).epsilon(1e-12));
        CHECK(std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0; }));
    }
}

TEST_CASE("CRP conditional")
{
    const auto p = crp_conditional({2, 1}, 1.0, 4);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.25));
    const auto first = crp_conditional({}, 2.0, 1);
    REQUIRE(first.size() == 1);
    CHECK(first[0] == doctest::Approx(1.0));
    CHECK_THROWS(crp_conditional({2, 2}, 1.0, 4));
}

TEST_CASE("property: CRP conditional sums to one")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> c(1, 9), k(1, 8);
    std::uniform_real_distribution<double> a(0.05, 20.0);
    for (int t = 0; t < 300; ++t) {
        std::vector<int> counts(k(rng));
        int n = 1;
        for (int& ci : counts) {
            ci = c(rng);
            n += ci;
        }
        const auto p = crp_conditional(counts, a(rng), n);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("1-D predictive matches the hand normal-inverse-gamma update")
{
    const NiwPrior prior = NiwPrior::standard(1, 0.3, 2.5, 0.7);
    const std::vector<double> data{0.4, -1.1, 2.0, 0.9};
    for (double y : {-3.0, -0.2, 0.0, 0.55, 4.0}) {
        const double got = posterior_predictive(Eigen::VectorXd::Constant(1, y), stats_of(data), prior);
        CHECK(got == doctest::Approx(hand_predictive_1d(y, data, 0.0, 0.3, 2.5, 0.7)).epsilon(1e-12));
    }
}

TEST_CASE("empty cluster gives the prior predictive")
{
    const NiwPrior prior = NiwPrior::standard(1, 0.01, 5.0, 0.1);
    for (double y : {-1.0, 0.0, 2.0}) {
        const double got = posterior_predictive(Eigen::VectorXd::Constant(1, y), stats_of({}), prior);
        CHECK(got == doctest::Approx(hand_predictive_1d(y, {}, 0.0, 0.01, 5.0, 0.1)).epsilon(1e-12));
    }
}

TEST_CASE("predictive integrates to one")
{
    const NiwPrior prior = NiwPrior::standard(1, 0.5, 6.0, 1.0);
    const ClusterStats st = stats_of({0.2, 0.3, -0.1});
    const auto f = [&](double y) { return posterior_predictive(Eigen::VectorXd::Constant(1, y), st, prior); };
    CHECK(test::simpson(f, -400.0, 400.0, 200000) == doctest::Approx(1.0).epsilon(1e-6));

    // 3-D: tensor Simpson over a box holding nearly all the mass.
    const NiwPrior p3 = NiwPrior::standard(3, 1.0, 20.0, 10.0);
    const StudentT t = predictive(p3, ClusterStats::empty(3));
    const int n = 100;
    const double L = 6.0, h = 2 * L / n;
    const auto w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double total = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            for (int k = 0; k <= n; ++k) {
                total += w(i) * w(j) * w(k) *
                         t.density(Eigen::Vector3d(-L + i * h, -L + j * h, -L + k * h));
            }
        }
    }
    CHECK(total * h * h * h / 27.0 == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("adding a point raises the predictive density there")
{
    const NiwPrior prior = NiwPrior::standard(2, 0.01, 5.0, 0.1);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        ClusterStats st = ClusterStats::empty(2);
        for (int i = 0; i < 5; ++i) {
            st.add(Eigen::Vector2d(n(rng), n(rng)));
        }
        const Eigen::Vector2d y(n(rng), n(rng));
        const double before = posterior_predictive(y, st, prior);
        st.add(y);
        CHECK(posterior_predictive(y, st, prior) > before);
    }
}

TEST_CASE("ClusterStats add and remove round-trip")
{
    ClusterStats st = ClusterStats::empty(2);
    st.add(Eigen::Vector2d(1, 2));
    st.add(Eigen::Vector2d(-3, 0.5));
    st.remove(Eigen::Vector2d(1, 2));
    CHECK(st.count == 1);
    CHECK(st.sum.isApprox(Eigen::Vector2d(-3, 0.5)));
    CHECK(st.outer(0, 1) == doctest::Approx(-1.5));
}

TEST_CASE("invalid NIW priors")
{
    CHECK_THROWS_AS(NiwPrior::standard(2, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS(NiwPrior::standard(3, 0.1, 1.5).validate(), ValidationError);
    NiwPrior p = NiwPrior::standard(2);
    p.Lambda0(0, 0) = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("standardizer")
{
    Eigen::MatrixXd x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    const Eigen::MatrixXd z = standardize(x);
    CHECK(z.col(0).mean() == doctest::Approx(0.0));
    CHECK((z.col(0).array().square().sum() / 4) == doctest::Approx(1.0).epsilon(0.34));
    CHECK(z.col(1).isZero());
}

TEST_CASE("Gibbs leaves a tight blob in one cluster")
{
    // Spread 0.05 against a prior covariance scale of about 1.
    const NiwPrior prior = NiwPrior::standard(2, 0.01, 5.0, 2.0);
    int single = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::MatrixXd x = blobs({{0, 0}}, 100, 0.05, seed);
        const auto r = gibbs_fit(x, prior, 1.0, 50, seed);
        single += r.model.k_plus == 1;
    }
    CHECK(single >= 18);
}

TEST_CASE("Gibbs separates two far blobs")
{
    const NiwPrior prior = NiwPrior::standard(2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::vector<int> truth;
        const Eigen::MatrixXd x = standardize(blobs({{0, 0}, {20, 20}}, 30, 1.0, seed, &truth));
        const auto r = gibbs_fit(x, prior, 1.0, 50, seed);
        CHECK(clustering_accuracy(r.model.z, truth) == 1.0);
        CHECK(r.model.k_plus == 2);
        CHECK(r.k_trace.size() == 50);
    }
}

TEST_CASE("Gibbs on one point")
{
    Eigen::MatrixXd x(1, 2);
    x << 0.3, -0.2;
    const auto r = gibbs_fit(x, NiwPrior::standard(2), 1.0, 5, 1);
    CHECK(r.model.k_plus == 1);
    CHECK(r.model.z == std::vector<int>{0});
}

TEST_CASE("Gibbs cached statistics stay consistent")
{
    const Eigen::MatrixXd x = standardize(blobs({{0, 0}, {4, 0}, {0, 4}}, 20, 1.0, 11));
    for (GibbsInit init : {GibbsInit::singletons, GibbsInit::sequential_crp}) {
        GibbsSampler g(x, NiwPrior::standard(2), 1.0, 4, init);
        for (int i = 0; i < 30; ++i) {
            g.sweep();
            CHECK(g.consistency_error() < 1e-9);
        }
        CHECK(g.sweeps_done() == 30);
        CHECK(g.k_trace().size() == 30);
    }
    GibbsSampler rp(x, NiwPrior::standard(2), 1.0, 4, GibbsInit::random_partition, 3);
    CHECK(rp.k_plus() == 3);
    rp.sweep();
    CHECK(rp.consistency_error() < 1e-9);
}

TEST_CASE("Gibbs is reproducible for a seed")
{
    const Eigen::MatrixXd x = standardize(blobs({{0, 0}, {3, 3}}, 25, 1.0, 2));
    const auto a = gibbs_fit(x, NiwPrior::standard(2), 1.0, 20, 99);
    const auto b = gibbs_fit(x, NiwPrior::standard(2), 1.0, 20, 99);
    CHECK(a.model.z == b.model.z);
    CHECK(a.k_trace == b.k_trace);
}

TEST_CASE("clustering accuracy")
{
    CHECK(clustering_accuracy({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(0.5));
    CHECK(clustering_accuracy({1, 1, 0, 0}, {0, 0, 1, 1}) == 1.0);
    CHECK(clustering_accuracy({0, 1, 2, 3}, {0, 0, 0, 0}) == doctest::Approx(0.25));
    CHECK(clustering_accuracy({0, 0, 0}, {0, 1, 2}) == doctest::Approx(1.0 / 3));
    CHECK_THROWS(clustering_accuracy({0, 1}, {0}));
}

TEST_CASE("property: accuracy is invariant under relabelling")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> lab(0, 4), len(1, 60);
    for (int t = 0; t < 200; ++t) {
        const int n = len(rng);
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = lab(rng);
            b[i] = lab(rng);
        }
        std::vector<int> perm{0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> pa(n);
        for (int i = 0; i < n; ++i) {
            pa[i] = perm[a[i]] + 7;
        }
        const double acc = clustering_accuracy(a, b);
        CHECK(clustering_accuracy(pa, b) == doctest::Approx(acc));
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
        CHECK(clustering_accuracy(a, a) == 1.0);
    }
}

TEST_CASE("k-means edge cases and two blobs")
{
    std::vector<int> truth;
    const Eigen::MatrixXd x = blobs({{0, 0}, {10, 0}}, 15, 0.5, 4, &truth);
    const auto one = kmeans_fit(x, 1, 3, 1);
    CHECK(one.k_plus == 1);
    const double total = (x.rowwise() - x.colwise().mean()).squaredNorm();
    CHECK(one.wcss == doctest::Approx(total));
    const auto all = kmeans_fit(x, static_cast<int>(x.rows()), 1, 1);
    CHECK(all.wcss == doctest::Approx(0.0).epsilon(1e-12));
    const auto two = kmeans_fit(x, 2, 5, 1);
    CHECK(clustering_accuracy(two.z, truth) == 1.0);
    CHECK_THROWS(kmeans_fit(x, 0, 1, 1));
    CHECK_THROWS(kmeans_fit(x, static_cast<int>(x.rows()) + 1, 1, 1));
    const auto again = kmeans_fit(x, 2, 5, 1);
    CHECK(again.z == two.z);
}

TEST_CASE("cluster summaries from labels")
{
    Eigen::MatrixXd x(4, 1);
    x << 1, 3, 10, 12;
    const auto m = ClusterModel::from_labels(x, {5, 5, 2, 2}, {7, 7, 1, 2});
    CHECK(m.z == std::vector<int>{0, 0, 1, 1});
    CHECK(m.k_plus == 2);
    CHECK(m.clusters[0].mean(0) == doctest::Approx(2.0));
    CHECK(m.clusters[0].scatter(0, 0) == doctest::Approx(2.0));
    CHECK(m.clusters[0].members == std::vector<int>{7});
    CHECK(m.clusters[1].members == std::vector<int>{1, 2});
    CHECK(m.wcss == doctest::Approx(4.0));
}

TEST_CASE("channel selection")
{
    const std::vector<SubchannelProfile> ex{{0, 3.0, 0.5, 0.5, 0}, {1, 1.0, 0.5, 0.5, 0}, {2, 5.0, 0.5, 0.5, 0}};
    CHECK(select_channels(ex).c_h == 2);
    CHECK(select_channels(ex).c_t == 1);
    std::vector<SubchannelProfile> p{{0, 5.0, 0.5, 0.5, 0}, {1, 20.0, 0.1, 0.9, 1}, {2, 1.0, 0.9, 0.1, 2}};
    auto s = select_channels(p);
    CHECK(s.c_h == 1);
    CHECK(s.c_t == 2);
    p.push_back({3, 20.0, 0.1, 0.9, 1});
    p.push_back({4, 1.0, 0.9, 0.1, 2});
    s = select_channels(p);
    CHECK(s.c_h == 1);
    CHECK(s.c_t == 2);
    const std::vector<SubchannelProfile> flat{{0, 3.0, 0.5, 0.5, 0}, {1, 3.0, 0.5, 0.5, 0}};
    const auto f = select_channels(flat, 9);
    CHECK(f.c_h != f.c_t);
    CHECK(select_channels(flat, 9).c_h == f.c_h);
    const std::vector<SubchannelProfile> one{{4, 3.0, 0.5, 0.5, 0}};
    CHECK(select_channels(one).c_h == 4);
    CHECK(select_channels(one).c_t == 4);
    CHECK_THROWS(select_channels({}));
}

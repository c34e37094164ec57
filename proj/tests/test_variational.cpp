#include <doctest.h>

#include <random>

#include "rfcrn/variational.hpp"

using namespace rfcrn;

namespace {

Eigen::MatrixXd two_blobs(int per, std::uint64_t seed, std::vector<int>& labels)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd x(2 * per, 2);
    for (int i = 0; i < 2 * per; ++i) {
        const double c = i < per ? 0.0 : 20.0;
        x(i, 0) = c + n(rng);
        x(i, 1) = c + n(rng);
        labels.push_back(i < per ? 0 : 1);
    }
    return standardize(x);
}

const NiwPrior kPrior = NiwPrior::standard(2);

}  // namespace

TEST_CASE("VB separates two far blobs")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::vector<int> truth;
        const Eigen::MatrixXd x = two_blobs(30, seed, truth);
        VbOptions o;
        o.seed = seed;
        const auto r = vb_fit(x, kPrior, o);
        CHECK(r.model.k_plus == 2);
        CHECK(clustering_accuracy(r.model.z, truth) == 1.0);
        CHECK(r.state.converged);
    }
}

TEST_CASE("responsibilities are row-stochastic after every iteration")
{
    std::vector<int> truth;
    const Eigen::MatrixXd x = two_blobs(20, 3, truth);
    for (int it = 1; it <= 12; ++it) {
        VbOptions o;
        o.max_iter = it;
        o.seed = 3;
        const auto r = vb_fit(x, kPrior, o);
        REQUIRE(r.state.resp.rows() == x.rows());
        CHECK(r.state.resp.cols() == o.truncation);
        const Eigen::VectorXd rows = r.state.resp.rowwise().sum();
        CHECK((rows.array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(r.state.resp.minCoeff() >= 0.0);
        CHECK(r.state.weight.sum() == doctest::Approx(static_cast<double>(x.rows())));
    }
}

TEST_CASE("ELBO never decreases")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Eigen::MatrixXd x(90, 2);
        for (int i = 0; i < 90; ++i) {
            const double c = 3.0 * (i % 3);
            x(i, 0) = c + n(rng);
            x(i, 1) = -c + n(rng);
        }
        VbOptions o;
        o.seed = static_cast<std::uint64_t>(t + 1);
        const auto r = vb_fit(standardize(x), kPrior, o);
        const auto& e = r.state.elbo_trace;
        REQUIRE(e.size() >= 2);
        for (std::size_t i = 1; i < e.size(); ++i) {
            CHECK(e[i] >= e[i - 1] - 1e-6);
        }
        CHECK(static_cast<int>(e.size()) == r.state.iterations);
    }
}

TEST_CASE("duplicated data keeps the cluster count")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::vector<int> truth;
        const Eigen::MatrixXd x = two_blobs(25, seed, truth);
        Eigen::MatrixXd xx(2 * x.rows(), 2);
        xx << x, x;
        VbOptions o;
        o.seed = seed;
        CHECK(vb_fit(xx, kPrior, o).model.k_plus == vb_fit(x, kPrior, o).model.k_plus);
    }
}

TEST_CASE("stick parameters and truncation")
{
    std::vector<int> truth;
    const Eigen::MatrixXd x = two_blobs(15, 2, truth);
    VbOptions o;
    o.truncation = 6;
    o.init_clusters = 4;
    const auto r = vb_fit(x, kPrior, o);
    CHECK(r.state.truncation == 6);
    CHECK(r.state.zeta.rows() == 5);
    CHECK(r.state.zeta.minCoeff() > 0.0);
    CHECK(r.model.k_plus <= 6);
}

TEST_CASE("invalid VB options")
{
    VbOptions o;
    o.truncation = 0;
    CHECK_THROWS_AS(o.validate(), ValidationError);
    VbOptions a;
    a.alpha = 0.0;
    CHECK_THROWS_AS(a.validate(), ValidationError);
    VbOptions m;
    m.max_iter = 0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("restarts keep the best bound")
{
    std::vector<int> truth;
    const Eigen::MatrixXd x = two_blobs(25, 4, truth);
    VbOptions one;
    one.restarts = 1;
    VbOptions many = one;
    many.restarts = 4;
    const double single = vb_fit(x, kPrior, one).state.elbo_trace.back();
    CHECK(vb_fit(x, kPrior, many).state.elbo_trace.back() >= single);
    VbOptions bad;
    bad.restarts = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "rfcrn/sensing.hpp"

using namespace rfcrn;

namespace {

// Independent upper-tail oracle.
double q_ref(double x)
{
    return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
}

SensingModel base() { return SensingModel::make(1.0, 0.1, 1.0, 2000); }

}  // namespace

TEST_CASE("false alarm at the noise floor and far above it")
{
    CHECK(prob_false_alarm(base(), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(prob_false_alarm(base(), 50.0) < 1e-300);
}

TEST_CASE("false alarm reference value")
{
    const double expected = q_ref(0.05 * std::sqrt(2000.0));
    CHECK(prob_false_alarm(base(), 1.05) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(prob_false_alarm(base(), 1.05) == doctest::Approx(0.01267).epsilon(1e-3));
}

TEST_CASE("detection at its midpoint and reference value")
{
    CHECK(prob_detection(base(), 1.1) == doctest::Approx(0.5).epsilon(1e-14));
    const double expected = q_ref((1.05 / 1.1 - 1.0) * std::sqrt(2000.0));
    CHECK(prob_detection(base(), 1.05) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(prob_detection(base(), 1.05) == doctest::Approx(0.9790).epsilon(1e-3));
}

TEST_CASE("zero gain makes detection equal false alarm")
{
    const auto m = SensingModel::make(2.0, 0.5, 0.0, 300);
    for (double e = 0.0; e < 5.0; e += 0.01) {
        CHECK(prob_detection(m, e) == prob_false_alarm(m, e));
    }
}

TEST_CASE("negative thresholds and invalid models are rejected")
{
    CHECK_THROWS_AS(prob_false_alarm(base(), -0.1), std::domain_error);
    CHECK_THROWS_AS(prob_detection(base(), -0.1), std::domain_error);
    CHECK_THROWS_AS(SensingModel::make(0.0, 0.1, 1.0, 10), ValidationError);
    CHECK_THROWS_AS(SensingModel::make(1.0, 0.1, -1.0, 10), ValidationError);
    CHECK_THROWS_AS(SensingModel::make(1.0, 0.1, 1.0, 0), ValidationError);
}

TEST_CASE("property: monotone and dominated on grids")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = SensingModel::make(0.5 + u(rng), 0.01 + u(rng), 0.1 + u(rng),
                                          100 + static_cast<long long>(u(rng) * 4000));
        const auto w = transition_window(m);
        double pf_prev = 2.0, pd_prev = 2.0;
        for (int i = 0; i <= 2000; ++i) {
            const double e = w.lo + (w.hi - w.lo) * i / 2000.0;
            const double pf = prob_false_alarm(m, e);
            const double pd = prob_detection(m, e);
            CHECK(pd >= pf - 1e-12);
            CHECK(pf <= pf_prev);
            CHECK(pd <= pd_prev);
            if (pf > 1e-12 && pf < 1.0 - 1e-12 && pf_prev < 1.0 - 1e-12) {
                CHECK(pf < pf_prev);
            }
            pf_prev = pf;
            pd_prev = pd;
        }
    }
}

TEST_CASE("property: more samples sharpen the false-alarm step")
{
    for (double e : {0.9, 0.97, 0.995, 1.005, 1.03, 1.2}) {
        const double step = e < 1.0 ? 1.0 : 0.0;
        double prev = 2.0;
        for (long long n : {100, 1000, 10000}) {
            const double gap = std::abs(prob_false_alarm(SensingModel::make(1.0, 0.1, 1.0, n), e) - step);
            CHECK(gap < prev);
            prev = gap;
        }
    }
}

TEST_CASE("transition window brackets both transitions")
{
    const auto m = base();
    const auto w = transition_window(m);
    CHECK(prob_false_alarm(m, w.lo) > 1.0 - 1e-6);
    CHECK(prob_detection(m, w.hi) < 1e-6);
    CHECK(w.lo > 0.0);
}

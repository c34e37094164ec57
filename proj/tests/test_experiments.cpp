#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rfcrn/experiments.hpp"
#include "support.hpp"

using namespace rfcrn;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Config quick(const std::string& preset)
{
    Config c = Config::preset(preset);
    c.set("sim.slots", "4000");
    c.set("sim.batches", "10");
    c.set("sweep.points", "7");
    c.set("bench.points", "60");
    c.set("bench.seeds", "2");
    c.set("cluster.sweeps", "10");
    c.set("power.P_t", "20e-3,60e-3");
    c.set("mdp.n_tau_list", "2,3,5");
    c.set("pipeline.subchannels_per_profile", "3");
    return c;
}

ExperimentOutput run(const std::string& name, const Config& cfg, const std::filesystem::path& dir,
                     std::uint64_t seed = 1)
{
    return run_experiment({name, cfg, dir, seed});
}

}  // namespace

TEST_CASE("every experiment writes versioned CSVs and is reproducible")
{
    test::TempDir tmp("exp");
    for (const auto& name : experiment_names()) {
        CAPTURE(name);
        const Config cfg = quick(name == "cluster-bench" ? "cluster-separated"
                                 : name == "full-pipeline" ? "pipeline"
                                                           : "default");
        const auto a = run(name, cfg, tmp.path() / (name + "-a"), 3);
        const auto b = run(name, cfg, tmp.path() / (name + "-b"), 3);
        REQUIRE_FALSE(a.files.empty());
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t i = 0; i < a.files.size(); ++i) {
            const std::string text = slurp(a.files[i]);
            if (a.files[i].extension() == ".csv") {
                CHECK(text.rfind("# schema=v1\n", 0) == 0);
            }
            if (a.files[i].filename().string().find("timing") == std::string::npos) {
                CHECK(text == slurp(b.files[i]));
            }
        }
    }
    CHECK_THROWS_AS(run("nope", quick("default"), tmp.path() / "x"), ValidationError);
}

TEST_CASE("mdp-check closed form agrees with power iteration on coprime pairs")
{
    test::TempDir tmp("mdp");
    Config cfg = quick("default");
    cfg.set("mdp.n_tau_list", "2,3,4,7");
    const auto out = run("mdp-check", cfg, tmp.path());
    std::istringstream in(slurp(out.files.at(0)));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("n_tau,N_b,n_kappa,", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');) {
            f.push_back(x);
        }
        REQUIRE(f.size() >= 7);
        if (f[4] == "ok" && f[5] == "1") {
            CHECK(std::stod(f[6]) <= 1e-9);
        }
    }
    CHECK(rows == 4);
}

TEST_CASE("oracle labels give perfect accuracy and the true class statistics")
{
    Config cfg = quick("pipeline");
    const PipelineData d = build_pipeline_data(cfg, 4);
    const auto labels = cluster_labels("oracle", d.features, d.point_truth, 3, cfg, 4);
    CHECK(labels == d.point_truth);
    const PipelineOutcome o = evaluate_labels(d, labels, cfg, 4);
    CHECK(o.accuracy == 1.0);
    CHECK(o.k_plus == 3);
    // Perfect clustering pools exactly the subchannels of each true profile.
    std::vector<int> relabelled(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        relabelled[i] = 2 - labels[i];
    }
    const PipelineOutcome p = evaluate_labels(d, relabelled, cfg, 4);
    CHECK(p.selection.c_h == o.selection.c_h);
    CHECK(p.selection.c_t == o.selection.c_t);
    CHECK(p.mc_capacity == o.mc_capacity);
    CHECK(o.opt.collision <= params_from(cfg).P_bar_c() + 1e-9);
    CHECK(o.opt_mdp.model == "mdp");
}

TEST_CASE("capacity at the optimised threshold beats half and double of it")
{
    Config cfg = Config::preset("pipeline");
    cfg.set("sim.slots", "200000");
    const PipelineData d = build_pipeline_data(cfg, 2);
    const auto labels = cluster_labels("gibbs", d.features, d.point_truth, 3, cfg, 2);
    const PipelineOutcome o = evaluate_labels(d, labels, cfg, 2);
    const Scenario truth = Scenario::make(params_from(cfg), ChannelPair::from_idle(o.p_i_h_true, o.p_i_t_true));
    SimConfig sim = sim_config_from(cfg, truth, 2);
    const auto at = [&](double e) {
        sim.eps = e;
        return simulate(sim).actual_capacity;
    };
    const double best = at(o.opt.eps_star);
    CHECK(best > at(0.5 * o.opt.eps_star));
    CHECK(best > at(2.0 * o.opt.eps_star));
    CHECK(rate_capacity(truth, o.opt.eps_star) > rate_capacity(truth, 0.5 * o.opt.eps_star));
    CHECK(rate_capacity(truth, o.opt.eps_star) > rate_capacity(truth, 2.0 * o.opt.eps_star));
}

TEST_CASE("clustering methods recover the pipeline profiles")
{
    Config cfg = quick("pipeline");
    const PipelineData d = build_pipeline_data(cfg, 6);
    for (const char* m : {"gibbs", "vb", "kmeans"}) {
        CAPTURE(m);
        const auto labels = cluster_labels(m, d.features, d.point_truth, 3, cfg, 6);
        CHECK(clustering_accuracy(labels, d.point_truth) >= 0.9);
    }
    CHECK_THROWS_AS(cluster_labels("dbscan", d.features, d.point_truth, 3, cfg, 6), ValidationError);
}

TEST_CASE("config readers")
{
    Config cfg = Config::preset("default");
    cfg.set("opt.step_beta", "0.2");
    cfg.set("sim.process", "markov");
    cfg.set("sim.burst_corr", "0.5");
    cfg.set("cluster.alpha", "2.5");
    CHECK(optimizer_config_from(cfg).step_beta == 0.2);
    const SimConfig s = sim_config_from(cfg, test::default_scenario(), 9);
    CHECK(s.process == ChannelProcess::markov);
    CHECK(s.burst_corr == 0.5);
    CHECK(s.seed == 9);
    CHECK(vb_options_from(cfg, 1).alpha == 2.5);
    CHECK(prior_from(cfg, 3).dim() == 3);
    cfg.set("sim.process", "poisson");
    CHECK_THROWS_AS(sim_config_from(cfg, test::default_scenario(), 1), ValidationError);
}

TEST_CASE("overlap preset: Gibbs-selected channels do at least as well as VB-selected ones")
{
    const Config cfg = Config::preset("cluster-overlap");
    double gibbs = 0.0, vb = 0.0;
    for (std::uint64_t j = 0; j < 20; ++j) {
        const std::uint64_t seed = derive_seed(1, j);
        const PipelineData d = build_pipeline_data(cfg, seed);
        const int k = static_cast<int>(d.profiles.size());
        gibbs += evaluate_labels(d, cluster_labels("gibbs", d.features, d.point_truth, k, cfg, seed), cfg, seed)
                     .mc_capacity;
        vb += evaluate_labels(d, cluster_labels("vb", d.features, d.point_truth, k, cfg, seed), cfg, seed)
                  .mc_capacity;
    }
    CHECK(gibbs >= vb);
}

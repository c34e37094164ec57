// rfcrn: command-line front end for the experiments and single-shot tools.
//
// Exit codes: 0 success, 1 I/O or other failure, 2 invalid input, 3 numeric failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfcrn/config.hpp"
#include "rfcrn/experiments.hpp"
#include "rfcrn/mdp.hpp"
#include "rfcrn/montecarlo.hpp"
#include "rfcrn/optimizer.hpp"
#include "rfcrn/traffic.hpp"

namespace {

struct Common {
    std::string preset = "default";
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c, bool with_out)
{
    app->add_option("--preset", c.preset, "built-in parameter preset")->capture_default_str();
    app->add_option("--config", c.config_file, "key=value file applied on top of the preset");
    app->add_option("--set", c.overrides, "KEY=VALUE override (repeatable)");
    app->add_option("--seed", c.seed, "base seed")->capture_default_str();
    if (with_out) {
        app->add_option("--out", c.out_dir, "output directory")->capture_default_str();
    }
}

rfcrn::Config resolve(const Common& c)
{
    rfcrn::Config cfg = rfcrn::Config::preset(c.preset);
    if (!c.config_file.empty()) {
        const rfcrn::Config file = rfcrn::Config::load(c.config_file);
        for (const auto& [k, v] : file.values()) {
            cfg.set(k, v);
        }
    }
    for (const auto& o : c.overrides) {
        cfg.set(o);
    }
    const rfcrn::SystemParams params = rfcrn::params_from(cfg);
    for (const auto& w : params.warnings()) {
        std::cerr << "warning: " << w << '\n';
    }
    return cfg;
}

int run_experiment(const std::string& name, const Common& c)
{
    rfcrn::ExperimentSpec spec{name, resolve(c), c.out_dir, c.seed};
    const auto out = rfcrn::run_experiment(spec);
    for (const auto& line : out.summary) {
        std::cout << line << '\n';
    }
    for (const auto& f : out.files) {
        std::cout << "wrote " << f.string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RF-powered cognitive radio toolkit"};
    app.require_subcommand(1);

    Common common;
    for (const auto& name : rfcrn::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        add_common(sub, common, true);
        sub->callback([&common, name] { throw CLI::RuntimeError(run_experiment(name, common)); });
    }

    auto* presets = app.add_subcommand("presets", "list built-in presets");
    presets->callback([] {
        for (const auto& n : rfcrn::Config::preset_names()) {
            std::cout << n << '\n';
        }
    });

    auto* show = app.add_subcommand("show-config", "print the resolved configuration");
    add_common(show, common, false);
    show->callback([&common] { std::cout << resolve(common).dump(); });

    double eps_rel = 1.0;
    std::string model = "duty-cycle";
    auto* optimize = app.add_subcommand("optimize", "optimise the sensing threshold");
    add_common(optimize, common, false);
    optimize->add_option("--model", model, "duty-cycle or mdp")->capture_default_str();
    optimize->callback([&common, &model] {
        const auto cfg = resolve(common);
        const auto s = rfcrn::Scenario::make(rfcrn::params_from(cfg), rfcrn::pair_from(cfg));
        const auto m = rfcrn::capacity_model_from(model);
        const auto problem = m == rfcrn::CapacityModel::mdp
                                 ? rfcrn::ThresholdProblem::mdp(s, static_cast<int>(cfg.get_int("n_tau", 64)))
                                 : rfcrn::ThresholdProblem::duty_cycle(s);
        std::cout << rfcrn::optimize_threshold(problem, rfcrn::optimizer_config_from(cfg))
                         .diagnostics_json()
                  << '\n';
    });

    auto* simulate = app.add_subcommand("simulate", "one Monte-Carlo run at a fixed threshold");
    add_common(simulate, common, false);
    simulate->add_option("--eps", eps_rel, "threshold in units of sigma_w^2")->required();
    simulate->callback([&common, &eps_rel] {
        const auto cfg = resolve(common);
        const auto p = rfcrn::params_from(cfg);
        auto sim = rfcrn::sim_config_from(cfg, rfcrn::Scenario::make(p, rfcrn::pair_from(cfg)),
                                          common.seed);
        sim.eps = eps_rel * p.sigma_w2();
        const auto r = rfcrn::simulate(sim);
        nlohmann::json j{{"eps_rel", eps_rel},          {"capacity_bps", r.actual_capacity},
                         {"capacity_se_bps", r.se_capacity}, {"active_fraction", r.active_fraction},
                         {"collision_rate", r.collision_rate}, {"mean_battery_J", r.mean_battery},
                         {"slots", r.slots}};
        std::cout << j.dump() << '\n';
    });

    std::string trace_path;
    double slot = 0.1, bitrate = 1e6;
    auto* ingest = app.add_subcommand("ingest", "channel statistics of a packet trace CSV");
    ingest->add_option("trace", trace_path, "CSV with header time_s,length_bytes")->required();
    ingest->add_option("--slot", slot, "slot length in seconds")->capture_default_str();
    ingest->add_option("--bitrate", bitrate, "channel bit rate in bit/s")->capture_default_str();
    ingest->callback([&] {
        const auto trace = rfcrn::ingest_trace(trace_path);
        const auto st = rfcrn::estimate_channel_stats(trace, slot, bitrate);
        nlohmann::json j{{"packets", trace.packets.size()}, {"duration_s", trace.duration},
                         {"lambda", st.lambda},             {"p_i", st.p_i},
                         {"p_o", st.p_o},                   {"slots", st.slots}};
        std::cout << j.dump() << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const rfcrn::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const rfcrn::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "rfcrn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rfcrn/mdp.hpp"

namespace rfcrn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One CSV file with the "# schema=v1" comment line and a header row.
class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path)
    {
        if (!out_) {
            throw std::runtime_error(path.string() + ": cannot open for writing");
        }
        out_.precision(10);
        out_ << "# schema=v1\n" << header << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... values)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << values, first = false), ...);
        out_ << '\n';
    }

    std::ostream& stream() { return out_; }

    const std::filesystem::path& close()
    {
        out_.close();
        if (!out_) {
            throw std::runtime_error(path_.string() + ": write failed");
        }
        return path_;
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

std::string fmt(double v, int precision = 6)
{
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

void prepare(const ExperimentSpec& spec)
{
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) {
        throw std::runtime_error(spec.out_dir.string() + ": " + ec.message());
    }
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 1) {
        throw ValidationError("points", "must be >= 1");
    }
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

std::optional<Quantization> try_quantize(const SystemParams& p, int n_tau, std::string& status)
{
    try {
        status = "ok";
        return quantize(p, n_tau);
    } catch (const ValidationError& e) {
        status = e.what();
        return std::nullopt;
    }
}

}  // namespace

std::vector<std::string> experiment_names()
{
    return {"cluster-bench", "threshold-sweep", "power-sweep", "mdp-check", "full-pipeline"};
}

ChannelPair pair_from(const Config& cfg)
{
    return ChannelPair::from_idle(cfg.get_double("p_i_h", 0.2), cfg.get_double("p_i_t", 0.8));
}

OptimizerConfig optimizer_config_from(const Config& cfg)
{
    OptimizerConfig c;
    c.eps0 = cfg.get_double("opt.eps0", c.eps0);
    c.eps1 = cfg.get_double("opt.eps1", c.eps1);
    c.secant_tol = cfg.get_double("opt.secant_tol", c.secant_tol);
    c.step_beta = cfg.get_double("opt.step_beta", c.step_beta);
    c.grad_tol = cfg.get_double("opt.grad_tol", c.grad_tol);
    c.fd_h = cfg.get_double("opt.fd_h", c.fd_h);
    c.max_iter = static_cast<int>(cfg.get_int("opt.max_iter", c.max_iter));
    c.eps_max = cfg.get_double("opt.eps_max", c.eps_max);
    c.validate();
    return c;
}

NiwPrior prior_from(const Config& cfg, int dim)
{
    return NiwPrior::standard(dim, cfg.get_double("cluster.kappa0", 0.01),
                              cfg.get_double("cluster.nu0", 5.0),
                              cfg.get_double("cluster.lambda_scale", 1.0));
}

VbOptions vb_options_from(const Config& cfg, std::uint64_t seed)
{
    VbOptions o;
    o.alpha = cfg.get_double("cluster.alpha", o.alpha);
    o.truncation = static_cast<int>(cfg.get_int("cluster.vb_truncation", o.truncation));
    o.init_clusters = static_cast<int>(cfg.get_int("cluster.vb_init", 10));
    o.max_iter = static_cast<int>(cfg.get_int("cluster.vb_max_iter", o.max_iter));
    o.restarts = static_cast<int>(cfg.get_int("cluster.vb_restarts", o.restarts));
    o.tol = cfg.get_double("cluster.vb_tol", o.tol);
    o.prune = cfg.get_double("cluster.vb_prune", o.prune);
    o.seed = seed;
    o.validate();
    return o;
}

SimConfig sim_config_from(const Config& cfg, const Scenario& s, std::uint64_t seed)
{
    SimConfig c(s);
    c.N_t = cfg.get_int("sim.slots", 100000);
    c.batches = static_cast<int>(cfg.get_int("sim.batches", 100));
    const std::string process = cfg.get_string("sim.process", "iid");
    if (process == "iid") {
        c.process = ChannelProcess::iid;
    } else if (process == "markov") {
        c.process = ChannelProcess::markov;
    } else {
        throw ValidationError("sim.process", "expected iid or markov");
    }
    c.burst_corr = cfg.get_double("sim.burst_corr", 0.0);
    c.seed = seed;
    c.validate();
    return c;
}

std::vector<int> cluster_labels(const std::string& method, const Eigen::MatrixXd& x,
                                const std::vector<int>& truth, int k_true, const Config& cfg,
                                std::uint64_t seed)
{
    if (method == "oracle") {
        return truth;
    }
    if (method == "gibbs") {
        const auto r = gibbs_fit(x, prior_from(cfg, static_cast<int>(x.cols())),
                                 cfg.get_double("cluster.alpha", 1.0),
                                 static_cast<int>(cfg.get_int("cluster.sweeps", 100)), seed);
        return r.model.z;
    }
    if (method == "vb") {
        return vb_fit(x, prior_from(cfg, static_cast<int>(x.cols())), vb_options_from(cfg, seed))
            .model.z;
    }
    if (method == "kmeans") {
        return kmeans_fit(x, k_true, static_cast<int>(cfg.get_int("cluster.kmeans_restarts", 10)),
                          seed)
            .z;
    }
    throw ValidationError("method", "unknown clustering method '" + method + "'");
}

ExperimentOutput run_cluster_bench(const ExperimentSpec& spec)
{
    prepare(spec);
    const Config& cfg = spec.config;
    const auto profiles = profiles_from(cfg);
    if (profiles.empty()) {
        throw ValidationError("profile", "cluster-bench needs profile.* entries");
    }
    std::vector<double> counts = cfg.get_list("bench.points", {50, 100, 150, 200, 250, 300, 350, 400, 450});
    const int seeds = static_cast<int>(cfg.get_int("bench.seeds", 5));
    const int warmup = static_cast<int>(cfg.get_int("cluster.warmup", 1000));
    if (seeds < 1) {
        throw ValidationError("bench.seeds", "must be >= 1");
    }
    const std::vector<std::string> methods{"gibbs", "vb", "kmeans"};
    const int k_true = static_cast<int>(profiles.size());

    CsvFile acc(spec.out_dir / "cluster_bench.csv",
                "algorithm,points,seeds,accuracy_mean,accuracy_min,k_plus_mean");
    CsvFile timing(spec.out_dir / "cluster_bench_timing.csv", "algorithm,points,elapsed_ms_mean");
    CsvFile report(spec.out_dir / "cluster_report.csv",
                   "point_id,subchannel_id,true_label,gibbs,vb,kmeans");

    ExperimentOutput out;
    for (std::size_t ci = 0; ci < counts.size(); ++ci) {
        const int n = static_cast<int>(counts[ci]);
        std::map<std::string, std::vector<double>> a, k, ms;
        std::map<std::string, std::vector<int>> first_labels;
        LabeledFeatures first_data;
        for (int j = 0; j < seeds; ++j) {
            const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(n) * 1000 + j);
            const LabeledFeatures data = sample_feature_points(profiles, n, warmup, seed);
            const Eigen::MatrixXd x = standardize(data.x);
            for (const auto& m : methods) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto z = cluster_labels(m, x, data.label, k_true, cfg, seed);
                const auto t1 = std::chrono::steady_clock::now();
                ms[m].push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                a[m].push_back(clustering_accuracy(z, data.label));
                k[m].push_back(static_cast<double>(std::set<int>(z.begin(), z.end()).size()));
                if (j == 0) {
                    first_labels[m] = z;
                }
            }
            if (j == 0) {
                first_data = data;
            }
        }
        const auto mean = [](const std::vector<double>& v) {
            return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        };
        for (const auto& m : methods) {
            acc.row(m, n, seeds, mean(a[m]), *std::min_element(a[m].begin(), a[m].end()),
                    mean(k[m]));
            timing.row(m, n, mean(ms[m]));
            if (ci + 1 == counts.size()) {
                out.summary.push_back(m + " points=" + std::to_string(n) +
                                      " K_plus=" + fmt(mean(k[m]), 3) +
                                      " accuracy=" + fmt(mean(a[m]), 4) +
                                      " elapsed_ms=" + fmt(mean(ms[m]), 4));
            }
        }
        if (ci + 1 == counts.size()) {
            for (int i = 0; i < n; ++i) {
                report.row(i, first_data.subchannel[i], first_data.label[i],
                           first_labels["gibbs"][i], first_labels["vb"][i],
                           first_labels["kmeans"][i]);
            }
        }
    }
    out.files = {acc.close(), timing.close(), report.close()};
    return out;
}

ExperimentOutput run_threshold_sweep(const ExperimentSpec& spec)
{
    prepare(spec);
    const Config& cfg = spec.config;
    const SystemParams params = params_from(cfg);
    const Scenario s = Scenario::make(params, pair_from(cfg));
    const double unit = params.sigma_w2();
    const ThresholdWindow win = transition_window(s.sensing);
    const double lo = cfg.get_double("sweep.lo", std::max(win.lo / unit, 1e-3));
    const double hi = cfg.get_double("sweep.hi", win.hi / unit);
    const auto grid_rel = linspace(lo, hi, static_cast<int>(cfg.get_int("sweep.points", 100)));
    std::vector<double> grid;
    for (double e : grid_rel) {
        grid.push_back(e * unit);
    }

    std::string mdp_status;
    const auto quant = try_quantize(params, static_cast<int>(cfg.get_int("n_tau", 64)), mdp_status);

    const SimConfig sim = sim_config_from(cfg, s, spec.seed);
    const auto rows = actual_capacity_sweep(grid, sim, static_cast<unsigned>(cfg.get_int("sim.threads", 0)));

    CsvFile sweep(spec.out_dir / "threshold_sweep.csv",
                  "eps_rel,P_f,P_d,P_a,P_c,rate_duty_bps,P_a_mdp,rate_mdp_bps,rate_mdp_cont_bps,"
                  "mc_capacity_bps,mc_capacity_se_bps,mc_active_frac,mc_collision_rate");
    const double scale = rate_scale(s);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = grid[i];
        const double pa_mdp = quant ? prob_active_mdp(*quant, s, e) : kNaN;
        const double pf = prob_false_alarm(s.sensing, e);
        const SimReport& r = rows[i].report;
        sweep.row(grid_rel[i], pf, prob_detection(s.sensing, e), prob_active(s, e),
                  collision_prob(s, e), rate_capacity(s, e), pa_mdp, scale * (1.0 - pf) * pa_mdp,
                  scale * mdp_objective_continuous(s, e), r.actual_capacity, r.se_capacity,
                  r.active_fraction, r.collision_rate);
    }

    std::ofstream jsonl(spec.out_dir / "optimizer.jsonl");
    if (!jsonl) {
        throw std::runtime_error((spec.out_dir / "optimizer.jsonl").string() + ": cannot open");
    }
    CsvFile summary(spec.out_dir / "threshold_summary.csv",
                    "model,eps_star_rel,eps_c_rel,branch,rate_model_bps,collision,"
                    "mc_capacity_bps,mc_capacity_se_bps");
    ExperimentOutput out;
    const OptimizerConfig oc = optimizer_config_from(cfg);
    std::vector<ThresholdProblem> problems{ThresholdProblem::duty_cycle(s)};
    if (quant) {
        problems.push_back(ThresholdProblem{s, CapacityModel::mdp, quant});
    } else {
        out.summary.push_back("mdp model skipped: " + mdp_status);
    }
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const OptimizeResult r = optimize_threshold(problems[k], oc);
        SimConfig at = sim;
        at.eps = r.eps_star;
        at.seed = derive_seed(spec.seed, 1'000'000 + k);
        const SimReport rep = simulate(at);
        summary.row(r.model, r.eps_star / unit, r.eps_c / unit, r.branch, r.rate, r.collision,
                    rep.actual_capacity, rep.se_capacity);
        jsonl << r.diagnostics_json() << '\n';
        out.summary.push_back(r.model + ": eps*/sigma_w2=" + fmt(r.eps_star / unit, 8) +
                              " rate=" + fmt(r.rate) + " bps, simulated=" +
                              fmt(rep.actual_capacity) + " bps (" + r.branch + ")");
    }
    // Best simulated grid point among thresholds meeting the collision target.
    std::size_t best = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (collision_prob(s, grid[i]) <= params.P_bar_c() &&
            (best == rows.size() || rows[i].report.actual_capacity > rows[best].report.actual_capacity)) {
            best = i;
        }
    }
    if (best < rows.size()) {
        summary.row("mc-grid", grid_rel[best], kNaN, "grid", kNaN, collision_prob(s, grid[best]),
                    rows[best].report.actual_capacity, rows[best].report.se_capacity);
    }

    std::ofstream mc(spec.out_dir / "actual_capacity.csv");
    write_sweep_csv(mc, rows);
    jsonl.close();
    mc.close();
    if (!jsonl || !mc) {
        throw std::runtime_error(spec.out_dir.string() + ": write failed");
    }
    out.files = {sweep.close(), summary.close(), spec.out_dir / "optimizer.jsonl",
                 spec.out_dir / "actual_capacity.csv"};
    return out;
}

ExperimentOutput run_power_sweep(const ExperimentSpec& spec)
{
    prepare(spec);
    const Config& cfg = spec.config;
    const SystemParams base = params_from(cfg);
    const ChannelPair pair = pair_from(cfg);
    const auto powers = cfg.get_list("power.P_t", {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1});
    const int n_tau = static_cast<int>(cfg.get_int("n_tau", 64));
    const OptimizerConfig oc = optimizer_config_from(cfg);

    CsvFile csv(spec.out_dir / "power_sweep.csv",
                "P_t_W,gamma1,eps_star_duty_rel,rate_duty_bps,collision_duty,eps_star_mdp_rel,"
                "rate_mdp_bps,mc_capacity_bps,mc_capacity_se_bps,mdp_status");
    ExperimentOutput out;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        RawParams raw = base.raw();
        raw.P_t = powers[i];
        const SystemParams p = validate_params(raw);
        const Scenario s = Scenario::make(p, pair);
        const OptimizeResult duty = optimize_threshold(ThresholdProblem::duty_cycle(s), oc);
        std::string status;
        double eps_mdp = kNaN, rate_mdp = kNaN;
        if (const auto q = try_quantize(p, n_tau, status)) {
            const OptimizeResult m = optimize_threshold(ThresholdProblem{s, CapacityModel::mdp, q}, oc);
            eps_mdp = m.eps_star / p.sigma_w2();
            rate_mdp = m.rate;
        }
        SimConfig sim = sim_config_from(cfg, s, derive_seed(spec.seed, i));
        sim.eps = duty.eps_star;
        const SimReport rep = simulate(sim);
        std::string quoted = status;
        std::replace(quoted.begin(), quoted.end(), ',', ';');
        csv.row(powers[i], duty.gamma1, duty.eps_star / p.sigma_w2(), duty.rate, duty.collision,
                eps_mdp, rate_mdp, rep.actual_capacity, rep.se_capacity, '"' + quoted + '"');
        out.summary.push_back("P_t=" + fmt(powers[i]) + " W: duty rate=" + fmt(duty.rate) +
                              " bps, simulated=" + fmt(rep.actual_capacity) + " bps");
    }
    out.files = {csv.close()};
    return out;
}

ExperimentOutput run_mdp_check(const ExperimentSpec& spec)
{
    prepare(spec);
    const Config& cfg = spec.config;
    const SystemParams p = params_from(cfg);
    const Scenario s = Scenario::make(p, pair_from(cfg));
    const double eps = cfg.get_double("mdp.eps_rel", 1.05) * p.sigma_w2();
    std::vector<double> taus = cfg.get_list("mdp.n_tau_list", {2, 4, 8, 16, 32, 64});

    CsvFile csv(spec.out_dir / "mdp_check.csv",
                "n_tau,N_b,n_kappa,e_q_J,status,unique,max_abs_err,iterations,residual,P_a_exact,"
                "P_a_continuous,gamma2");
    ExperimentOutput out;
    const double cont = prob_active_mdp_continuous(s, eps);
    for (double t : taus) {
        const int n_tau = static_cast<int>(t);
        std::string status;
        const auto q = try_quantize(p, n_tau, status);
        if (!q) {
            std::replace(status.begin(), status.end(), ',', ';');
            csv.row(n_tau, kNaN, kNaN, kNaN, '"' + status + '"', kNaN, kNaN, kNaN, kNaN, kNaN,
                    cont, gamma2(s));
            out.summary.push_back("n_tau=" + std::to_string(n_tau) + ": " + status);
            continue;
        }
        const TransitionMatrix u = build_transition_matrix(*q, s, eps);
        const SteadyState closed = steady_state_closed_form(*q, s, eps);
        double err = kNaN, residual = kNaN;
        int iterations = 0;
        try {
            const SteadyState num = steady_state_numeric(u);
            err = (num.pi - closed.pi).cwiseAbs().maxCoeff();
            residual = num.residual;
            iterations = num.iterations;
        } catch (const NumericError& e) {
            status = e.what();
        }
        const bool unique = std::gcd(q->n_tau, q->n_kappa) == 1;
        csv.row(n_tau, q->n_b, q->n_kappa, q->e_q, status, unique ? 1 : 0, err, iterations,
                residual, prob_active_mdp(*q, s, eps), cont, gamma2(s));
        out.summary.push_back("n_tau=" + std::to_string(n_tau) + ": N_b=" + std::to_string(q->n_b) +
                              " n_kappa=" + std::to_string(q->n_kappa) +
                              " closed-vs-numeric max error=" + fmt(err, 3));
    }
    out.files = {csv.close()};

    if (cfg.get_int("mdp.dump", 0) != 0) {
        std::string status;
        if (const auto q = try_quantize(p, static_cast<int>(cfg.get_int("n_tau", 64)), status)) {
            const auto path = spec.out_dir / "mdp_U.csv";
            std::ofstream f(path);
            build_transition_matrix(*q, s, eps).write_csv(f);
            if (!f) {
                throw std::runtime_error(path.string() + ": write failed");
            }
            out.files.push_back(path);
        }
    }
    return out;
}

PipelineData build_pipeline_data(const Config& cfg, std::uint64_t seed)
{
    PipelineData d;
    d.profiles = profiles_from(cfg);
    if (d.profiles.empty()) {
        throw ValidationError("profile", "full-pipeline needs profile.* entries");
    }
    const int per_profile = static_cast<int>(cfg.get_int("pipeline.subchannels_per_profile", 10));
    const double duration = cfg.get_double("pipeline.duration", 120.0);
    const int points = static_cast<int>(cfg.get_int("pipeline.points_per_subchannel", 15));
    const int warmup = static_cast<int>(cfg.get_int("pipeline.warmup", 200));
    const double slot = params_from(cfg).T_slot();
    if (per_profile < 1 || points < 1) {
        throw ValidationError("pipeline", "subchannel and point counts must be >= 1");
    }

    std::vector<Eigen::RowVectorXd> rows;
    int id = 0;
    for (std::size_t p = 0; p < d.profiles.size(); ++p) {
        for (int j = 0; j < per_profile; ++j, ++id) {
            const PacketTrace trace =
                generate_trace(d.profiles[p], duration, derive_seed(seed, static_cast<std::uint64_t>(id)), id);
            d.subchannel_profile.push_back(static_cast<int>(p));
            d.subchannel_stats.push_back(estimate_channel_stats(trace, slot, d.profiles[p].bitrate));
            if (static_cast<int>(trace.packets.size()) < warmup + points) {
                throw ValidationError("pipeline.duration",
                                      "trace of profile " + d.profiles[p].name +
                                          " is too short for the warm-up and point count");
            }
            const FeatureMatrix f = extract_features(trace);
            for (Eigen::Index r = f.rows() - points; r < f.rows(); ++r) {
                rows.push_back(f.row(r));
                d.point_subchannel.push_back(id);
                d.point_truth.push_back(static_cast<int>(p));
            }
        }
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    d.features = standardize(x);
    return d;
}

PipelineOutcome evaluate_labels(const PipelineData& data, const std::vector<int>& point_labels,
                                const Config& cfg, std::uint64_t seed)
{
    if (point_labels.size() != data.point_truth.size()) {
        throw ValidationError("labels", "one label per feature row required");
    }
    const int n_sub = static_cast<int>(data.subchannel_stats.size());
    std::vector<std::map<int, int>> votes(n_sub);
    for (std::size_t i = 0; i < point_labels.size(); ++i) {
        ++votes[data.point_subchannel[i]][point_labels[i]];
    }
    std::vector<int> label(n_sub);
    for (int c = 0; c < n_sub; ++c) {
        int best = -1, best_votes = -1;
        for (const auto& [l, v] : votes[c]) {  // ascending label: ties keep the smallest
            if (v > best_votes) {
                best = l;
                best_votes = v;
            }
        }
        label[c] = best;
    }
    std::map<int, std::pair<double, double>> pooled;  // label -> (sum lambda, sum p_i)
    std::map<int, int> members;
    for (int c = 0; c < n_sub; ++c) {
        pooled[label[c]].first += data.subchannel_stats[c].lambda;
        pooled[label[c]].second += data.subchannel_stats[c].p_i;
        ++members[label[c]];
    }
    std::vector<SubchannelProfile> profiles;
    for (int c = 0; c < n_sub; ++c) {
        const int m = members[label[c]];
        const double p_i = pooled[label[c]].second / m;
        profiles.push_back({c, pooled[label[c]].first / m, p_i, 1.0 - p_i, label[c]});
    }

    PipelineOutcome o;
    o.accuracy = clustering_accuracy(point_labels, data.point_truth);
    o.k_plus = static_cast<int>(std::set<int>(point_labels.begin(), point_labels.end()).size());
    o.selection = select_channels(profiles, seed);
    o.p_i_h_model = profiles[o.selection.c_h].p_i;
    o.p_i_t_model = profiles[o.selection.c_t].p_i;
    o.p_i_h_true = data.subchannel_stats[o.selection.c_h].p_i;
    o.p_i_t_true = data.subchannel_stats[o.selection.c_t].p_i;

    const SystemParams params = params_from(cfg);
    const Scenario model = Scenario::make(params, ChannelPair::from_idle(o.p_i_h_model, o.p_i_t_model));
    const OptimizerConfig oc = optimizer_config_from(cfg);
    o.opt = optimize_threshold(ThresholdProblem::duty_cycle(model), oc);
    o.opt_mdp = optimize_threshold(
        ThresholdProblem::mdp(model, static_cast<int>(cfg.get_int("n_tau", 64))), oc);

    const Scenario truth = Scenario::make(params, ChannelPair::from_idle(o.p_i_h_true, o.p_i_t_true));
    SimConfig sim = sim_config_from(cfg, truth, seed);
    sim.eps = o.opt.eps_star;
    const SimReport rep = simulate(sim);
    o.mc_capacity = rep.actual_capacity;
    o.mc_capacity_se = rep.se_capacity;
    sim.eps = o.opt_mdp.eps_star;
    o.mc_capacity_mdp = simulate(sim).actual_capacity;
    return o;
}

ExperimentOutput run_full_pipeline(const ExperimentSpec& spec)
{
    prepare(spec);
    const Config& cfg = spec.config;
    const auto methods = split_list(cfg.get_string("pipeline.methods", "oracle,gibbs,vb,kmeans"));
    const int seeds = static_cast<int>(cfg.get_int("pipeline.seeds", 1));
    if (seeds < 1) {
        throw ValidationError("pipeline.seeds", "must be >= 1");
    }

    CsvFile sub(spec.out_dir / "subchannels.csv", "seed,subchannel_id,true_profile,lambda,p_i,p_o");
    CsvFile csv(spec.out_dir / "pipeline.csv",
                "seed,method,accuracy,k_plus,c_h,c_t,p_i_h_model,p_i_t_model,p_i_h_true,p_i_t_true,"
                "eps_star_rel,rate_model_bps,mc_capacity_bps,mc_capacity_se_bps,eps_star_mdp_rel,"
                "rate_mdp_bps,mc_capacity_mdp_bps");
    ExperimentOutput out;
    std::map<std::string, double> cap_sum;
    for (int j = 0; j < seeds; ++j) {
        const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(j));
        const PipelineData data = build_pipeline_data(cfg, seed);
        for (std::size_t c = 0; c < data.subchannel_stats.size(); ++c) {
            const auto& st = data.subchannel_stats[c];
            sub.row(j, c, data.profiles[data.subchannel_profile[c]].name, st.lambda, st.p_i, st.p_o);
        }
        for (const auto& m : methods) {
            const auto labels = cluster_labels(m, data.features, data.point_truth,
                                               static_cast<int>(data.profiles.size()), cfg, seed);
            const PipelineOutcome o = evaluate_labels(data, labels, cfg, seed);
            csv.row(j, m, o.accuracy, o.k_plus, o.selection.c_h, o.selection.c_t, o.p_i_h_model,
                    o.p_i_t_model, o.p_i_h_true, o.p_i_t_true,
                    o.opt.eps_star / params_from(cfg).sigma_w2(), o.opt.rate, o.mc_capacity,
                    o.mc_capacity_se, o.opt_mdp.eps_star / params_from(cfg).sigma_w2(),
                    o.opt_mdp.rate, o.mc_capacity_mdp);
            cap_sum[m] += o.mc_capacity;
        }
    }
    for (const auto& m : methods) {
        out.summary.push_back(m + ": mean simulated capacity=" + fmt(cap_sum[m] / seeds) + " bps");
    }
    out.files = {csv.close(), sub.close()};
    return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec)
{
    if (spec.name == "cluster-bench") {
        return run_cluster_bench(spec);
    }
    if (spec.name == "threshold-sweep") {
        return run_threshold_sweep(spec);
    }
    if (spec.name == "power-sweep") {
        return run_power_sweep(spec);
    }
    if (spec.name == "mdp-check") {
        return run_mdp_check(spec);
    }
    if (spec.name == "full-pipeline") {
        return run_full_pipeline(spec);
    }
    throw ValidationError("experiment", "unknown experiment '" + spec.name + "'");
}

}  // namespace rfcrn

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coolcn/engine.hpp"
#include "coolcn/graph.hpp"
#include "coolcn/harness.hpp"
#include "coolcn/manifest.hpp"
#include "coolcn/privacy.hpp"
#include "coolcn/svg.hpp"

using namespace coolcn;

namespace {

ExperimentConfig load_config(const std::string& path, bool full_scale) {
    ExperimentConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = parse_config(buf.str());
    }
    if (full_scale) cfg.apply_full_scale();
    cfg.validate();
    return cfg;
}

GraphTopology graph_from_flags(int complete, int path_n, int cycle, int er_n,
                               double er_p, std::uint64_t seed,
                               const std::string& file) {
    int picked = (complete > 0) + (path_n > 0) + (cycle > 0) + (er_n > 0) +
                 !file.empty();
    if (picked != 1)
        throw ConfigError("pick exactly one of --complete/--path/--cycle/--er/--file");
    if (complete > 0) return complete_graph(complete);
    if (path_n > 0) return path_graph(path_n);
    if (cycle > 0) return cycle_graph(cycle);
    if (er_n > 0) return erdos_renyi(er_n, er_p, seed);
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open graph file " + file);
    return read_edge_list(in);
}

int cmd_graph_stats(const GraphTopology& g, StatsMode mode) {
    GraphStats st = graph_stats(g, 16, mode);
    std::cout << "n=" << g.n() << " n_min=" << g.n_min()
              << " n_max=" << g.n_max() << "\n";
    std::cout << "alpha=" << st.alpha << " gamma=" << st.gamma
              << " alpha2=" << st.alpha2
              << (st.approximate ? " (greedy approximation)" : " (exact)")
              << "\n";
    if (st.regular_degree)
        std::cout << "regular, degree " << *st.regular_degree << "\n";
    else
        std::cout << "not regular\n";
    return 0;
}

struct SimulateArgs {
    std::string algo = "mtcool";
    std::string loss = "quadratic";
    double lambda = 5.0;
    double epsilon = std::numeric_limits<double>::infinity();
    bool per_agent = false;
};

int cmd_simulate(const ExperimentConfig& cfg, const SimulateArgs& args,
                 const std::string& out_dir) {
    if (args.algo == "dope" && args.loss != "linear")
        throw ConfigError(
            "the DP protocol supports linear losses only; rerun with "
            "--loss linear");

    RunManifest man;
    man.command = "simulate";
    man.config_json = serialize_config(cfg);
    man.master_seed = cfg.master_seed;
    for (const char* s : {"graph", "tasks", "activations", "losses", "noise/0"})
        record_child_seed(man, s);

    GraphTopology g =
        erdos_renyi(cfg.n, cfg.p, child_seed(cfg.master_seed, "graph"));
    TaskMatrix u = sample_task_matrix(g, args.lambda, cfg.d,
                                      child_seed(cfg.master_seed, "tasks"));
    std::vector<double> q(cfg.n, 1.0 / cfg.n);
    auto acts = draw_activations(
        StochasticSchedule{q, child_seed(cfg.master_seed, "activations")},
        cfg.T, cfg.n);
    Stream stream =
        args.loss == "linear"
            ? make_linear_stream(u, acts, cfg.loss_noise_std,
                                 child_seed(cfg.master_seed, "losses"))
            : make_quadratic_stream(u, acts, cfg.loss_noise_std,
                                    child_seed(cfg.master_seed, "losses"));
    TaskMatrix comp = best_in_hindsight(losses_by_agent(stream, cfg.n), cfg.d);
    double lips = args.loss == "linear" ? 1.0 : 2.0 + 3.0 * cfg.loss_noise_std;

    std::vector<StepRecord> traj;
    std::string dp_manifest;
    if (args.algo == "mtcool") {
        traj = run_mtcool(g, cfg.d, stream, q, lips);
    } else if (args.algo == "iftrl") {
        traj = run_iftrl(cfg.n, cfg.d, stream, lips);
    } else if (args.algo == "stftrl") {
        traj = run_stftrl(g, cfg.d, stream, lips);
    } else if (args.algo == "dope") {
        DopeNetworkState net(g, make_weights(g, WeightScheme::Uniform), cfg.d,
                             cfg.T, args.epsilon,
                             child_seed(cfg.master_seed, "noise/0"));
        traj = net.run(stream);
        dp_manifest = net.manifest();
    } else {
        throw ConfigError("unknown algorithm \"" + args.algo +
                          "\" (mtcool, iftrl, stftrl, dope)");
    }

    RegretLedger ledger = multitask_regret(traj, stream, comp);
    ledger.sigma_bar = variance_profile(u, g).sigma_bar();

    emit_file(man, out_dir, "trajectory.csv",
              trajectory_csv(traj, ledger, args.per_agent, cfg.n));
    nlohmann::json summary;
    summary["algo"] = args.algo;
    summary["loss"] = args.loss;
    summary["lambda"] = args.lambda;
    summary["final_regret"] = ledger.final_regret();
    summary["sigma_bar"] = ledger.sigma_bar;
    summary["stream_hash"] = stream_hash(stream);
    if (!dp_manifest.empty())
        summary["dp"] = nlohmann::json::parse(dp_manifest);
    emit_file(man, out_dir, "summary.json", summary.dump(2) + "\n");
    std::ofstream mf(out_dir + "/manifest.json", std::ios::binary);
    mf << serialize_manifest(man);
    std::cout << "final multitask regret: " << ledger.final_regret() << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunManifest man;
    man.command = "sweep";
    man.config_json = serialize_config(cfg);
    man.master_seed = cfg.master_seed;

    auto rows = run_lambda_sweep(cfg);
    emit_file(man, out_dir, "sweep.csv", sweep_csv(rows));

    // Per-algorithm mean final regret vs mean realized sigma_bar per lambda.
    std::map<std::string, SvgSeries> series;
    for (size_t li = 0; li < cfg.lambdas.size(); ++li) {
        std::map<std::string, std::vector<double>> finals;
        std::vector<double> sbs;
        for (const auto& r : rows) {
            if (r.lambda != cfg.lambdas[li]) continue;
            finals[r.algo].push_back(r.final_regret);
            if (r.algo == "mtcool") sbs.push_back(r.sigma_bar);
        }
        double sb = mean_se(sbs).first;
        for (auto& [algo, xs] : finals) {
            auto [m, se] = mean_se(xs);
            auto& s = series[algo];
            s.name = algo;
            s.x.push_back(sb);
            s.y.push_back(m);
            s.se.push_back(se);
        }
    }
    std::vector<SvgSeries> list;
    for (auto& [_, s] : series) {
        // Sort each polyline by x so the chart reads left to right.
        std::vector<size_t> idx(s.x.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](size_t a, size_t b) { return s.x[a] < s.x[b]; });
        SvgSeries sorted{s.name, {}, {}, {}};
        for (size_t i : idx) {
            sorted.x.push_back(s.x[i]);
            sorted.y.push_back(s.y[i]);
            sorted.se.push_back(s.se[i]);
        }
        list.push_back(std::move(sorted));
    }
    emit_file(man, out_dir, "sweep.svg",
              render_chart(list, "sigma_bar", "mean final regret"));
    std::ofstream mf(out_dir + "/manifest.json", std::ios::binary);
    mf << serialize_manifest(man);
    std::cout << "sweep: " << rows.size() << " rows -> " << out_dir << "\n";
    return 0;
}

int cmd_curves(const ExperimentConfig& cfg, long stride,
               const std::string& out_dir) {
    RunManifest man;
    man.command = "curves";
    man.config_json = serialize_config(cfg);
    man.master_seed = cfg.master_seed;

    RegretCurves res = run_regret_curves(cfg, stride);
    emit_file(man, out_dir, "curves.csv", curves_csv(res));

    std::map<std::string, SvgSeries> series;
    for (const auto& p : res.points) {
        auto& s = series[p.algo];
        s.name = p.algo;
        s.x.push_back(static_cast<double>(p.t));
        s.y.push_back(p.mean);
        s.se.push_back(p.se);
    }
    std::vector<SvgSeries> list;
    for (auto& [_, s] : series) list.push_back(std::move(s));
    emit_file(man, out_dir, "curves.svg",
              render_chart(list, "t", "mean multitask regret"));
    std::ofstream mf(out_dir + "/manifest.json", std::ios::binary);
    mf << serialize_manifest(man);
    std::cout << "curves written to " << out_dir << "\n";
    return 0;
}

int cmd_dp_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunManifest man;
    man.command = "dp-sweep";
    man.config_json = serialize_config(cfg);
    man.master_seed = cfg.master_seed;

    DpSweepResult res = run_dp_sweep(cfg);
    emit_file(man, out_dir, "dp_sweep.csv", dp_sweep_csv(res));
    std::ofstream mf(out_dir + "/manifest.json", std::ios::binary);
    mf << serialize_manifest(man);
    if (res.crossover_epsilon)
        std::cout << "crossover: i-FTRL beats the DP protocol at epsilon <= "
                  << *res.crossover_epsilon << "\n";
    else
        std::cout << "no crossover in the configured epsilon range\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized multitask online learning simulator"};
    app.require_subcommand(1);

    // graph-stats
    auto* gs = app.add_subcommand("graph-stats", "graph diagnostics");
    int complete = 0, path_n = 0, cycle = 0, er_n = 0;
    double er_p = 0.5;
    std::uint64_t gseed = 1;
    std::string gfile, mode_str = "auto";
    gs->add_option("--complete", complete, "complete graph on N vertices");
    gs->add_option("--path", path_n, "path graph on N vertices");
    gs->add_option("--cycle", cycle, "cycle graph on N vertices");
    gs->add_option("--er", er_n, "Erdos-Renyi vertex count");
    gs->add_option("--p", er_p, "Erdos-Renyi edge probability");
    gs->add_option("--seed", gseed, "graph seed");
    gs->add_option("--file", gfile, "edge-list file");
    gs->add_option("--mode", mode_str, "exact | greedy | auto");

    // common experiment flags
    std::string config_path, out_dir = "out";
    bool full_scale = false;

    auto* sim = app.add_subcommand("simulate", "run one experiment cell");
    SimulateArgs sargs;
    sim->add_option("--config", config_path, "config JSON file");
    sim->add_option("--algo", sargs.algo, "mtcool | iftrl | stftrl | dope");
    sim->add_option("--loss", sargs.loss, "quadratic | linear");
    sim->add_option("--lambda", sargs.lambda, "task-smoothness lambda");
    sim->add_option("--epsilon", sargs.epsilon, "DP budget (dope only)");
    sim->add_flag("--per-agent", sargs.per_agent, "per-agent regret columns");
    sim->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "lambda sweep at fixed horizon");
    sweep->add_option("--config", config_path, "config JSON file");
    sweep->add_flag("--full-scale", full_scale, "T=150000, 48 seeds");
    sweep->add_option("--out", out_dir, "output directory");

    auto* curves = app.add_subcommand("curves", "regret-vs-time comparison");
    long stride = 100;
    curves->add_option("--config", config_path, "config JSON file");
    curves->add_flag("--full-scale", full_scale, "T=150000, 48 seeds");
    curves->add_option("--stride", stride, "curve sampling stride");
    curves->add_option("--out", out_dir, "output directory");

    auto* dps = app.add_subcommand("dp-sweep", "epsilon sweep of the DP protocol");
    dps->add_option("--config", config_path, "config JSON file");
    dps->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gs->parsed()) {
            StatsMode mode = StatsMode::Auto;
            if (mode_str == "exact") mode = StatsMode::Exact;
            else if (mode_str == "greedy") mode = StatsMode::Greedy;
            else if (mode_str != "auto")
                throw ConfigError("unknown stats mode \"" + mode_str + "\"");
            return cmd_graph_stats(
                graph_from_flags(complete, path_n, cycle, er_n, er_p, gseed,
                                 gfile),
                mode);
        }
        ExperimentConfig cfg = load_config(config_path, full_scale);
        if (sim->parsed()) return cmd_simulate(cfg, sargs, out_dir);
        if (sweep->parsed()) return cmd_sweep(cfg, out_dir);
        if (curves->parsed()) return cmd_curves(cfg, stride, out_dir);
        if (dps->parsed()) return cmd_dp_sweep(cfg, out_dir);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

#include "coolcn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "coolcn/clique.hpp"
#include "coolcn/privacy.hpp"
#include "coolcn/rng.hpp"
#include "coolcn/weights.hpp"

namespace coolcn {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Worst-case gradient norm of the noisy quadratic losses (unit-ball iterates
// against centers near the unit ball), used as the KT bound.
double quadratic_lipschitz(double noise_std) { return 2.0 + 3.0 * noise_std; }

std::string cell_tag(const char* what, size_t li, int seed) {
    return std::string(what) + "/" + std::to_string(li) + "/" +
           std::to_string(seed);
}

}  // namespace

void ExperimentConfig::apply_full_scale() {
    T = 150000;
    seeds = 48;
}

void ExperimentConfig::validate() const {
    if (n < 1) throw ConfigError("config: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw ConfigError("config: p must be in [0, 1]");
    if (d < 1) throw ConfigError("config: d must be >= 1");
    if (T < 1) throw ConfigError("config: T must be >= 1");
    if (seeds < 1) throw ConfigError("config: seeds must be >= 1");
    if (noise_seeds < 1) throw ConfigError("config: noise_seeds must be >= 1");
    if (loss_noise_std < 0.0)
        throw ConfigError("config: loss_noise_std must be >= 0");
    if (lambdas.empty()) throw ConfigError("config: lambdas must be non-empty");
    for (double l : lambdas)
        if (l < 0.0) throw ConfigError("config: lambdas must be >= 0");
    for (double e : epsilons)
        if (!(e > 0.0)) throw ConfigError("config: epsilons must be positive");
}

ExperimentConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    bool full_scale = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        try {
            if (k == "n") cfg.n = it->get<int>();
            else if (k == "p") cfg.p = it->get<double>();
            else if (k == "d") cfg.d = it->get<int>();
            else if (k == "lambdas") cfg.lambdas = it->get<std::vector<double>>();
            else if (k == "T") cfg.T = it->get<long>();
            else if (k == "seeds") cfg.seeds = it->get<int>();
            else if (k == "loss_noise_std") cfg.loss_noise_std = it->get<double>();
            else if (k == "epsilons") cfg.epsilons = it->get<std::vector<double>>();
            else if (k == "noise_seeds") cfg.noise_seeds = it->get<int>();
            else if (k == "master_seed") cfg.master_seed = it->get<std::uint64_t>();
            else if (k == "output_dir") cfg.output_dir = it->get<std::string>();
            else if (k == "full_scale") full_scale = it->get<bool>();
            else throw ConfigError("config: unknown field \"" + k + "\"");
        } catch (const nlohmann::json::type_error&) {
            throw ConfigError("config: field \"" + k + "\" has the wrong type");
        }
    }
    if (full_scale) cfg.apply_full_scale();
    cfg.validate();
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["p"] = cfg.p;
    j["d"] = cfg.d;
    j["lambdas"] = cfg.lambdas;
    j["T"] = cfg.T;
    j["seeds"] = cfg.seeds;
    j["loss_noise_std"] = cfg.loss_noise_std;
    j["epsilons"] = cfg.epsilons;
    j["noise_seeds"] = cfg.noise_seeds;
    j["master_seed"] = cfg.master_seed;
    j["output_dir"] = cfg.output_dir;
    j["full_scale"] = false;  // scale already materialized into T and seeds
    return j.dump(2);
}

std::vector<double> RegretLedger::per_agent_final(int n) const {
    std::vector<double> out(n, 0.0);
    for (size_t t = 0; t < step_terms.size(); ++t) out[active[t]] += step_terms[t];
    return out;
}

RegretLedger multitask_regret(const std::vector<StepRecord>& trajectory,
                              const Stream& stream,
                              const TaskMatrix& comparator) {
    if (trajectory.size() != stream.size())
        throw std::invalid_argument("trajectory / stream length mismatch");
    RegretLedger ledger;
    ledger.active.reserve(trajectory.size());
    ledger.step_terms.reserve(trajectory.size());
    ledger.cumulative.reserve(trajectory.size());
    double cum = 0.0;
    for (size_t t = 0; t < trajectory.size(); ++t) {
        const auto& rec = trajectory[t];
        double term =
            rec.loss_value - stream[t].loss.value(comparator.row(rec.active));
        cum += term;
        ledger.active.push_back(rec.active);
        ledger.step_terms.push_back(term);
        ledger.cumulative.push_back(cum);
    }
    return ledger;
}

Stream make_quadratic_stream(const TaskMatrix& u,
                             const std::vector<int>& activations,
                             double noise_std, std::uint64_t seed) {
    Rng rng(seed);
    Stream stream;
    stream.reserve(activations.size());
    for (int a : activations)
        stream.push_back(
            {a, Loss::quadratic(sample_loss_center(u, a, noise_std, rng))});
    return stream;
}

Stream make_linear_stream(const TaskMatrix& u,
                          const std::vector<int>& activations,
                          double noise_std, std::uint64_t seed) {
    Rng rng(seed);
    Stream stream;
    stream.reserve(activations.size());
    for (int a : activations) {
        Eigen::VectorXd v = -sample_loss_center(u, a, noise_std, rng);
        double norm = v.norm();
        if (norm > 1.0) v /= norm;
        stream.push_back({a, Loss::linear(std::move(v))});
    }
    return stream;
}

std::vector<StepRecord> run_iftrl(int n, int d, const Stream& stream,
                                  double raw_lipschitz) {
    GraphTopology g = empty_graph(n);
    EngineOptions opt;
    opt.adaptivity = Adaptivity::KT;
    opt.raw_lipschitz = raw_lipschitz;
    opt.record_messages = false;
    NetworkState net(g, make_weights(g, WeightScheme::Uniform), d, opt);
    return net.run(stream);
}

std::vector<StepRecord> run_stftrl(const GraphTopology& g, int d,
                                   const Stream& stream, double raw_lipschitz) {
    CliqueOptions co;
    co.adaptivity = Adaptivity::KT;
    co.lipschitz = raw_lipschitz;
    std::vector<CliqueLearner> models(g.n(), CliqueLearner(1, d, co));
    std::vector<StepRecord> traj;
    traj.reserve(stream.size());
    long t = 0;
    for (const auto& e : stream) {
        StepRecord rec;
        rec.t = ++t;
        rec.active = e.active;
        rec.prediction = models[e.active].predict(0);
        rec.loss_value = e.loss.value(rec.prediction);
        rec.gradient = subgradient(e.loss, rec.prediction);
        // Every neighbor re-evaluates the loss oracle at its own iterate.
        for (int j : g.neighborhood(e.active))
            models[j].update(0, subgradient(e.loss, models[j].predict(0)));
        traj.push_back(std::move(rec));
    }
    return traj;
}

std::vector<StepRecord> run_mtcool(const GraphTopology& g, int d,
                                   const Stream& stream,
                                   const std::vector<double>& q,
                                   double raw_lipschitz) {
    EngineOptions opt;
    opt.adaptivity = Adaptivity::KT;
    opt.raw_lipschitz = raw_lipschitz;
    opt.beta_mode = BetaMode::StochasticKnownQ;
    opt.q = q;
    opt.record_messages = false;
    NetworkState net(g, make_weights(g, WeightScheme::Uniform), d, opt);
    return net.run(stream);
}

namespace {

struct Cell {
    GraphTopology graph;
    TaskMatrix tasks;
    Stream stream;
    TaskMatrix comparator;
    double sigma_bar;
};

Cell draw_cell(const ExperimentConfig& cfg, double lambda, size_t li, int seed) {
    GraphTopology g = erdos_renyi(
        cfg.n, cfg.p, child_seed(cfg.master_seed, cell_tag("graph", li, seed)));
    TaskMatrix u = sample_task_matrix(
        g, lambda, cfg.d,
        child_seed(cfg.master_seed, cell_tag("tasks", li, seed)));
    std::vector<double> q(cfg.n, 1.0 / cfg.n);
    auto acts = draw_activations(
        StochasticSchedule{q, child_seed(cfg.master_seed,
                                         cell_tag("activations", li, seed))},
        cfg.T, cfg.n);
    Stream stream = make_quadratic_stream(
        u, acts, cfg.loss_noise_std,
        child_seed(cfg.master_seed, cell_tag("losses", li, seed)));
    TaskMatrix comp = best_in_hindsight(losses_by_agent(stream, cfg.n), cfg.d);
    double sb = variance_profile(u, g).sigma_bar();
    return {std::move(g), std::move(u), std::move(stream), std::move(comp), sb};
}

double final_regret_of(const std::vector<StepRecord>& traj, const Cell& cell) {
    return multitask_regret(traj, cell.stream, cell.comparator).final_regret();
}

}  // namespace

std::vector<SweepRow> run_lambda_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const double lips = quadratic_lipschitz(cfg.loss_noise_std);
    std::vector<double> q(cfg.n, 1.0 / cfg.n);
    std::vector<SweepRow> rows;
    for (size_t li = 0; li < cfg.lambdas.size(); ++li) {
        for (int seed = 0; seed < cfg.seeds; ++seed) {
            Cell cell = draw_cell(cfg, cfg.lambdas[li], li, seed);
            // All three contenders consume the identical stream.
            std::uint64_t h = stream_hash(cell.stream);
            double r_i = final_regret_of(
                run_iftrl(cfg.n, cfg.d, cell.stream, lips), cell);
            double r_s = final_regret_of(
                run_stftrl(cell.graph, cfg.d, cell.stream, lips), cell);
            double r_m = final_regret_of(
                run_mtcool(cell.graph, cfg.d, cell.stream, q, lips), cell);
            if (stream_hash(cell.stream) != h)
                throw std::logic_error("shared stream was mutated during a cell");
            rows.push_back({cfg.lambdas[li], cell.sigma_bar, "iftrl", seed, r_i});
            rows.push_back({cfg.lambdas[li], cell.sigma_bar, "stftrl", seed, r_s});
            rows.push_back({cfg.lambdas[li], cell.sigma_bar, "mtcool", seed, r_m});
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "lambda,sigma_bar,algo,seed,final_regret\n";
    for (const auto& r : rows)
        out << fmt17(r.lambda) << "," << fmt17(r.sigma_bar) << "," << r.algo
            << "," << r.seed << "," << fmt17(r.final_regret) << "\n";
    return out.str();
}

RegretCurves run_regret_curves(const ExperimentConfig& cfg, long stride) {
    cfg.validate();
    if (stride < 1) throw ConfigError("config: stride must be >= 1");
    const double lips = quadratic_lipschitz(cfg.loss_noise_std);
    const double target_sigma_bar = 0.08;
    std::vector<double> q(cfg.n, 1.0 / cfg.n);

    RegretCurves res;
    std::vector<long> ts;
    for (long t = stride; t <= cfg.T; t += stride) ts.push_back(t);
    const char* algos[3] = {"iftrl", "stftrl", "mtcool"};
    // curves[a][k][seed]
    std::vector<std::vector<std::vector<double>>> curves(
        3, std::vector<std::vector<double>>(ts.size()));

    for (int seed = 0; seed < cfg.seeds; ++seed) {
        // Pick the lambda whose realized task spread lands nearest the
        // operating point, then run the comparison on that draw. Cells whose
        // tasks collapsed to (near-)identical rows are the zero-spread
        // control, not a multitask operating point, so they only win the
        // pick when nothing else is available.
        size_t best_li = 0;
        double best_gap = std::numeric_limits<double>::infinity();
        bool best_degenerate = true;
        for (size_t li = 0; li < cfg.lambdas.size(); ++li) {
            GraphTopology g = erdos_renyi(
                cfg.n, cfg.p,
                child_seed(cfg.master_seed, cell_tag("graph", li, seed)));
            TaskMatrix u = sample_task_matrix(
                g, cfg.lambdas[li], cfg.d,
                child_seed(cfg.master_seed, cell_tag("tasks", li, seed)));
            double sb = variance_profile(u, g).sigma_bar();
            double gap = std::abs(sb - target_sigma_bar);
            bool degenerate = sb < 0.02;
            if ((best_degenerate && !degenerate) ||
                (degenerate == best_degenerate && gap < best_gap)) {
                best_gap = gap;
                best_li = li;
                best_degenerate = degenerate;
            }
        }
        res.lambda_star.push_back(cfg.lambdas[best_li]);
        Cell cell = draw_cell(cfg, cfg.lambdas[best_li], best_li, seed);
        std::vector<std::vector<StepRecord>> trajs;
        trajs.push_back(run_iftrl(cfg.n, cfg.d, cell.stream, lips));
        trajs.push_back(run_stftrl(cell.graph, cfg.d, cell.stream, lips));
        trajs.push_back(run_mtcool(cell.graph, cfg.d, cell.stream, q, lips));
        for (int a = 0; a < 3; ++a) {
            RegretLedger led =
                multitask_regret(trajs[a], cell.stream, cell.comparator);
            for (size_t k = 0; k < ts.size(); ++k)
                curves[a][k].push_back(led.cumulative[ts[k] - 1]);
        }
    }
    for (int a = 0; a < 3; ++a)
        for (size_t k = 0; k < ts.size(); ++k) {
            auto [m, se] = mean_se(curves[a][k]);
            res.points.push_back({ts[k], algos[a], m, se});
        }
    return res;
}

std::string curves_csv(const RegretCurves& res) {
    std::ostringstream out;
    out << "t,algo,mean_regret,se\n";
    for (const auto& p : res.points)
        out << p.t << "," << p.algo << "," << fmt17(p.mean) << ","
            << fmt17(p.se) << "\n";
    return out.str();
}

DpSweepResult run_dp_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.T < 2) throw ConfigError("config: DP sweeps need T >= 2");
    // One fixed linear stream; the only randomness swept over is the noise.
    double lambda = cfg.lambdas[cfg.lambdas.size() / 2];
    GraphTopology g =
        erdos_renyi(cfg.n, cfg.p, child_seed(cfg.master_seed, "graph/dp"));
    TaskMatrix u = sample_task_matrix(g, lambda, cfg.d,
                                      child_seed(cfg.master_seed, "tasks/dp"));
    std::vector<double> q(cfg.n, 1.0 / cfg.n);
    auto acts = draw_activations(
        StochasticSchedule{q, child_seed(cfg.master_seed, "activations/dp")},
        cfg.T, cfg.n);
    Stream stream = make_linear_stream(u, acts, cfg.loss_noise_std,
                                       child_seed(cfg.master_seed, "losses/dp"));
    TaskMatrix comp = best_in_hindsight(losses_by_agent(stream, cfg.n), cfg.d);
    WeightMatrix w = make_weights(g, WeightScheme::Uniform);

    DpSweepResult res;
    res.iftrl_regret =
        multitask_regret(run_iftrl(cfg.n, cfg.d, stream, 1.0), stream, comp)
            .final_regret();

    std::vector<double> eps = cfg.epsilons;
    std::sort(eps.begin(), eps.end());
    eps.push_back(std::numeric_limits<double>::infinity());
    for (double e : eps) {
        std::vector<double> finals;
        int reps = std::isinf(e) ? 1 : cfg.noise_seeds;  // no noise at infinity
        for (int k = 0; k < reps; ++k) {
            DopeNetworkState net(
                g, w, cfg.d, cfg.T, e,
                child_seed(cfg.master_seed, "noise/" + std::to_string(k)));
            finals.push_back(
                multitask_regret(net.run(stream), stream, comp).final_regret());
        }
        auto [m, se] = mean_se(finals);
        res.rows.push_back({e, m, se});
    }
    // Flag the largest epsilon at which the no-communication baseline wins.
    for (const auto& r : res.rows)
        if (res.iftrl_regret < r.mean_regret &&
            (!res.crossover_epsilon || r.epsilon > *res.crossover_epsilon) &&
            !std::isinf(r.epsilon))
            res.crossover_epsilon = r.epsilon;
    return res;
}

std::string dp_sweep_csv(const DpSweepResult& res) {
    std::ostringstream out;
    out << "epsilon,mean_regret,se,iftrl_regret\n";
    for (const auto& r : res.rows) {
        if (std::isinf(r.epsilon)) out << "inf";
        else out << fmt17(r.epsilon);
        out << "," << fmt17(r.mean_regret) << "," << fmt17(r.se) << ","
            << fmt17(res.iftrl_regret) << "\n";
    }
    return out.str();
}

std::string trajectory_csv(const std::vector<StepRecord>& trajectory,
                           const RegretLedger& ledger, bool per_agent_columns,
                           int n) {
    std::ostringstream out;
    out << "t,active,loss,cum_multitask_regret";
    if (per_agent_columns)
        for (int i = 0; i < n; ++i) out << ",agent_" << i;
    out << "\n";
    std::vector<double> per_agent(per_agent_columns ? n : 0, 0.0);
    for (size_t t = 0; t < trajectory.size(); ++t) {
        const auto& rec = trajectory[t];
        out << rec.t << "," << rec.active << "," << fmt17(rec.loss_value) << ","
            << fmt17(ledger.cumulative[t]);
        if (per_agent_columns) {
            per_agent[rec.active] += ledger.step_terms[t];
            for (int i = 0; i < n; ++i) out << "," << fmt17(per_agent[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::pair<double, double> mean_se(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double m = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    if (xs.size() == 1) return {m, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (xs.size() - 1) / xs.size())};
}

namespace {
std::vector<double> ranks(const std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + j) / 2.0 + 1.0;  // average tie rank
        for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}
}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman needs two equal-length series");
    auto rx = ranks(x), ry = ranks(y);
    auto [mx, _sx] = mean_se(rx);
    auto [my, _sy] = mean_se(ry);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

}  // namespace coolcn

#include "coolcn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coolcn {

double max_incoming_weight(const GraphTopology& g, const WeightMatrix& w, int j) {
    double m = 0.0;
    for (int i : g.neighborhood(j)) m = std::max(m, w(i, j));
    return m;
}

double derive_beta_scale(const GraphTopology& g, const WeightMatrix& w, int j,
                         BetaMode mode, const std::vector<double>* q) {
    if (mode == BetaMode::Adversarial) return max_incoming_weight(g, w, j);
    if (!q) throw std::invalid_argument("stochastic beta_scale needs q");
    double big_q = neighborhood_activation_mass(g, *q, j);
    if (big_q <= 0.0) return 0.0;
    double s = 0.0;
    for (int i : g.neighborhood(j)) s += ((*q)[i] / big_q) * w(i, j) * w(i, j);
    return std::sqrt(s);
}

namespace {

CliqueLearner build_clique(const GraphTopology& g, const WeightMatrix& w, int j,
                           int d, const EngineOptions& opt,
                           double beta_scale_override = -1.0) {
    CliqueOptions co;
    co.adaptivity = opt.adaptivity;
    co.exact_projection = opt.exact_projection;
    double max_w = max_incoming_weight(g, w, j);
    // A clique that never receives weight only ever sees zero gradients;
    // any positive bound works there.
    co.lipschitz = max_w > 0.0 ? max_w * opt.raw_lipschitz : opt.raw_lipschitz;
    if (beta_scale_override >= 0.0) {
        co.beta_scale = beta_scale_override;
    } else if (opt.beta_scales) {
        co.beta_scale = (*opt.beta_scales)[j];
    } else {
        co.beta_scale = derive_beta_scale(
            g, w, j, opt.beta_mode, opt.q ? &*opt.q : nullptr);
    }
    return CliqueLearner(static_cast<int>(g.neighborhood(j).size()), d, co);
}

}  // namespace

NetworkState::NetworkState(GraphTopology g, WeightMatrix w, int d,
                           EngineOptions opt)
    : graph_(std::move(g)),
      weights_(std::move(w)),
      d_(d),
      record_messages_(opt.record_messages) {
    if (weights_.n() != graph_.n())
        throw std::invalid_argument("weights / graph size mismatch");
    if (opt.beta_mode == BetaMode::StochasticKnownQ &&
        (!opt.q || static_cast<int>(opt.q->size()) != graph_.n()))
        throw std::invalid_argument("stochastic beta mode needs q of length n");
    if (opt.beta_scales && static_cast<int>(opt.beta_scales->size()) != graph_.n())
        throw std::invalid_argument("beta_scales override has wrong length");
    cliques_.reserve(graph_.n());
    for (int j = 0; j < graph_.n(); ++j)
        cliques_.push_back(build_clique(graph_, weights_, j, d_, opt));
}

int NetworkState::local_index(int j, int i) const {
    const auto& nb = graph_.neighborhood(j);
    auto it = std::lower_bound(nb.begin(), nb.end(), i);
    if (it == nb.end() || *it != i)
        throw std::out_of_range("agent not in the clique's neighborhood");
    return static_cast<int>(it - nb.begin());
}

Eigen::VectorXd NetworkState::model_row(int j, int i) const {
    return cliques_[j].predict(local_index(j, i));
}

StepRecord NetworkState::step(const StreamEntry& entry) {
    const int i = entry.active;
    if (i < 0 || i >= graph_.n())
        throw std::out_of_range("active agent index out of range");
    StepRecord rec;
    rec.t = ++global_t_;
    rec.active = i;
    rec.prediction = Eigen::VectorXd::Zero(d_);
    for (int j : graph_.neighborhood(i)) {
        Eigen::VectorXd row = model_row(j, i);
        rec.prediction += weights_(i, j) * row;
        if (record_messages_) rec.fetched.emplace_back(j, std::move(row));
    }
    rec.loss_value = entry.loss.value(rec.prediction);
    rec.gradient = subgradient(entry.loss, rec.prediction);
    max_gradient_norm_ = std::max(max_gradient_norm_, rec.gradient.norm());
    for (int j : graph_.neighborhood(i)) {
        Eigen::VectorXd payload = weights_(i, j) * rec.gradient;
        cliques_[j].update(local_index(j, i), payload);
        if (record_messages_) rec.sent.emplace_back(j, std::move(payload));
    }
    return rec;
}

std::vector<StepRecord> NetworkState::run(const Stream& stream) {
    std::vector<StepRecord> traj;
    traj.reserve(stream.size());
    for (const auto& e : stream) traj.push_back(step(e));
    return traj;
}

long two_phase_tau(double q_min_lower_bound, int n, long T, double tau_constant) {
    if (q_min_lower_bound <= 0.0 || q_min_lower_bound > 1.0)
        throw std::invalid_argument("q_min lower bound must be in (0, 1]");
    return static_cast<long>(std::ceil(
        (tau_constant / q_min_lower_bound) *
        std::log(2.0 * static_cast<double>(n) * n * static_cast<double>(T))));
}

TwoPhaseResult two_phase_unknown_q(const GraphTopology& g, const WeightMatrix& w,
                                   int d, const Stream& stream,
                                   double q_min_lower_bound, EngineOptions opt,
                                   TwoPhaseOptions tp) {
    const int n = g.n();
    const long T = static_cast<long>(stream.size());
    const long tau = two_phase_tau(q_min_lower_bound, n, T, tp.tau_constant);
    if (tau >= T)
        throw std::invalid_argument("horizon too short for the warm-up phase");

    TwoPhaseResult res;
    res.tau = tau;
    res.pi_hat = Eigen::MatrixXd::Zero(n, n);
    res.beta_scales.assign(n, 0.0);
    res.trajectory.reserve(T);

    std::vector<long> warm_t(n, 0);
    std::vector<std::vector<long>> counts(n, std::vector<long>(n, 0));
    // Cliques come into existence only once their owner finishes warm-up;
    // until then the owner's model rows are identically zero.
    std::vector<std::optional<CliqueLearner>> cliques(n);

    long t = 0;
    for (const auto& entry : stream) {
        const int i = entry.active;
        StepRecord rec;
        rec.t = ++t;
        rec.active = i;
        rec.prediction = Eigen::VectorXd::Zero(d);
        for (int j : g.neighborhood(i))
            rec.fetched.emplace_back(j, Eigen::VectorXd::Zero(d));
        // Real rows exist only for owners past their warm-up; the rest stay
        // at the zero model.
        for (auto& [j, row] : rec.fetched) {
            if (!cliques[j]) continue;
            const auto& nb = g.neighborhood(j);
            int li = static_cast<int>(
                std::lower_bound(nb.begin(), nb.end(), i) - nb.begin());
            row = cliques[j]->predict(li);
            rec.prediction += w(i, j) * row;
        }
        rec.loss_value = entry.loss.value(rec.prediction);
        rec.gradient = subgradient(entry.loss, rec.prediction);
        for (int j : g.neighborhood(i)) {
            const auto& nb = g.neighborhood(j);
            int li = static_cast<int>(
                std::lower_bound(nb.begin(), nb.end(), i) - nb.begin());
            if (!cliques[j]) {
                ++counts[j][i];
                if (++warm_t[j] == tau) {
                    double s = 0.0;
                    for (int k : nb) {
                        res.pi_hat(k, j) =
                            static_cast<double>(counts[j][k]) / tau;
                        s += res.pi_hat(k, j) * w(k, j) * w(k, j);
                    }
                    res.beta_scales[j] = std::sqrt(s);
                    EngineOptions local = opt;
                    local.beta_scales.reset();
                    local.q.reset();
                    local.beta_mode = BetaMode::Adversarial;
                    cliques[j] = build_clique(g, w, j, d, local,
                                              res.beta_scales[j]);
                }
            } else {
                Eigen::VectorXd payload = w(i, j) * rec.gradient;
                cliques[j]->update(li, payload);
                rec.sent.emplace_back(j, std::move(payload));
            }
        }
        res.trajectory.push_back(std::move(rec));
    }
    return res;
}

}  // namespace coolcn

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/clique.hpp"
#include "coolcn/graph.hpp"
#include "coolcn/loss.hpp"
#include "coolcn/schedule.hpp"
#include "coolcn/weights.hpp"

namespace coolcn {

// How each clique's beta_scale is derived from the weights.
enum class BetaMode { Adversarial, StochasticKnownQ };

struct EngineOptions {
    Adaptivity adaptivity = Adaptivity::Hedge;
    bool exact_projection = false;
    // Bound on the raw (unweighted) gradient norms; the per-clique KT bound
    // is this times the largest incoming weight.
    double raw_lipschitz = 1.0;
    BetaMode beta_mode = BetaMode::Adversarial;
    std::optional<std::vector<double>> q;  // required for StochasticKnownQ
    // Overrides the derived beta_scale per agent when set.
    std::optional<std::vector<double>> beta_scales;
    // Large sweeps turn this off to skip storing per-step message payloads.
    bool record_messages = true;
};

// One protocol round: who was active, what was exchanged, what it cost.
struct StepRecord {
    long t;
    int active;
    std::vector<std::pair<int, Eigen::VectorXd>> fetched;  // (neighbor, model row)
    Eigen::VectorXd prediction;
    double loss_value;
    Eigen::VectorXd gradient;
    std::vector<std::pair<int, Eigen::VectorXd>> sent;  // (neighbor, weighted grad)
};

// Largest incoming weight of clique j (the bound on its fed gradients).
double max_incoming_weight(const GraphTopology& g, const WeightMatrix& w, int j);

// beta_scale for clique j under the given mode.
double derive_beta_scale(const GraphTopology& g, const WeightMatrix& w, int j,
                         BetaMode mode, const std::vector<double>* q);

// The network of per-agent virtual-clique learners. One agent is active per
// step: it fetches its row of each neighbor's model, predicts the weighted
// average, observes the loss, and sends the weighted gradient back.
class NetworkState {
public:
    NetworkState(GraphTopology g, WeightMatrix w, int d, EngineOptions opt = {});

    const GraphTopology& graph() const { return graph_; }
    const WeightMatrix& weights() const { return weights_; }
    int dim() const { return d_; }
    long global_t() const { return global_t_; }
    double max_gradient_norm() const { return max_gradient_norm_; }

    const CliqueLearner& clique(int j) const { return cliques_[j]; }
    CliqueLearner& clique(int j) { return cliques_[j]; }
    // Position of global agent i inside clique j (ascending-id order).
    int local_index(int j, int i) const;
    // Clique j's current model row for global agent i.
    Eigen::VectorXd model_row(int j, int i) const;

    StepRecord step(const StreamEntry& entry);
    std::vector<StepRecord> run(const Stream& stream);

private:
    GraphTopology graph_;
    WeightMatrix weights_;
    int d_;
    bool record_messages_;
    std::vector<CliqueLearner> cliques_;
    long global_t_ = 0;
    double max_gradient_norm_ = 0.0;
};

// Warm-up strategy for stochastic activations with unknown probabilities:
// each agent spends its first tau local steps only counting who was active
// in its neighborhood, then freezes the empirical frequencies and runs its
// clique with the estimated stochastic beta_scale on a restarted clock.
struct TwoPhaseOptions {
    double tau_constant = 12.0;  // the proof-side constant in tau
};

struct TwoPhaseResult {
    long tau;
    Eigen::MatrixXd pi_hat;            // row i, col j: estimated P(i_t=i | i_t in N_j)
    std::vector<double> beta_scales;   // per clique, from pi_hat
    std::vector<StepRecord> trajectory;
};

long two_phase_tau(double q_min_lower_bound, int n, long T,
                   double tau_constant = 12.0);

TwoPhaseResult two_phase_unknown_q(const GraphTopology& g, const WeightMatrix& w,
                                   int d, const Stream& stream,
                                   double q_min_lower_bound,
                                   EngineOptions opt = {},
                                   TwoPhaseOptions tp = {});

}  // namespace coolcn

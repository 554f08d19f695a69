#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/engine.hpp"
#include "coolcn/graph.hpp"
#include "coolcn/loss.hpp"
#include "coolcn/rng.hpp"
#include "coolcn/weights.hpp"

namespace coolcn {

// Laplace scales for the tree releases. epsilon may be infinity, which
// zeroes both scales (and makes the DP run coincide with the plain one).
struct PrivacyBudget {
    double epsilon;
    int n_max;
    int d;
    long T;
    double epsilon_prime;  // epsilon / (6 n_max^2)
    double scale_vec;      // sqrt(d) ln T / epsilon_prime
    double scale_scalar;   // ln T / epsilon_prime
};

PrivacyBudget budget(double epsilon, int n_max, int d, long T);

// dim i.i.d. Laplace(0, b) coordinates; b = 0 returns zeros without
// consuming the generator.
Eigen::VectorXd laplace_sample(int dim, double b, Rng& rng);

// Binary-counter prefix-sum release: each release is the exact prefix sum
// plus exactly `levels` Laplace terms (stored dyadic-node noises plus fresh
// completion draws), so the release-noise variance is the same at every t.
class AggregationTree {
public:
    AggregationTree(long T, int dim, double scale, std::uint64_t seed);

    Eigen::VectorXd append(const Eigen::VectorXd& value);

    long horizon() const { return T_; }
    long count() const { return t_; }
    int levels() const { return levels_; }
    long last_noise_terms() const { return last_noise_terms_; }

    // Dyadic node state, valid for levels where bit k of count() is set.
    const Eigen::VectorXd& level_sum(int k) const { return level_sum_[k]; }
    const Eigen::VectorXd& level_noise(int k) const { return level_noise_[k]; }

private:
    long T_;
    int dim_;
    double scale_;
    int levels_;
    Rng rng_;
    long t_ = 0;
    long last_noise_terms_ = 0;
    std::vector<Eigen::VectorXd> level_sum_;
    std::vector<Eigen::VectorXd> level_noise_;
};

// The DP protocol: COOL-CN where every cross-agent quantity flows through
// tree-based sanitized prefix sums. Linear losses only; Hedge adaptivity;
// adversarial-style beta schedule. The horizon is fixed up front because
// both noise scales depend on ln T.
class DopeNetworkState {
public:
    DopeNetworkState(GraphTopology g, WeightMatrix w, int d, long T,
                     double epsilon, std::uint64_t noise_seed);

    const GraphTopology& graph() const { return graph_; }
    const PrivacyBudget& privacy() const { return budget_; }
    long global_t() const { return global_t_; }
    double max_gradient_norm() const { return max_gradient_norm_; }

    // Clique j's current model row for global agent i, computed from the
    // sanitized tables only.
    Eigen::VectorXd model_row(int j, int i) const;
    std::vector<double> hedge_mix(int j) const;
    Eigen::VectorXd expert_row(int j, double xi, int local_index) const;

    const Eigen::MatrixXd& sanitized_gradients(int j) const {
        return gamma_table_[j];
    }

    StepRecord step(const StreamEntry& entry);
    std::vector<StepRecord> run(const Stream& stream);

    // Audit record: privacy parameters, noise-term count, gradient norms.
    std::string manifest() const;

private:
    int local_index(int j, int i) const;
    double beta(int j) const;  // beta_scale_j * sqrt(1 + local_t_j)

    GraphTopology graph_;
    WeightMatrix weights_;
    int d_;
    long T_;
    PrivacyBudget budget_;
    std::uint64_t noise_seed_;
    long global_t_ = 0;
    double max_gradient_norm_ = 0.0;

    // Receiver-side sanitized state of each agent j.
    std::vector<Eigen::MatrixXd> gamma_table_;  // nj x d, rows by local index
    std::vector<Eigen::MatrixXd> s_table_;      // nj x nj: (owner, grid index)
    std::vector<long> local_t_;
    std::vector<double> beta_scale_;

    // Sender-side trees of each agent i: its own gradient stream, and one
    // scalar stream per (neighbor j, grid value) it reports to.
    std::vector<AggregationTree> gamma_tree_;
    std::vector<std::vector<std::vector<AggregationTree>>> s_tree_;
};

}  // namespace coolcn

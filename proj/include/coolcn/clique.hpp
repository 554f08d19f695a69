#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/interaction.hpp"

namespace coolcn {

// Which scheme adapts the base FTRL to the unknown comparator scale:
// Hedge over the variance grid, or a Krichevsky-Trofimov bettor.
enum class Adaptivity { Hedge, KT };

struct CliqueOptions {
    Adaptivity adaptivity = Adaptivity::Hedge;
    // Multiplier in beta_{t-1} = beta_scale * sqrt(1 + local_t).
    double beta_scale = 1.0;
    // KT only: bound on the norm of the gradients fed to this instance
    // (weighted gradients in the network setting). Drives the u_t scaling.
    double lipschitz = 1.0;
    // Hedge only: replace the one-line A-ball clipping by Dykstra alternation
    // between the variance cap and row-wise unit-ball clipping.
    bool exact_projection = false;
};

// One agent's base learner on its virtual clique of size n: FTRL with the
// Mahalanobis regularizer 1/2 ||X||_A^2 on linear losses, made scale-adaptive
// by Hedge over the grid {1/n,...,1} or by a KT bettor.
class CliqueLearner {
public:
    CliqueLearner(int n, int d, CliqueOptions opt = {});

    int size() const { return n_; }
    int dim() const { return d_; }
    long local_t() const { return local_t_; }
    const CliqueOptions& options() const { return opt_; }

    // Model row for clique position `local_index` at the current round.
    Eigen::VectorXd predict(int local_index) const;

    // Feed the linear loss <weighted_gradient, .> hitting row `local_index`.
    void update(int local_index, const Eigen::VectorXd& weighted_gradient);

    // -- Hedge internals (also the expert surface DOPE fetches) --
    std::vector<double> grid() const;               // Xi = {1/n,...,1}
    std::vector<double> hedge_mix() const;          // p_t over the grid
    Eigen::MatrixXd expert_prediction(double xi) const;
    Eigen::VectorXd expert_row(double xi, int local_index) const;
    const std::vector<double>& expert_cumloss() const { return expert_cumloss_; }

    // -- KT internals --
    double bet() const;                              // current magnitude b_t
    double wealth() const { return wealth_; }        // 1 - sum b_s u_s
    Eigen::MatrixXd kt_direction() const;            // Y~_t
    Eigen::VectorXd kt_direction_row(int local_index) const;  // O(d) row of Y~_t
    long lipschitz_warnings() const { return lipschitz_warnings_; }

    const Eigen::MatrixXd& theta() const { return theta_; }

    // Bit-exact JSON snapshot (doubles hex-encoded).
    std::string snapshot() const;
    static CliqueLearner restore(const std::string& json_text);

    bool operator==(const CliqueLearner& other) const;

private:
    double beta() const;  // beta at the current local clock
    // Direction of the expert/KT solve: A^{-1} theta, row-wise with cached sums.
    Eigen::VectorXd inverse_theta_row(int local_index) const;
    double inverse_theta_norm_sq() const;  // ||A^{-1} theta||_A^2
    Eigen::MatrixXd hedge_expert_exact(double xi, double eta) const;

    int n_, d_;
    CliqueOptions opt_;
    InteractionMatrix a_;
    Eigen::MatrixXd theta_;        // cumulative weighted-gradient matrix
    Eigen::VectorXd theta_colsum_; // cached column sums of theta
    double theta_frob_sq_ = 0.0;   // cached ||theta||_F^2
    long local_t_ = 0;

    std::vector<double> expert_cumloss_;  // Hedge, per grid value

    double kt_sum_u_ = 0.0;   // KT: sum of u_s
    double wealth_ = 1.0;     // KT: 1 - sum b_s u_s
    long lipschitz_warnings_ = 0;
};

}  // namespace coolcn

#pragma once

#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/graph.hpp"

namespace coolcn {

enum class WeightScheme { Uniform, StochasticConditional, Delegation, Custom };

// Row-stochastic combination weights supported on closed neighborhoods:
// w_ij >= 0, w_ij = 0 for j outside N_i, each row sums to 1.
class WeightMatrix {
public:
    WeightMatrix(const GraphTopology& g, Eigen::MatrixXd w, WeightScheme scheme);

    int n() const { return static_cast<int>(w_.rows()); }
    double operator()(int i, int j) const { return w_(i, j); }
    const Eigen::MatrixXd& matrix() const { return w_; }
    WeightScheme scheme() const { return scheme_; }

private:
    Eigen::MatrixXd w_;
    WeightScheme scheme_;
};

// Uniform: w_ij = 1/|N_i|. StochasticConditional: w_ij = q_j / Q_i with
// Q_i = sum of q over N_i. Delegation: one-hot on each agent's delegate in
// dom_set (smallest-index dominator).
WeightMatrix make_weights(const GraphTopology& g, WeightScheme scheme,
                          const std::optional<std::vector<double>>& q = {},
                          const std::optional<std::set<int>>& dom_set = {});

}  // namespace coolcn

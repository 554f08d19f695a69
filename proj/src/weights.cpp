#include "coolcn/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace coolcn {

namespace {
constexpr double kRowSumTol = 1e-12;
}

WeightMatrix::WeightMatrix(const GraphTopology& g, Eigen::MatrixXd w,
                           WeightScheme scheme)
    : w_(std::move(w)), scheme_(scheme) {
    if (w_.rows() != g.n() || w_.cols() != g.n())
        throw std::invalid_argument("weight matrix shape must be n x n");
    for (int i = 0; i < g.n(); ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < g.n(); ++j) {
            double v = w_(i, j);
            if (v < 0.0)
                throw std::invalid_argument("weights must be nonnegative");
            bool in_nbhd = (i == j) || g.has_edge(i, j);
            if (!in_nbhd && v != 0.0)
                throw std::invalid_argument(
                    "weight supported outside the closed neighborhood");
            row_sum += v;
        }
        if (std::abs(row_sum - 1.0) > kRowSumTol)
            throw std::invalid_argument("weight row does not sum to 1");
    }
}

WeightMatrix make_weights(const GraphTopology& g, WeightScheme scheme,
                          const std::optional<std::vector<double>>& q,
                          const std::optional<std::set<int>>& dom_set) {
    const int n = g.n();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    switch (scheme) {
        case WeightScheme::Uniform:
            for (int i = 0; i < n; ++i)
                for (int j : g.neighborhood(i))
                    w(i, j) = 1.0 / static_cast<double>(g.neighborhood(i).size());
            break;
        case WeightScheme::StochasticConditional: {
            if (!q || static_cast<int>(q->size()) != n)
                throw std::invalid_argument(
                    "stochastic-conditional weights need the activation probabilities");
            for (int i = 0; i < n; ++i) {
                double big_q = 0.0;
                for (int j : g.neighborhood(i)) big_q += (*q)[j];
                if (big_q <= 0.0)
                    throw std::invalid_argument(
                        "neighborhood has zero activation probability");
                for (int j : g.neighborhood(i)) w(i, j) = (*q)[j] / big_q;
            }
            break;
        }
        case WeightScheme::Delegation: {
            if (!dom_set)
                throw std::invalid_argument("delegation weights need a dominating set");
            auto delegate = dominating_delegation(g, *dom_set);
            for (int i = 0; i < n; ++i) w(i, delegate[i]) = 1.0;
            break;
        }
        case WeightScheme::Custom:
            throw std::invalid_argument(
                "custom weights go through the WeightMatrix constructor");
    }
    return WeightMatrix(g, std::move(w), scheme);
}

}  // namespace coolcn

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/graph.hpp"

namespace coolcn {

// N x d comparator / ground-truth matrix with every row in the unit ball.
class TaskMatrix {
public:
    TaskMatrix(Eigen::MatrixXd rows, double tol = 1e-9);

    int agents() const { return static_cast<int>(m_.rows()); }
    int dim() const { return static_cast<int>(m_.cols()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    Eigen::VectorXd row(int i) const { return m_.row(i).transpose(); }

private:
    Eigen::MatrixXd m_;
};

struct VarianceProfile {
    double sigma_sq_global = 0.0;          // sigma^2(U)
    std::vector<double> sigma_sq_local;    // sigma_j^2 per agent
    double sigma_sq_max = 0.0;
    double sigma_sq_min = 0.0;
    double sigma_sq_bar = 0.0;             // average of the local variances
    double delta_sq = 0.0;                 // sup over edges of ||U_i - U_j||^2

    double sigma_bar() const;              // sqrt(sigma_sq_bar)
};

// Global variance sigma^2(X) = 1/(n-1) sum_i ||X_i - mean||^2; 0 for n <= 1.
double comparator_variance(const Eigen::MatrixXd& x);

VarianceProfile variance_profile(const TaskMatrix& u, const GraphTopology& g);

// Columns drawn i.i.d. from N(0, (I + lambda L)^{-1}); rows then projected
// to the unit ball. The raw variant skips the projection (for MC checks).
Eigen::MatrixXd sample_task_matrix_raw(const GraphTopology& g, double lambda,
                                       int d, std::uint64_t seed);
TaskMatrix sample_task_matrix(const GraphTopology& g, double lambda, int d,
                              std::uint64_t seed);

}  // namespace coolcn

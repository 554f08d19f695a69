#pragma once

#include <Eigen/Dense>

namespace coolcn {

// The coupling matrix A = (1+n) I - 11^T with closed-form inverse
// A^{-1} = (I + 11^T) / (n+1). Kept implicit: all products and norms are
// evaluated without materializing A.
struct InteractionMatrix {
    int n;

    explicit InteractionMatrix(int n_) : n(n_) {}

    double inverse_diagonal() const { return 2.0 / (n + 1); }

    Eigen::MatrixXd materialize() const {
        return (1.0 + n) * Eigen::MatrixXd::Identity(n, n) -
               Eigen::MatrixXd::Ones(n, n);
    }
    Eigen::MatrixXd materialize_inverse() const {
        return (Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n)) /
               (n + 1.0);
    }

    // A^{-1} X = (X + 1 c^T) / (n+1), c = column sums of X.
    Eigen::MatrixXd apply_inverse(const Eigen::MatrixXd& x) const {
        Eigen::RowVectorXd c = x.colwise().sum();
        return (x.rowwise() + c) / (n + 1.0);
    }

    // ||X||_A^2 = (1+n) ||X||_F^2 - ||column sums||^2.
    double norm_sq(const Eigen::MatrixXd& x) const {
        return (1.0 + n) * x.squaredNorm() - x.colwise().sum().squaredNorm();
    }

    // ||A^{-1} X||_A^2 = (||X||_F^2 + ||column sums||^2) / (n+1), given the
    // cached Frobenius square and column sums of X.
    double inverse_image_norm_sq(double frob_sq, const Eigen::VectorXd& colsum) const {
        return (frob_sq + colsum.squaredNorm()) / (n + 1.0);
    }
};

}  // namespace coolcn

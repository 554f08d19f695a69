#include "coolcn/task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "coolcn/rng.hpp"

namespace coolcn {

TaskMatrix::TaskMatrix(Eigen::MatrixXd rows, double tol) : m_(std::move(rows)) {
    if (m_.rows() < 1 || m_.cols() < 1)
        throw std::invalid_argument("task matrix must be non-empty");
    for (int i = 0; i < m_.rows(); ++i)
        if (m_.row(i).norm() > 1.0 + tol)
            throw std::invalid_argument("task matrix row outside the unit ball");
}

double VarianceProfile::sigma_bar() const { return std::sqrt(sigma_sq_bar); }

double comparator_variance(const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.rows());
    if (n <= 1) return 0.0;
    Eigen::RowVectorXd mean = x.colwise().mean();
    return (x.rowwise() - mean).squaredNorm() / (n - 1);
}

VarianceProfile variance_profile(const TaskMatrix& u, const GraphTopology& g) {
    if (u.agents() != g.n())
        throw std::invalid_argument("task matrix / graph size mismatch");
    const Eigen::MatrixXd& m = u.matrix();
    VarianceProfile vp;
    vp.sigma_sq_global = comparator_variance(m);
    vp.sigma_sq_local.resize(g.n());
    for (int j = 0; j < g.n(); ++j) {
        const auto& nb = g.neighborhood(j);
        if (nb.size() < 2) {
            vp.sigma_sq_local[j] = 0.0;  // singleton neighborhood convention
            continue;
        }
        Eigen::MatrixXd sub(nb.size(), u.dim());
        for (size_t k = 0; k < nb.size(); ++k) sub.row(k) = m.row(nb[k]);
        vp.sigma_sq_local[j] = comparator_variance(sub);
    }
    vp.sigma_sq_max = *std::max_element(vp.sigma_sq_local.begin(),
                                        vp.sigma_sq_local.end());
    vp.sigma_sq_min = *std::min_element(vp.sigma_sq_local.begin(),
                                        vp.sigma_sq_local.end());
    double sum = 0.0;
    for (double v : vp.sigma_sq_local) sum += v;
    vp.sigma_sq_bar = sum / g.n();
    vp.delta_sq = 0.0;
    for (auto [a, b] : g.edges())
        vp.delta_sq = std::max(vp.delta_sq, (m.row(a) - m.row(b)).squaredNorm());
    return vp;
}

Eigen::MatrixXd sample_task_matrix_raw(const GraphTopology& g, double lambda,
                                       int d, std::uint64_t seed) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    const int n = g.n();
    Eigen::MatrixXd precision =
        Eigen::MatrixXd::Identity(n, n) + lambda * laplacian(g);
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("Cholesky of I + lambda*L failed");
    // precision = M M^T; x = M^{-T} z has covariance (M M^T)^{-1}.
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd u(n, d);
    Eigen::VectorXd z(n);
    for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i) z(i) = gauss(rng);
        u.col(c) = llt.matrixU().solve(z);
    }
    return u;
}

TaskMatrix sample_task_matrix(const GraphTopology& g, double lambda, int d,
                              std::uint64_t seed) {
    Eigen::MatrixXd u = sample_task_matrix_raw(g, lambda, d, seed);
    for (int i = 0; i < u.rows(); ++i) {
        double norm = u.row(i).norm();
        if (norm > 1.0) u.row(i) /= norm;
    }
    return TaskMatrix(std::move(u));
}

}  // namespace coolcn

#include "coolcn/clique.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace coolcn {

namespace {

std::string hex_double(double v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
    return buf;
}

double unhex_double(const std::string& s) {
    return std::bit_cast<double>(
        static_cast<std::uint64_t>(std::stoull(s, nullptr, 16)));
}

nlohmann::json hex_array(const double* p, long count) {
    nlohmann::json arr = nlohmann::json::array();
    for (long k = 0; k < count; ++k) arr.push_back(hex_double(p[k]));
    return arr;
}

void unhex_into(const nlohmann::json& arr, double* p, long count) {
    if (static_cast<long>(arr.size()) != count)
        throw std::invalid_argument("clique snapshot: array length mismatch");
    for (long k = 0; k < count; ++k) p[k] = unhex_double(arr[k].get<std::string>());
}

}  // namespace

CliqueLearner::CliqueLearner(int n, int d, CliqueOptions opt)
    : n_(n), d_(d), opt_(opt), a_(n) {
    if (n < 1 || d < 1)
        throw std::invalid_argument("clique learner needs n >= 1 and d >= 1");
    if (opt_.beta_scale == 0.0) opt_.beta_scale = 1.0;  // degenerate weight row
    if (opt_.beta_scale < 0.0)
        throw std::invalid_argument("beta_scale must be nonnegative");
    if (opt_.lipschitz <= 0.0)
        throw std::invalid_argument("lipschitz bound must be positive");
    theta_ = Eigen::MatrixXd::Zero(n, d);
    theta_colsum_ = Eigen::VectorXd::Zero(d);
    expert_cumloss_.assign(n, 0.0);
}

double CliqueLearner::beta() const {
    return opt_.beta_scale * std::sqrt(1.0 + static_cast<double>(local_t_));
}

std::vector<double> CliqueLearner::grid() const {
    std::vector<double> xi(n_);
    for (int k = 0; k < n_; ++k) xi[k] = static_cast<double>(k + 1) / n_;
    return xi;
}

Eigen::VectorXd CliqueLearner::inverse_theta_row(int local_index) const {
    return (theta_.row(local_index).transpose() + theta_colsum_) / (n_ + 1.0);
}

double CliqueLearner::inverse_theta_norm_sq() const {
    return a_.inverse_image_norm_sq(theta_frob_sq_, theta_colsum_);
}

// Dykstra alternation between the variance cap (exact A-norm projection:
// the mean row and the centered part are A-orthogonal, so shrink only the
// centered part) and row-wise Euclidean clipping to the unit ball.
Eigen::MatrixXd CliqueLearner::hedge_expert_exact(double xi, double eta) const {
    Eigen::MatrixXd x = -eta * a_.apply_inverse(theta_);
    if (n_ == 1) {
        double norm = x.row(0).norm();
        if (norm > 1.0) x /= norm;
        return x;
    }
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_, d_);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_, d_);
    for (int sweep = 0; sweep < 100; ++sweep) {
        Eigen::MatrixXd prev = x;

        Eigen::MatrixXd y = x + p;
        Eigen::RowVectorXd mean = y.colwise().mean();
        Eigen::MatrixXd centered = y.rowwise() - mean;
        double var = centered.squaredNorm() / (n_ - 1);
        if (var > xi) centered *= std::sqrt(xi / var);
        x = centered.rowwise() + mean;
        p = y - x;

        y = x + q;
        x = y;
        for (int i = 0; i < n_; ++i) {
            double norm = x.row(i).norm();
            if (norm > 1.0) x.row(i) /= norm;
        }
        q = y - x;

        if ((x - prev).lpNorm<Eigen::Infinity>() < 1e-9) break;
    }
    return x;
}

Eigen::MatrixXd CliqueLearner::expert_prediction(double xi) const {
    double b = beta();
    double eta = (n_ / b) * std::sqrt(1.0 + xi * (n_ - 1));
    if (opt_.exact_projection) return hedge_expert_exact(xi, eta);
    Eigen::MatrixXd x = -eta * a_.apply_inverse(theta_);
    double norm_a = eta * std::sqrt(inverse_theta_norm_sq());
    double radius = std::sqrt(n_ * (1.0 + xi * (n_ - 1)));
    if (norm_a > radius) x *= radius / norm_a;
    return x;
}

Eigen::VectorXd CliqueLearner::expert_row(double xi, int local_index) const {
    if (local_index < 0 || local_index >= n_)
        throw std::out_of_range("clique local index out of range");
    if (opt_.exact_projection)
        return expert_prediction(xi).row(local_index).transpose();
    double b = beta();
    double eta = (n_ / b) * std::sqrt(1.0 + xi * (n_ - 1));
    Eigen::VectorXd row = -eta * inverse_theta_row(local_index);
    double norm_a = eta * std::sqrt(inverse_theta_norm_sq());
    double radius = std::sqrt(n_ * (1.0 + xi * (n_ - 1)));
    if (norm_a > radius) row *= radius / norm_a;
    return row;
}

std::vector<double> CliqueLearner::hedge_mix() const {
    std::vector<double> p(n_, 1.0 / n_);
    if (local_t_ == 0 || n_ == 1) return p;
    double rate = std::sqrt(std::log(static_cast<double>(n_))) / beta();
    double best = expert_cumloss_[0];
    for (double c : expert_cumloss_) best = std::min(best, c);
    double z = 0.0;
    for (int k = 0; k < n_; ++k) {
        p[k] = std::exp(-rate * (expert_cumloss_[k] - best));
        z += p[k];
    }
    for (double& v : p) v /= z;
    return p;
}

double CliqueLearner::bet() const {
    if (local_t_ == 0) return 0.0;
    double t = static_cast<double>(local_t_) + 1.0;
    return -(1.0 / t) * kt_sum_u_ * wealth_;
}

Eigen::MatrixXd CliqueLearner::kt_direction() const {
    double scale = std::sqrt(static_cast<double>(n_)) / beta();
    Eigen::MatrixXd y = -scale * a_.apply_inverse(theta_);
    double norm_a = scale * std::sqrt(inverse_theta_norm_sq());
    if (norm_a > 1.0) y /= norm_a;
    return y;
}

Eigen::VectorXd CliqueLearner::kt_direction_row(int local_index) const {
    if (local_index < 0 || local_index >= n_)
        throw std::out_of_range("clique local index out of range");
    double scale = std::sqrt(static_cast<double>(n_)) / beta();
    Eigen::VectorXd row = -scale * inverse_theta_row(local_index);
    double norm_a = scale * std::sqrt(inverse_theta_norm_sq());
    if (norm_a > 1.0) row /= norm_a;
    return row;
}

Eigen::VectorXd CliqueLearner::predict(int local_index) const {
    if (local_index < 0 || local_index >= n_)
        throw std::out_of_range("clique local index out of range");
    if (opt_.adaptivity == Adaptivity::KT)
        return bet() * kt_direction_row(local_index);
    auto xi = grid();
    auto p = hedge_mix();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
    for (int k = 0; k < n_; ++k) out += p[k] * expert_row(xi[k], local_index);
    return out;
}

void CliqueLearner::update(int local_index, const Eigen::VectorXd& weighted_gradient) {
    if (local_index < 0 || local_index >= n_)
        throw std::out_of_range("clique local index out of range");
    if (weighted_gradient.size() != d_)
        throw std::invalid_argument("gradient dimension mismatch");

    if (opt_.adaptivity == Adaptivity::Hedge) {
        // Charge each expert with the matrix it contributed this round.
        auto xi = grid();
        for (int k = 0; k < n_; ++k)
            expert_cumloss_[k] +=
                weighted_gradient.dot(expert_row(xi[k], local_index));
    } else {
        double u = std::sqrt(static_cast<double>(n_)) /
                   (std::sqrt(2.0) * opt_.lipschitz) *
                   kt_direction_row(local_index).dot(weighted_gradient);
        if (u > 1.0 || u < -1.0) {
            ++lipschitz_warnings_;
            u = std::clamp(u, -1.0, 1.0);
        }
        double b = bet();
        wealth_ -= b * u;
        kt_sum_u_ += u;
    }

    // Incremental caches keep every engine step O(d).
    theta_frob_sq_ += 2.0 * theta_.row(local_index).dot(weighted_gradient) +
                      weighted_gradient.squaredNorm();
    theta_.row(local_index) += weighted_gradient.transpose();
    theta_colsum_ += weighted_gradient;
    ++local_t_;
}

std::string CliqueLearner::snapshot() const {
    nlohmann::json j;
    j["n"] = n_;
    j["d"] = d_;
    j["adaptivity"] = opt_.adaptivity == Adaptivity::Hedge ? "hedge" : "kt";
    j["beta_scale"] = hex_double(opt_.beta_scale);
    j["lipschitz"] = hex_double(opt_.lipschitz);
    j["exact_projection"] = opt_.exact_projection;
    j["local_t"] = local_t_;
    j["theta"] = hex_array(theta_.data(), theta_.size());
    j["theta_colsum"] = hex_array(theta_colsum_.data(), theta_colsum_.size());
    j["theta_frob_sq"] = hex_double(theta_frob_sq_);
    j["expert_cumloss"] =
        hex_array(expert_cumloss_.data(), static_cast<long>(expert_cumloss_.size()));
    j["kt_sum_u"] = hex_double(kt_sum_u_);
    j["wealth"] = hex_double(wealth_);
    j["lipschitz_warnings"] = lipschitz_warnings_;
    return j.dump();
}

CliqueLearner CliqueLearner::restore(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    CliqueOptions opt;
    opt.adaptivity =
        j.at("adaptivity").get<std::string>() == "kt" ? Adaptivity::KT
                                                      : Adaptivity::Hedge;
    opt.beta_scale = unhex_double(j.at("beta_scale").get<std::string>());
    opt.lipschitz = unhex_double(j.at("lipschitz").get<std::string>());
    opt.exact_projection = j.at("exact_projection").get<bool>();
    CliqueLearner c(j.at("n").get<int>(), j.at("d").get<int>(), opt);
    c.local_t_ = j.at("local_t").get<long>();
    unhex_into(j.at("theta"), c.theta_.data(), c.theta_.size());
    unhex_into(j.at("theta_colsum"), c.theta_colsum_.data(), c.theta_colsum_.size());
    c.theta_frob_sq_ = unhex_double(j.at("theta_frob_sq").get<std::string>());
    unhex_into(j.at("expert_cumloss"), c.expert_cumloss_.data(),
               static_cast<long>(c.expert_cumloss_.size()));
    c.kt_sum_u_ = unhex_double(j.at("kt_sum_u").get<std::string>());
    c.wealth_ = unhex_double(j.at("wealth").get<std::string>());
    c.lipschitz_warnings_ = j.at("lipschitz_warnings").get<long>();
    return c;
}

bool CliqueLearner::operator==(const CliqueLearner& other) const {
    return snapshot() == other.snapshot();
}

}  // namespace coolcn

#include "coolcn/privacy.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "coolcn/interaction.hpp"

namespace coolcn {

PrivacyBudget budget(double epsilon, int n_max, int d, long T) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("privacy budget epsilon must be positive");
    if (n_max < 1 || d < 1)
        throw std::invalid_argument("budget needs n_max >= 1 and d >= 1");
    if (T < 2)
        throw std::invalid_argument("DP noise scales need a horizon T >= 2");
    PrivacyBudget b;
    b.epsilon = epsilon;
    b.n_max = n_max;
    b.d = d;
    b.T = T;
    if (std::isinf(epsilon)) {
        b.epsilon_prime = std::numeric_limits<double>::infinity();
        b.scale_vec = 0.0;
        b.scale_scalar = 0.0;
    } else {
        b.epsilon_prime = epsilon / (6.0 * n_max * n_max);
        b.scale_scalar = std::log(static_cast<double>(T)) / b.epsilon_prime;
        b.scale_vec = std::sqrt(static_cast<double>(d)) * b.scale_scalar;
    }
    return b;
}

Eigen::VectorXd laplace_sample(int dim, double b, Rng& rng) {
    if (b < 0.0) throw std::invalid_argument("laplace scale must be >= 0");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    if (b == 0.0) return out;
    std::exponential_distribution<double> exp1(1.0);
    for (int k = 0; k < dim; ++k) out(k) = b * (exp1(rng) - exp1(rng));
    return out;
}

AggregationTree::AggregationTree(long T, int dim, double scale,
                                 std::uint64_t seed)
    : T_(T), dim_(dim), scale_(scale), rng_(seed) {
    if (T < 1) throw std::invalid_argument("tree horizon must be >= 1");
    if (dim < 1) throw std::invalid_argument("tree element dimension must be >= 1");
    levels_ = 1;
    while ((1L << (levels_ - 1)) < T_) ++levels_;  // ceil(log2 T) + 1
    level_sum_.assign(levels_, Eigen::VectorXd::Zero(dim_));
    level_noise_.assign(levels_, Eigen::VectorXd::Zero(dim_));
}

Eigen::VectorXd AggregationTree::append(const Eigen::VectorXd& value) {
    if (value.size() != dim_)
        throw std::invalid_argument("tree element dimension mismatch");
    if (t_ >= T_) throw std::length_error("aggregation tree is at capacity");
    ++t_;
    // The new leaf merges the completed lower dyadic nodes into one node at
    // the level of the lowest set bit of t.
    int low = std::countr_zero(static_cast<unsigned long long>(t_));
    Eigen::VectorXd node = value;
    for (int k = 0; k < low; ++k) node += level_sum_[k];
    level_sum_[low] = std::move(node);
    level_noise_[low] = laplace_sample(dim_, scale_, rng_);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    last_noise_terms_ = 0;
    for (int k = 0; k < levels_; ++k) {
        if ((t_ >> k) & 1) {
            out += level_sum_[k] + level_noise_[k];
            ++last_noise_terms_;
        }
    }
    // Completion draws keep the per-release noise-term count constant.
    while (last_noise_terms_ < levels_) {
        out += laplace_sample(dim_, scale_, rng_);
        ++last_noise_terms_;
    }
    return out;
}

DopeNetworkState::DopeNetworkState(GraphTopology g, WeightMatrix w, int d,
                                   long T, double epsilon,
                                   std::uint64_t noise_seed)
    : graph_(std::move(g)),
      weights_(std::move(w)),
      d_(d),
      T_(T),
      budget_(budget(epsilon, graph_.n_max(), d, T)),
      noise_seed_(noise_seed) {
    if (weights_.n() != graph_.n())
        throw std::invalid_argument("weights / graph size mismatch");

    const int n = graph_.n();
    gamma_table_.reserve(n);
    s_table_.reserve(n);
    local_t_.assign(n, 0);
    beta_scale_.reserve(n);
    gamma_tree_.reserve(n);
    s_tree_.resize(n);
    for (int j = 0; j < n; ++j) {
        const int nj = static_cast<int>(graph_.neighborhood(j).size());
        gamma_table_.push_back(Eigen::MatrixXd::Zero(nj, d_));
        s_table_.push_back(Eigen::MatrixXd::Zero(nj, nj));
        double bs = derive_beta_scale(graph_, weights_, j, BetaMode::Adversarial,
                                      nullptr);
        beta_scale_.push_back(bs > 0.0 ? bs : 1.0);
        gamma_tree_.emplace_back(T_, d_, budget_.scale_vec,
                                 child_seed(noise_seed_,
                                            "gamma/" + std::to_string(j)));
    }
    for (int i = 0; i < n; ++i) {
        for (int j : graph_.neighborhood(i)) {
            const int nj = static_cast<int>(graph_.neighborhood(j).size());
            std::vector<AggregationTree> per_grid;
            per_grid.reserve(nj);
            for (int k = 0; k < nj; ++k)
                per_grid.emplace_back(
                    T_, 1, budget_.scale_scalar,
                    child_seed(noise_seed_, "s/" + std::to_string(i) + "/" +
                                                std::to_string(j) + "/" +
                                                std::to_string(k)));
            s_tree_[i].push_back(std::move(per_grid));
        }
    }
}

int DopeNetworkState::local_index(int j, int i) const {
    const auto& nb = graph_.neighborhood(j);
    auto it = std::lower_bound(nb.begin(), nb.end(), i);
    if (it == nb.end() || *it != i)
        throw std::out_of_range("agent not in the clique's neighborhood");
    return static_cast<int>(it - nb.begin());
}

double DopeNetworkState::beta(int j) const {
    return beta_scale_[j] * std::sqrt(1.0 + static_cast<double>(local_t_[j]));
}

Eigen::VectorXd DopeNetworkState::expert_row(int j, double xi,
                                             int li) const {
    const int nj = static_cast<int>(graph_.neighborhood(j).size());
    InteractionMatrix a(nj);
    double eta = (nj / beta(j)) * std::sqrt(1.0 + xi * (nj - 1));
    Eigen::MatrixXd x = -eta * a.apply_inverse(gamma_table_[j]);
    double norm_a = std::sqrt(std::max(a.norm_sq(x), 0.0));
    double radius = std::sqrt(nj * (1.0 + xi * (nj - 1)));
    if (norm_a > radius) x *= radius / norm_a;
    return x.row(li).transpose();
}

std::vector<double> DopeNetworkState::hedge_mix(int j) const {
    const int nj = static_cast<int>(graph_.neighborhood(j).size());
    std::vector<double> p(nj, 1.0 / nj);
    if (local_t_[j] == 0 || nj == 1) return p;
    double rate = std::sqrt(std::log(static_cast<double>(nj))) / beta(j);
    Eigen::RowVectorXd cumloss = s_table_[j].colwise().sum();
    double best = cumloss.minCoeff();
    double z = 0.0;
    for (int k = 0; k < nj; ++k) {
        p[k] = std::exp(-rate * (cumloss(k) - best));
        z += p[k];
    }
    for (double& v : p) v /= z;
    return p;
}

Eigen::VectorXd DopeNetworkState::model_row(int j, int i) const {
    const int nj = static_cast<int>(graph_.neighborhood(j).size());
    const int li = local_index(j, i);
    auto p = hedge_mix(j);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
    for (int k = 0; k < nj; ++k)
        out += p[k] * expert_row(j, static_cast<double>(k + 1) / nj, li);
    return out;
}

StepRecord DopeNetworkState::step(const StreamEntry& entry) {
    if (entry.loss.kind != Loss::Kind::Linear)
        throw std::invalid_argument(
            "the DP protocol's guarantee covers linear losses only");
    if (global_t_ >= T_)
        throw std::length_error("DP run past its declared horizon");
    const int i = entry.active;
    if (i < 0 || i >= graph_.n())
        throw std::out_of_range("active agent index out of range");

    StepRecord rec;
    rec.t = ++global_t_;
    rec.active = i;
    rec.prediction = Eigen::VectorXd::Zero(d_);

    // Expert rows at prediction time; the same matrices price this round's
    // gradient in the scalar streams below.
    std::vector<std::vector<Eigen::VectorXd>> xrows;
    const auto& nbi = graph_.neighborhood(i);
    xrows.reserve(nbi.size());
    for (int j : nbi) {
        const int nj = static_cast<int>(graph_.neighborhood(j).size());
        const int li = local_index(j, i);
        auto p = hedge_mix(j);
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(nj);
        Eigen::VectorXd mixed = Eigen::VectorXd::Zero(d_);
        for (int k = 0; k < nj; ++k) {
            rows.push_back(expert_row(j, static_cast<double>(k + 1) / nj, li));
            mixed += p[k] * rows.back();
        }
        xrows.push_back(std::move(rows));
        rec.prediction += weights_(i, j) * mixed;
        rec.fetched.emplace_back(j, std::move(mixed));
    }

    const Eigen::VectorXd& g = entry.loss.vec;
    rec.loss_value = entry.loss.value(rec.prediction);
    rec.gradient = g;
    max_gradient_norm_ = std::max(max_gradient_norm_, g.norm());

    Eigen::VectorXd gamma_tilde = gamma_tree_[i].append(g);
    for (size_t jj = 0; jj < nbi.size(); ++jj) {
        const int j = nbi[jj];
        const int nj = static_cast<int>(graph_.neighborhood(j).size());
        const int li = local_index(j, i);
        Eigen::VectorXd payload = weights_(i, j) * gamma_tilde;
        gamma_table_[j].row(li) = payload.transpose();
        for (int k = 0; k < nj; ++k) {
            Eigen::VectorXd inc(1);
            inc(0) = weights_(i, j) * xrows[jj][k].dot(g);
            s_table_[j](li, k) = s_tree_[i][jj][k].append(inc)(0);
        }
        ++local_t_[j];
        rec.sent.emplace_back(j, std::move(payload));
    }
    return rec;
}

std::vector<StepRecord> DopeNetworkState::run(const Stream& stream) {
    std::vector<StepRecord> traj;
    traj.reserve(stream.size());
    for (const auto& e : stream) traj.push_back(step(e));
    return traj;
}

std::string DopeNetworkState::manifest() const {
    nlohmann::json j;
    auto enc = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    j["epsilon"] = enc(budget_.epsilon);
    j["epsilon_prime"] = enc(budget_.epsilon_prime);
    j["scale_vec"] = budget_.scale_vec;
    j["scale_scalar"] = budget_.scale_scalar;
    j["horizon"] = T_;
    j["agents"] = graph_.n();
    j["noise_terms_per_release"] = gamma_tree_.front().levels();
    j["steps_run"] = global_t_;
    j["max_gradient_norm"] = max_gradient_norm_;
    return j.dump(2);
}

}  // namespace coolcn

#include "coolcn/loss.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace coolcn {

namespace {
constexpr double kLinearGradientBound = 1.0 + 1e-9;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

Loss Loss::linear(Eigen::VectorXd g) {
    if (g.norm() > kLinearGradientBound)
        throw std::invalid_argument("linear loss gradient exceeds the Lipschitz bound");
    return {Kind::Linear, std::move(g)};
}

double Loss::value(const Eigen::VectorXd& x) const {
    if (kind == Kind::Quadratic) return 0.5 * (x - vec).squaredNorm();
    return vec.dot(x);
}

Eigen::VectorXd project_unit_ball(const Eigen::VectorXd& x) {
    double norm = x.norm();
    if (norm <= 1.0) return x;
    return x / norm;
}

Eigen::VectorXd subgradient(const Loss& loss, const Eigen::VectorXd& x) {
    if (loss.kind == Loss::Kind::Quadratic) return x - loss.vec;
    return loss.vec;
}

Eigen::VectorXd sample_loss_center(const TaskMatrix& u, int active,
                                   double noise_std, Rng& rng) {
    if (active < 0 || active >= u.agents())
        throw std::invalid_argument("active agent index out of range");
    Eigen::VectorXd z = u.row(active);
    if (noise_std > 0.0) {
        std::normal_distribution<double> gauss(0.0, noise_std);
        for (int k = 0; k < z.size(); ++k) z(k) += gauss(rng);
    }
    return z;
}

TaskMatrix best_in_hindsight(const std::vector<std::vector<Loss>>& per_agent,
                             int d) {
    const int n = static_cast<int>(per_agent.size());
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, d);
    for (int i = 0; i < n; ++i) {
        const auto& losses = per_agent[i];
        if (losses.empty()) continue;
        Loss::Kind kind = losses.front().kind;
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
        for (const Loss& l : losses) {
            if (l.kind != kind)
                throw std::invalid_argument(
                    "mixed quadratic/linear losses for one agent are unsupported");
            sum += l.vec;
        }
        if (kind == Loss::Kind::Quadratic) {
            u.row(i) = project_unit_ball(sum / losses.size()).transpose();
        } else if (sum.norm() > 0.0) {
            u.row(i) = (-sum / sum.norm()).transpose();
        }
    }
    return TaskMatrix(std::move(u));
}

void write_stream_csv(const Stream& stream, std::ostream& out) {
    int d = stream.empty() ? 0 : static_cast<int>(stream.front().loss.vec.size());
    out << "t,active_agent";
    for (int k = 1; k <= d; ++k) out << ",z_" << k;
    out << "\n";
    for (size_t t = 0; t < stream.size(); ++t) {
        const auto& e = stream[t];
        if (e.loss.kind != Loss::Kind::Quadratic)
            throw std::invalid_argument("replay files cover quadratic streams only");
        out << (t + 1) << "," << e.active;
        for (int k = 0; k < e.loss.vec.size(); ++k)
            out << "," << fmt17(e.loss.vec(k));
        out << "\n";
    }
}

Stream read_stream_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("stream csv: missing header");
    Stream stream;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() < 3)
            throw std::invalid_argument("stream csv: malformed row");
        int active = std::stoi(fields[1]);
        Eigen::VectorXd z(fields.size() - 2);
        for (size_t k = 2; k < fields.size(); ++k) z(k - 2) = std::stod(fields[k]);
        stream.push_back({active, Loss::quadratic(std::move(z))});
    }
    return stream;
}

std::uint64_t stream_hash(const Stream& stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, size_t len) {
        h = fnv1a(std::string_view(static_cast<const char*>(p), len), h);
    };
    for (const auto& e : stream) {
        mix(&e.active, sizeof(e.active));
        int kind = static_cast<int>(e.loss.kind);
        mix(&kind, sizeof(kind));
        mix(e.loss.vec.data(), sizeof(double) * e.loss.vec.size());
    }
    return h;
}

std::vector<std::vector<Loss>> losses_by_agent(const Stream& stream, int n) {
    std::vector<std::vector<Loss>> out(n);
    for (const auto& e : stream) out[e.active].push_back(e.loss);
    return out;
}

}  // namespace coolcn

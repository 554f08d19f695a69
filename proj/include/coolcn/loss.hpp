#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "coolcn/rng.hpp"
#include "coolcn/task.hpp"

namespace coolcn {

// Quadratic: l(x) = 1/2 ||x - z||^2 with center z.
// Linear:    l(x) = <g, x> with a fixed gradient g.
struct Loss {
    enum class Kind { Quadratic, Linear };
    Kind kind;
    Eigen::VectorXd vec;  // z for Quadratic, g for Linear

    static Loss quadratic(Eigen::VectorXd z) {
        return {Kind::Quadratic, std::move(z)};
    }
    static Loss linear(Eigen::VectorXd g);

    double value(const Eigen::VectorXd& x) const;
};

Eigen::VectorXd project_unit_ball(const Eigen::VectorXd& x);

// Quadratic -> x - z; Linear -> g.
Eigen::VectorXd subgradient(const Loss& loss, const Eigen::VectorXd& x);

// z = U_active + noise_std * standard normal per coordinate.
Eigen::VectorXd sample_loss_center(const TaskMatrix& u, int active,
                                   double noise_std, Rng& rng);

// Per-agent minimizer of the summed losses over the unit ball. Agents with
// no losses get the zero row. Mixed quadratic/linear streams for one agent
// are unsupported.
TaskMatrix best_in_hindsight(const std::vector<std::vector<Loss>>& per_agent,
                             int d);

// One protocol step: the activated agent and its loss.
struct StreamEntry {
    int active;
    Loss loss;
};
using Stream = std::vector<StreamEntry>;

// Replay file: CSV "t,active_agent,z_1..z_d" for quadratic streams.
void write_stream_csv(const Stream& stream, std::ostream& out);
Stream read_stream_csv(std::istream& in);

std::uint64_t stream_hash(const Stream& stream);

// Per-agent loss lists extracted from a stream (for best_in_hindsight).
std::vector<std::vector<Loss>> losses_by_agent(const Stream& stream, int n);

}  // namespace coolcn

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "coolcn/graph.hpp"
#include "coolcn/rng.hpp"

namespace coolcn {

// Who gets activated at each protocol step.
struct AdversarialSchedule {
    std::vector<int> sequence;  // i_t for t = 0..T-1
};
struct StochasticSchedule {
    std::vector<double> q;  // P(i_t = i) = q_i, i.i.d. over t
    std::uint64_t seed = 0;
};
struct RoundRobinSchedule {
    std::vector<int> order;  // cycled
};

using ActivationSchedule =
    std::variant<AdversarialSchedule, StochasticSchedule, RoundRobinSchedule>;

// Validates indices/probabilities against the agent count.
void validate_schedule(const ActivationSchedule& sched, int n);

// Materializes i_1..i_T (deterministic given the schedule's own seed).
std::vector<int> draw_activations(const ActivationSchedule& sched, long T, int n);

// Q_j = sum of q over the closed neighborhood of j.
double neighborhood_activation_mass(const GraphTopology& g,
                                    const std::vector<double>& q, int j);

}  // namespace coolcn

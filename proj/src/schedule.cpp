#include "coolcn/schedule.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace coolcn {

void validate_schedule(const ActivationSchedule& sched, int n) {
    if (const auto* a = std::get_if<AdversarialSchedule>(&sched)) {
        for (int i : a->sequence)
            if (i < 0 || i >= n)
                throw std::invalid_argument("adversarial schedule index out of range");
    } else if (const auto* s = std::get_if<StochasticSchedule>(&sched)) {
        if (static_cast<int>(s->q.size()) != n)
            throw std::invalid_argument("activation probability vector has wrong length");
        double sum = 0.0;
        for (double qi : s->q) {
            if (qi < 0.0)
                throw std::invalid_argument("activation probabilities must be >= 0");
            sum += qi;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("activation probabilities must sum to 1");
    } else {
        const auto& r = std::get<RoundRobinSchedule>(sched);
        if (r.order.empty())
            throw std::invalid_argument("round-robin order must be non-empty");
        for (int i : r.order)
            if (i < 0 || i >= n)
                throw std::invalid_argument("round-robin index out of range");
    }
}

std::vector<int> draw_activations(const ActivationSchedule& sched, long T, int n) {
    validate_schedule(sched, n);
    std::vector<int> out;
    out.reserve(T);
    if (const auto* a = std::get_if<AdversarialSchedule>(&sched)) {
        if (static_cast<long>(a->sequence.size()) < T)
            throw std::invalid_argument("adversarial schedule shorter than the horizon");
        out.assign(a->sequence.begin(), a->sequence.begin() + T);
    } else if (const auto* s = std::get_if<StochasticSchedule>(&sched)) {
        Rng rng(s->seed);
        std::discrete_distribution<int> pick(s->q.begin(), s->q.end());
        for (long t = 0; t < T; ++t) out.push_back(pick(rng));
    } else {
        const auto& r = std::get<RoundRobinSchedule>(sched);
        for (long t = 0; t < T; ++t) out.push_back(r.order[t % r.order.size()]);
    }
    return out;
}

double neighborhood_activation_mass(const GraphTopology& g,
                                    const std::vector<double>& q, int j) {
    double big_q = 0.0;
    for (int i : g.neighborhood(j)) big_q += q[i];
    return big_q;
}

}  // namespace coolcn

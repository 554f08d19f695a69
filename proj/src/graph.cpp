#include "coolcn/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "coolcn/rng.hpp"

namespace coolcn {

GraphTopology::GraphTopology(int n, std::set<std::pair<int, int>> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw GraphError("graph needs at least one vertex");
    std::set<std::pair<int, int>> normalized;
    for (auto [a, b] : edges_) {
        if (a == b) throw GraphError("self-loops are not allowed");
        if (a < 0 || b < 0 || a >= n_ || b >= n_)
            throw GraphError("edge endpoint out of range");
        normalized.emplace(std::min(a, b), std::max(a, b));
    }
    edges_ = std::move(normalized);
    nbhd_.assign(n_, {});
    for (int i = 0; i < n_; ++i) nbhd_[i].push_back(i);
    for (auto [a, b] : edges_) {
        nbhd_[a].push_back(b);
        nbhd_[b].push_back(a);
    }
    n_min_ = n_;
    n_max_ = 1;
    for (auto& nb : nbhd_) {
        std::sort(nb.begin(), nb.end());
        n_min_ = std::min<int>(n_min_, nb.size());
        n_max_ = std::max<int>(n_max_, nb.size());
    }
}

bool GraphTopology::has_edge(int i, int j) const {
    if (i == j) return false;
    return edges_.count({std::min(i, j), std::max(i, j)}) > 0;
}

std::vector<std::vector<int>> GraphTopology::distances() const {
    std::vector<std::vector<int>> dist(n_, std::vector<int>(n_, -1));
    for (int s = 0; s < n_; ++s) {
        std::deque<int> queue{s};
        dist[s][s] = 0;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int w : nbhd_[v]) {
                if (dist[s][w] < 0) {
                    dist[s][w] = dist[s][v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    return dist;
}

GraphTopology erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 1) throw GraphError("erdos_renyi: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw GraphError("erdos_renyi: p must be in [0,1]");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < p) edges.emplace(i, j);
    return GraphTopology(n, std::move(edges));
}

GraphTopology complete_graph(int n) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace(i, j);
    return GraphTopology(n, std::move(edges));
}

GraphTopology path_graph(int n) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace(i, i + 1);
    return GraphTopology(n, std::move(edges));
}

GraphTopology cycle_graph(int n) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace(i, i + 1);
    if (n > 2) edges.emplace(0, n - 1);
    return GraphTopology(n, std::move(edges));
}

GraphTopology empty_graph(int n) { return GraphTopology(n, {}); }

Eigen::MatrixXd laplacian(const GraphTopology& g) {
    const int n = g.n();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (auto [a, b] : g.edges()) {
        L(a, a) += 1.0;
        L(b, b) += 1.0;
        L(a, b) -= 1.0;
        L(b, a) -= 1.0;
    }
    return L;
}

namespace {

// Closed neighborhood bitmasks (vertex + its neighbors).
std::vector<std::uint32_t> closed_masks(const GraphTopology& g) {
    std::vector<std::uint32_t> m(g.n(), 0);
    for (int i = 0; i < g.n(); ++i)
        for (int v : g.neighborhood(i)) m[i] |= (1u << v);
    return m;
}

bool pairwise_ok(std::uint32_t subset, int n,
                 const std::vector<std::vector<int>>& dist, int min_dist) {
    for (int i = 0; i < n; ++i) {
        if (!(subset & (1u << i))) continue;
        for (int j = i + 1; j < n; ++j) {
            if (!(subset & (1u << j))) continue;
            int d = dist[i][j];
            if (d >= 0 && d < min_dist) return false;
        }
    }
    return true;
}

GraphStats exact_stats(const GraphTopology& g) {
    const int n = g.n();
    const auto masks = closed_masks(g);
    const auto dist = g.distances();
    const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
    GraphStats s;
    s.gamma = n;
    for (std::uint32_t sub = 0; sub <= all; ++sub) {
        int size = __builtin_popcount(sub);
        // independence: no edge inside the subset
        if (size > s.alpha && pairwise_ok(sub, n, dist, 2))
            s.alpha = size;
        // twice-independence: pairwise distance >= 3 (unreachable counts)
        if (size > s.alpha2 && pairwise_ok(sub, n, dist, 3))
            s.alpha2 = size;
        // domination: closed neighborhoods cover everything
        if (size < s.gamma && size > 0) {
            std::uint32_t covered = 0;
            for (int i = 0; i < n; ++i)
                if (sub & (1u << i)) covered |= masks[i];
            if (covered == all) s.gamma = size;
        }
        if (sub == all) break;  // avoid overflow when n == 32 (never here)
    }
    return s;
}

GraphStats greedy_stats(const GraphTopology& g) {
    const int n = g.n();
    const auto dist = g.distances();
    GraphStats s;
    s.approximate = true;

    // Greedy independent set: repeatedly take a minimum-degree vertex.
    {
        std::vector<bool> removed(n, false);
        int remaining = n;
        while (remaining > 0) {
            int best = -1, best_deg = n + 1;
            for (int i = 0; i < n; ++i) {
                if (removed[i]) continue;
                int deg = 0;
                for (int v : g.neighborhood(i))
                    if (v != i && !removed[v]) ++deg;
                if (deg < best_deg) {
                    best_deg = deg;
                    best = i;
                }
            }
            ++s.alpha;
            for (int v : g.neighborhood(best)) {
                if (!removed[v]) {
                    removed[v] = true;
                    --remaining;
                }
            }
        }
    }

    // Greedy dominating set: maximum new coverage first.
    {
        std::vector<bool> covered(n, false);
        int uncovered = n;
        while (uncovered > 0) {
            int best = -1, best_gain = -1;
            for (int i = 0; i < n; ++i) {
                int gain = 0;
                for (int v : g.neighborhood(i))
                    if (!covered[v]) ++gain;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = i;
                }
            }
            ++s.gamma;
            for (int v : g.neighborhood(best))
                if (!covered[v]) {
                    covered[v] = true;
                    --uncovered;
                }
        }
    }

    // Greedy twice-independent set in vertex order.
    {
        std::vector<int> chosen;
        for (int i = 0; i < n; ++i) {
            bool ok = true;
            for (int c : chosen) {
                int d = dist[i][c];
                if (d >= 0 && d < 3) {
                    ok = false;
                    break;
                }
            }
            if (ok) chosen.push_back(i);
        }
        s.alpha2 = static_cast<int>(chosen.size());
    }
    return s;
}

}  // namespace

GraphStats graph_stats(const GraphTopology& g, int exact_limit, StatsMode mode) {
    const bool small = g.n() <= exact_limit;
    if (mode == StatsMode::Exact && !small)
        throw GraphError("exact graph stats requested above the size cap (n=" +
                         std::to_string(g.n()) + " > " +
                         std::to_string(exact_limit) + ")");
    GraphStats s = (mode != StatsMode::Greedy && small) ? exact_stats(g)
                                                        : greedy_stats(g);
    int deg0 = g.neighborhood_size(0) - 1;
    bool regular = true;
    for (int i = 1; i < g.n(); ++i)
        if (g.neighborhood_size(i) - 1 != deg0) regular = false;
    if (regular) s.regular_degree = deg0;
    return s;
}

std::vector<int> dominating_delegation(const GraphTopology& g,
                                       const std::set<int>& dom_set) {
    std::vector<int> delegate(g.n(), -1);
    for (int i = 0; i < g.n(); ++i) {
        for (int v : g.neighborhood(i)) {
            if (dom_set.count(v)) {
                delegate[i] = v;
                break;  // neighborhoods are sorted: smallest index wins
            }
        }
        if (delegate[i] < 0)
            throw GraphError("set is not dominating: vertex " +
                             std::to_string(i) + " is uncovered");
    }
    return delegate;
}

void write_edge_list(const GraphTopology& g, std::ostream& out) {
    out << "n=" << g.n() << "\n";
    for (auto [a, b] : g.edges()) out << a << " " << b << "\n";
}

GraphTopology read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("n=", 0) != 0)
        throw GraphError("edge list: missing 'n=<count>' header on line 1");
    int n = 0;
    try {
        n = std::stoi(line.substr(2));
    } catch (const std::exception&) {
        throw GraphError("edge list: malformed vertex count on line 1");
    }
    std::set<std::pair<int, int>> edges;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int a, b;
        if (!(ls >> a >> b))
            throw GraphError("edge list: malformed edge on line " +
                             std::to_string(lineno));
        edges.emplace(a, b);
    }
    return GraphTopology(n, std::move(edges));
}

}  // namespace coolcn

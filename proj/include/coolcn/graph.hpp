#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace coolcn {

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undirected communication graph with self-inclusive neighborhoods:
// N_i = {i} union {j : (i,j) in E}. Vertices are 0-indexed.
class GraphTopology {
public:
    GraphTopology(int n, std::set<std::pair<int, int>> edges);

    int n() const { return n_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }
    // Sorted, always contains i itself.
    const std::vector<int>& neighborhood(int i) const { return nbhd_[i]; }
    int neighborhood_size(int i) const { return static_cast<int>(nbhd_[i].size()); }
    int n_min() const { return n_min_; }
    int n_max() const { return n_max_; }
    bool has_edge(int i, int j) const;
    bool adjacent_or_equal(int i, int j) const { return i == j || has_edge(i, j); }

    // All-pairs shortest path lengths; unreachable pairs get -1 (infinity).
    std::vector<std::vector<int>> distances() const;

private:
    int n_;
    std::set<std::pair<int, int>> edges_;  // stored with first < second
    std::vector<std::vector<int>> nbhd_;
    int n_min_, n_max_;
};

GraphTopology erdos_renyi(int n, double p, std::uint64_t seed);
GraphTopology complete_graph(int n);
GraphTopology path_graph(int n);
GraphTopology cycle_graph(int n);
GraphTopology empty_graph(int n);

// L = D - Adj, degrees excluding self-loops. Rows sum to zero; PSD.
Eigen::MatrixXd laplacian(const GraphTopology& g);

struct GraphStats {
    int alpha = 0;   // independence number
    int gamma = 0;   // domination number
    int alpha2 = 0;  // twice-independence number (pairwise distance >= 3)
    std::optional<int> regular_degree;  // set when all plain degrees are equal
    bool approximate = false;           // true when greedy bounds were used
};

enum class StatsMode { Auto, Exact, Greedy };

// Exact by subset enumeration up to exact_limit vertices, greedy above.
// StatsMode::Exact on a larger graph throws GraphError.
GraphStats graph_stats(const GraphTopology& g, int exact_limit = 16,
                       StatsMode mode = StatsMode::Auto);

// Smallest-index delegation j(i) = min(N_i intersect dom_set).
// Throws GraphError naming an uncovered vertex if dom_set is not dominating.
std::vector<int> dominating_delegation(const GraphTopology& g,
                                       const std::set<int>& dom_set);

// Edge-list text format: header "n=<count>", then one "i j" pair per line.
void write_edge_list(const GraphTopology& g, std::ostream& out);
GraphTopology read_edge_list(std::istream& in);

}  // namespace coolcn

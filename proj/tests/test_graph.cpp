#include <doctest.h>

#include <sstream>

#include <Eigen/Eigenvalues>

#include "coolcn/graph.hpp"
#include "coolcn/rng.hpp"

using namespace coolcn;

TEST_CASE("neighborhoods are symmetric, self-inclusive and sorted") {
    for (int seed = 0; seed < 30; ++seed) {
        GraphTopology g = erdos_renyi(9, 0.4, seed);
        for (int i = 0; i < g.n(); ++i) {
            const auto& nb = g.neighborhood(i);
            CHECK(std::is_sorted(nb.begin(), nb.end()));
            CHECK(std::binary_search(nb.begin(), nb.end(), i));
            for (int j : nb)
                CHECK(std::binary_search(g.neighborhood(j).begin(),
                                         g.neighborhood(j).end(), i));
        }
        CHECK(g.n_min() >= 1);
        CHECK(g.n_min() <= g.n_max());
        CHECK(g.n_max() <= g.n());
    }
}

TEST_CASE("erdos-renyi degenerate probabilities") {
    GraphTopology empty = erdos_renyi(5, 0.0, 7);
    CHECK(empty.edges().empty());
    CHECK(empty.n_min() == 1);
    CHECK(empty.n_max() == 1);

    GraphTopology full = erdos_renyi(5, 1.0, 7);
    CHECK(full.edges().size() == 10);
    CHECK(full.n_min() == 5);
}

TEST_CASE("erdos-renyi edge count concentrates around its mean") {
    // 435 candidate edges at p = 0.9.
    double total = 0.0;
    const int reps = 1000;
    for (int seed = 0; seed < reps; ++seed)
        total += static_cast<double>(erdos_renyi(30, 0.9, seed).edges().size());
    double mean = total / reps;
    CHECK(mean > 391.5 - 2.0);
    CHECK(mean < 391.5 + 2.0);
}

TEST_CASE("erdos-renyi is deterministic in the seed") {
    GraphTopology a = erdos_renyi(12, 0.5, 99);
    GraphTopology b = erdos_renyi(12, 0.5, 99);
    CHECK(a.edges() == b.edges());
    GraphTopology c = erdos_renyi(12, 0.5, 100);
    CHECK(a.edges() != c.edges());
}

TEST_CASE("laplacian of the path graph") {
    Eigen::MatrixXd l = laplacian(path_graph(3));
    Eigen::MatrixXd expected(3, 3);
    expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK((l - expected).norm() == 0.0);
}

TEST_CASE("laplacian rows sum to zero and the matrix is PSD") {
    for (int seed = 0; seed < 100; ++seed) {
        GraphTopology g = erdos_renyi(8, 0.5, 1000 + seed);
        Eigen::MatrixXd l = laplacian(g);
        CHECK((l * Eigen::VectorXd::Ones(8)).norm() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("exact graph invariants on named graphs") {
    GraphStats k5 = graph_stats(complete_graph(5));
    CHECK(k5.alpha == 1);
    CHECK(k5.gamma == 1);
    CHECK(k5.alpha2 == 1);
    CHECK(!k5.approximate);
    CHECK(k5.regular_degree == 4);

    GraphStats p4 = graph_stats(path_graph(4));
    CHECK(p4.alpha == 2);
    CHECK(p4.gamma == 2);
    CHECK(p4.alpha2 == 2);

    GraphStats c5 = graph_stats(cycle_graph(5));
    CHECK(c5.alpha == 2);
    CHECK(c5.gamma == 2);
    CHECK(c5.alpha2 == 1);
    CHECK(c5.regular_degree == 2);
}

TEST_CASE("invariant chain alpha2 <= gamma <= alpha <= n on random graphs") {
    Rng rng(4);
    std::uniform_int_distribution<int> pick_n(1, 7);
    std::uniform_real_distribution<double> pick_p(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        GraphTopology g = erdos_renyi(pick_n(rng), pick_p(rng), 5000 + trial);
        GraphStats st = graph_stats(g);
        CHECK(!st.approximate);
        CHECK(st.alpha2 <= st.gamma);
        CHECK(st.gamma <= st.alpha);
        CHECK(st.alpha <= g.n());
    }
}

TEST_CASE("greedy fallback is flagged and exact mode refuses large graphs") {
    GraphTopology g = erdos_renyi(20, 0.3, 11);
    GraphStats st = graph_stats(g);
    CHECK(st.approximate);
    CHECK(st.alpha2 <= st.alpha);  // greedy still respects the loose ends
    CHECK_THROWS_AS(graph_stats(g, 16, StatsMode::Exact), GraphError);
    // Greedy on a small graph still produces valid (if not optimal) sets.
    GraphStats greedy = graph_stats(path_graph(4), 16, StatsMode::Greedy);
    CHECK(greedy.approximate);
    CHECK(greedy.gamma >= 2);  // greedy never beats the optimum
}

TEST_CASE("disconnected vertices count as alpha2-compatible") {
    // Two far-apart components: every cross pair has infinite distance.
    GraphTopology g(4, {{0, 1}, {2, 3}});
    GraphStats st = graph_stats(g);
    CHECK(st.alpha2 == 2);
}

TEST_CASE("dominating delegation picks the smallest-index dominator") {
    CHECK(dominating_delegation(complete_graph(3), {1}) ==
          std::vector<int>{1, 1, 1});
    // Path 0-1-2 with both ends dominating: the middle goes to vertex 0.
    CHECK(dominating_delegation(path_graph(3), {0, 2}) ==
          std::vector<int>{0, 0, 2});
    CHECK_THROWS_AS(dominating_delegation(path_graph(3), {2}), GraphError);
}

TEST_CASE("edge-list serialization round-trips") {
    GraphTopology g = erdos_renyi(9, 0.4, 3);
    std::stringstream buf;
    write_edge_list(g, buf);
    GraphTopology back = read_edge_list(buf);
    CHECK(back.n() == g.n());
    CHECK(back.edges() == g.edges());
}

TEST_CASE("malformed edge lists are rejected with context") {
    std::stringstream missing_header("0 1\n");
    CHECK_THROWS_AS(read_edge_list(missing_header), GraphError);
    std::stringstream bad_pair("n=3\n0 7\n");
    CHECK_THROWS_AS(read_edge_list(bad_pair), GraphError);
}

TEST_CASE("graph construction rejects self-loops and out-of-range vertices") {
    CHECK_THROWS_AS(GraphTopology(3, {{1, 1}}), GraphError);
    CHECK_THROWS_AS(GraphTopology(3, {{0, 3}}), GraphError);
}

#include <doctest.h>

#include <cmath>
#include <optional>
#include <set>

#include "coolcn/engine.hpp"
#include "coolcn/rng.hpp"
#include "reference_mtftrl.hpp"

using namespace coolcn;

namespace {

Eigen::VectorXd randball(int d, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(d);
    for (int k = 0; k < d; ++k) v(k) = gauss(rng);
    double n = v.norm();
    if (n > 0) v *= scale / n;
    return v;
}

Stream random_quadratic_stream(int n, int d, long T, Rng& rng) {
    Stream s;
    for (long t = 0; t < T; ++t)
        s.push_back({static_cast<int>(rng() % n),
                     Loss::quadratic(randball(d, rng, 0.8))});
    return s;
}

}  // namespace

TEST_CASE("weight schemes on small graphs") {
    // Uniform on K3: every entry 1/3.
    WeightMatrix wk = make_weights(complete_graph(3), WeightScheme::Uniform);
    CHECK((wk.matrix().array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);

    // Stochastic-conditional on the path 0-1-2 with q = (1/2, 1/4, 1/4).
    std::vector<double> q{0.5, 0.25, 0.25};
    WeightMatrix ws =
        make_weights(path_graph(3), WeightScheme::StochasticConditional, q);
    CHECK(ws(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(ws(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(ws(0, 2) == 0.0);
    CHECK(ws(1, 1) == doctest::Approx(0.25));  // Q_1 = 1

    // Delegation: everyone points at their dominator.
    WeightMatrix wd = make_weights(complete_graph(3), WeightScheme::Delegation,
                                   {}, std::set<int>{1});
    for (int i = 0; i < 3; ++i) {
        CHECK(wd(i, 1) == 1.0);
        CHECK(wd.matrix().row(i).sum() == doctest::Approx(1.0));
    }
}

TEST_CASE("weight rows are stochastic and neighborhood-supported") {
    for (int seed = 0; seed < 20; ++seed) {
        GraphTopology g = erdos_renyi(8, 0.4, 40 + seed);
        std::vector<double> q(8, 0.125);
        for (auto scheme :
             {WeightScheme::Uniform, WeightScheme::StochasticConditional}) {
            WeightMatrix w = make_weights(g, scheme, q);
            for (int i = 0; i < 8; ++i) {
                CHECK(w.matrix().row(i).sum() == doctest::Approx(1.0));
                for (int j = 0; j < 8; ++j) {
                    CHECK(w(i, j) >= 0.0);
                    const auto& nb = g.neighborhood(i);
                    if (!std::binary_search(nb.begin(), nb.end(), j))
                        CHECK(w(i, j) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("invalid custom weights are rejected") {
    GraphTopology g = path_graph(3);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
    bad(0, 0) = 0.5;
    bad(0, 2) = 0.5;  // 2 is not a neighbor of 0
    bad.row(1) << 0, 1, 0;
    bad.row(2) << 0, 0.5, 0.5;
    CHECK_THROWS_AS(WeightMatrix(g, bad, WeightScheme::Custom),
                    std::invalid_argument);
    bad(0, 2) = 0.0;
    bad(0, 1) = 0.5;  // rows now fine except negative entry below
    CHECK_NOTHROW(WeightMatrix(g, bad, WeightScheme::Custom));
    bad(1, 0) = -0.1;
    bad(1, 1) = 1.1;
    CHECK_THROWS_AS(WeightMatrix(g, bad, WeightScheme::Custom),
                    std::invalid_argument);
    Eigen::MatrixXd short_row = Eigen::MatrixXd::Zero(3, 3);
    short_row(0, 0) = 0.7;  // row sums to 0.7
    short_row.row(1) << 0, 1, 0;
    short_row.row(2) << 0, 0, 1;
    CHECK_THROWS_AS(WeightMatrix(g, short_row, WeightScheme::Custom),
                    std::invalid_argument);
}

TEST_CASE("activation schedules validate and draw deterministically") {
    CHECK_THROWS_AS(validate_schedule(AdversarialSchedule{{0, 3}}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule(StochasticSchedule{{0.5, 0.6}, 1}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule(StochasticSchedule{{-0.1, 1.1}, 1}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule(RoundRobinSchedule{{}}, 2),
                    std::invalid_argument);

    auto rr = draw_activations(RoundRobinSchedule{{2, 0}}, 5, 3);
    CHECK(rr == std::vector<int>{2, 0, 2, 0, 2});

    StochasticSchedule st{{0.7, 0.3}, 99};
    auto a = draw_activations(st, 2000, 2);
    CHECK(a == draw_activations(st, 2000, 2));
    long zeros = std::count(a.begin(), a.end(), 0);
    CHECK(zeros > 1300);  // mean 1400, sd ~20
    CHECK(zeros < 1500);

    CHECK_THROWS_AS(draw_activations(AdversarialSchedule{{0}}, 2, 1),
                    std::invalid_argument);

    CHECK(neighborhood_activation_mass(path_graph(3), {0.5, 0.25, 0.25}, 0) ==
          doctest::Approx(0.75));
}

TEST_CASE("beta scales follow the two derivation modes") {
    GraphTopology g = path_graph(3);
    std::vector<double> q{0.5, 0.25, 0.25};
    WeightMatrix w = make_weights(g, WeightScheme::StochasticConditional, q);
    CHECK(max_incoming_weight(g, w, 0) ==
          doctest::Approx(std::max(w(0, 0), w(1, 0))));
    CHECK(derive_beta_scale(g, w, 0, BetaMode::Adversarial, nullptr) ==
          doctest::Approx(max_incoming_weight(g, w, 0)));
    double expect = std::sqrt((0.5 / 0.75) * w(0, 0) * w(0, 0) +
                              (0.25 / 0.75) * w(1, 0) * w(1, 0));
    CHECK(derive_beta_scale(g, w, 0, BetaMode::StochasticKnownQ, &q) ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(derive_beta_scale(g, w, 0, BetaMode::StochasticKnownQ,
                                      nullptr),
                    std::invalid_argument);
}

TEST_CASE("network construction rejects inconsistent options") {
    GraphTopology g = path_graph(2);
    WeightMatrix w = make_weights(g, WeightScheme::Uniform);
    EngineOptions opt;
    opt.beta_mode = BetaMode::StochasticKnownQ;  // but no q
    CHECK_THROWS_AS(NetworkState(g, w, 2, opt), std::invalid_argument);
    EngineOptions opt2;
    opt2.beta_scales = std::vector<double>{1.0};  // wrong length
    CHECK_THROWS_AS(NetworkState(g, w, 2, opt2), std::invalid_argument);
}

TEST_CASE("the first prediction is zero and pays the intercept loss") {
    GraphTopology g = erdos_renyi(5, 0.6, 2);
    NetworkState net(g, make_weights(g, WeightScheme::Uniform), 3);
    Eigen::VectorXd z(3);
    z << 0.3, -0.4, 0.1;
    StepRecord rec = net.step({2, Loss::quadratic(z)});
    CHECK(rec.prediction.norm() == 0.0);
    CHECK(rec.loss_value == doctest::Approx(0.5 * z.squaredNorm()));
    CHECK((rec.gradient + z).norm() == 0.0);
}

TEST_CASE("a one-agent network is a plain FTRL round") {
    GraphTopology g(1, {});
    NetworkState net(g, make_weights(g, WeightScheme::Uniform), 2);
    CliqueLearner solo(1, 2);  // beta_scale 1 = the lone incoming weight
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        Eigen::VectorXd z = randball(2, rng, 0.7);
        StepRecord rec = net.step({0, Loss::quadratic(z)});
        CHECK((rec.prediction - solo.predict(0)).norm() == 0.0);
        solo.update(0, rec.gradient);
    }
    CHECK(net.clique(0) == solo);
}

TEST_CASE("complete graph with uniform weights matches the dense reference") {
    const int n = 4, d = 3;
    GraphTopology g = complete_graph(n);
    NetworkState net(g, make_weights(g, WeightScheme::Uniform), d);
    RefMtFtrl ref(n, d, false, 1.0 / n);
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        int i = static_cast<int>(rng() % n);
        CHECK((net.model_row(0, i) - ref.predict(i)).norm() < 1e-9);
        StepRecord rec = net.step({i, Loss::quadratic(randball(d, rng, 0.9))});
        CHECK((rec.prediction - ref.predict(i)).norm() < 1e-9);
        ref.update(i, rec.gradient / n);
    }
}

TEST_CASE("messages stay inside the active agent's neighborhood") {
    Rng rng(7);
    for (int inst = 0; inst < 5; ++inst) {
        GraphTopology g = erdos_renyi(7, 0.4, 70 + inst);
        WeightMatrix w = make_weights(g, WeightScheme::Uniform);
        NetworkState net(g, w, 2);
        Stream stream = random_quadratic_stream(7, 2, 40, rng);
        for (const auto& entry : stream) {
            StepRecord rec = net.step(entry);
            const auto& nb = g.neighborhood(rec.active);
            REQUIRE(rec.fetched.size() == nb.size());
            REQUIRE(rec.sent.size() == nb.size());
            Eigen::VectorXd combo = Eigen::VectorXd::Zero(2);
            for (size_t k = 0; k < nb.size(); ++k) {
                CHECK(rec.fetched[k].first == nb[k]);
                CHECK(rec.sent[k].first == nb[k]);
                CHECK((rec.sent[k].second -
                       w(rec.active, nb[k]) * rec.gradient)
                          .norm() == 0.0);
                combo += w(rec.active, nb[k]) * rec.fetched[k].second;
            }
            // The prediction is exactly the weighted combination fetched.
            CHECK((combo - rec.prediction).norm() == 0.0);
        }
    }
}

TEST_CASE("each clique runs exactly as a standalone learner on its subsequence") {
    Rng rng(8);
    for (int inst = 0; inst < 20; ++inst) {
        int n = 2 + inst % 7;
        GraphTopology g = erdos_renyi(n, 0.5, 800 + inst);
        WeightMatrix w = make_weights(
            g, inst % 2 ? WeightScheme::Uniform
                        : WeightScheme::StochasticConditional,
            std::vector<double>(n, 1.0 / n));
        EngineOptions opt;
        opt.adaptivity = inst % 3 ? Adaptivity::Hedge : Adaptivity::KT;
        NetworkState net(g, w, 2, opt);
        Stream stream = random_quadratic_stream(n, 2, 60, rng);
        auto traj = net.run(stream);

        for (int j = 0; j < n; ++j) {
            CliqueOptions co;
            co.adaptivity = opt.adaptivity;
            double max_w = max_incoming_weight(g, w, j);
            co.lipschitz = max_w > 0.0 ? max_w * opt.raw_lipschitz
                                       : opt.raw_lipschitz;
            co.beta_scale =
                derive_beta_scale(g, w, j, BetaMode::Adversarial, nullptr);
            CliqueLearner solo(
                static_cast<int>(g.neighborhood(j).size()), 2, co);
            for (const auto& rec : traj)
                for (const auto& [dest, payload] : rec.sent)
                    if (dest == j)
                        solo.update(net.local_index(j, rec.active), payload);
            // Bit-level agreement, including every cached quantity.
            CHECK(net.clique(j).snapshot() == solo.snapshot());
        }
    }
}

TEST_CASE("network regret splits exactly into per-clique linear regrets") {
    Rng rng(9);
    GraphTopology g = erdos_renyi(6, 0.5, 31);
    WeightMatrix w = make_weights(g, WeightScheme::Uniform);
    NetworkState net(g, w, 3);
    Stream stream = random_quadratic_stream(6, 3, 80, rng);
    Eigen::MatrixXd u(6, 3);
    for (int i = 0; i < 6; ++i) u.row(i) = randball(3, rng, 1.0).transpose();

    double lhs = 0.0, rhs = 0.0;
    auto traj = net.run(stream);
    for (const auto& rec : traj) {
        lhs += rec.gradient.dot(rec.prediction -
                                u.row(rec.active).transpose());
        for (size_t k = 0; k < rec.sent.size(); ++k)
            rhs += rec.sent[k].second.dot(
                rec.fetched[k].second - u.row(rec.active).transpose());
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("message recording can be disabled without changing the run") {
    Rng rng(10);
    GraphTopology g = erdos_renyi(5, 0.6, 17);
    WeightMatrix w = make_weights(g, WeightScheme::Uniform);
    Stream stream = random_quadratic_stream(5, 2, 40, rng);
    EngineOptions quiet;
    quiet.record_messages = false;
    NetworkState a(g, w, 2), b(g, w, 2, quiet);
    auto ta = a.run(stream);
    auto tb = b.run(stream);
    for (size_t t = 0; t < stream.size(); ++t) {
        CHECK((ta[t].prediction - tb[t].prediction).norm() == 0.0);
        CHECK(tb[t].fetched.empty());
        CHECK(tb[t].sent.empty());
    }
    for (int j = 0; j < 5; ++j) CHECK(a.clique(j) == b.clique(j));
}

TEST_CASE("identical runs are identical") {
    Rng rng(11);
    GraphTopology g = erdos_renyi(6, 0.5, 23);
    WeightMatrix w = make_weights(g, WeightScheme::Uniform);
    Stream stream = random_quadratic_stream(6, 3, 50, rng);
    NetworkState a(g, w, 3), b(g, w, 3);
    auto ta = a.run(stream);
    auto tb = b.run(stream);
    for (size_t t = 0; t < stream.size(); ++t)
        CHECK((ta[t].prediction - tb[t].prediction).norm() == 0.0);
    for (int j = 0; j < 6; ++j) CHECK(a.clique(j) == b.clique(j));
}

TEST_CASE("warm-up length formula and its guard rails") {
    CHECK(two_phase_tau(1.0, 1, 100, 1.0) ==
          static_cast<long>(std::ceil(std::log(200.0))));
    CHECK(two_phase_tau(0.1, 4, 1000, 12.0) ==
          static_cast<long>(std::ceil(120.0 * std::log(32000.0))));
    CHECK_THROWS_AS(two_phase_tau(0.0, 3, 100), std::invalid_argument);
    CHECK_THROWS_AS(two_phase_tau(1.5, 3, 100), std::invalid_argument);
}

TEST_CASE("two-phase warm-up estimates frequencies then runs the engine") {
    // Single agent: pi_hat must be exactly 1 and the run must go through.
    {
        GraphTopology g(1, {});
        WeightMatrix w = make_weights(g, WeightScheme::Uniform);
        Rng rng(12);
        Stream stream = random_quadratic_stream(1, 2, 200, rng);
        TwoPhaseResult res = two_phase_unknown_q(g, w, 2, stream, 1.0);
        CHECK(res.pi_hat(0, 0) == 1.0);
        CHECK(res.beta_scales[0] == doctest::Approx(1.0));
        CHECK(res.trajectory.size() == stream.size());
        // Warm-up predictions are the zero model.
        for (long t = 0; t < res.tau; ++t)
            CHECK(res.trajectory[t].prediction.norm() == 0.0);
        // Afterwards the model moves.
        CHECK(res.trajectory.back().prediction.norm() > 0.0);
    }
    // Too-short horizon refuses to run.
    {
        GraphTopology g = path_graph(3);
        WeightMatrix w = make_weights(g, WeightScheme::Uniform);
        Rng rng(13);
        Stream stream = random_quadratic_stream(3, 2, 5, rng);
        CHECK_THROWS_AS(two_phase_unknown_q(g, w, 2, stream, 0.2),
                        std::invalid_argument);
    }
    // Frequencies per clique form a probability vector over its neighborhood.
    {
        GraphTopology g = erdos_renyi(4, 0.6, 3);
        WeightMatrix w = make_weights(g, WeightScheme::Uniform);
        std::vector<double> q{0.4, 0.3, 0.2, 0.1};
        auto acts = draw_activations(StochasticSchedule{q, 77}, 3000, 4);
        Rng rng(14);
        Stream stream;
        for (int i : acts)
            stream.push_back({i, Loss::quadratic(randball(2, rng, 0.5))});
        TwoPhaseResult res = two_phase_unknown_q(g, w, 2, stream, 0.1,
                                                 EngineOptions{},
                                                 TwoPhaseOptions{1.0});
        for (int j = 0; j < 4; ++j) {
            double col = 0.0;
            for (int i : g.neighborhood(j)) col += res.pi_hat(i, j);
            CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(res.beta_scales[j] > 0.0);
            // Outside the neighborhood nothing is estimated.
            for (int i = 0; i < 4; ++i) {
                const auto& nb = g.neighborhood(j);
                if (!std::binary_search(nb.begin(), nb.end(), i))
                    CHECK(res.pi_hat(i, j) == 0.0);
            }
        }
        // The estimate should land near the true conditionals.
        for (int j = 0; j < 4; ++j) {
            double big_q = neighborhood_activation_mass(g, q, j);
            for (int i : g.neighborhood(j))
                CHECK(std::abs(res.pi_hat(i, j) - q[i] / big_q) < 0.2);
        }
    }
}

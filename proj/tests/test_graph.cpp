#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "danneal/graph.hpp"
#include "danneal/rng.hpp"

using namespace danneal;

namespace {

GraphModel fixed_model(Eigen::MatrixXi adjacency) {
    GraphModel model;
    model.base_adjacency = std::move(adjacency);
    return model;
}

}  // namespace

TEST_CASE("named topologies") {
    const auto ring = ring_adjacency(5);
    CHECK(ring.rows() == 5);
    CHECK(ring == ring.transpose().eval());
    CHECK(ring.diagonal().isZero());
    for (int i = 0; i < 5; ++i) CHECK(ring.row(i).sum() == 2);

    const auto complete = complete_adjacency(4);
    for (int i = 0; i < 4; ++i) CHECK(complete.row(i).sum() == 3);

    const auto path = path_adjacency(4);
    CHECK(path.row(0).sum() == 1);
    CHECK(path.row(1).sum() == 2);
    CHECK(path.row(3).sum() == 1);

    const auto star = star_adjacency(5);
    CHECK(star.row(0).sum() == 4);  // hub
    CHECK(star.row(1).sum() == 1);

    CHECK_THROWS_AS(ring_adjacency(2), std::invalid_argument);
    CHECK_THROWS_AS(complete_adjacency(1), std::invalid_argument);
}

TEST_CASE("adjacency from an edge list") {
    const auto adj = adjacency_from_edges(4, {{0, 1}, {2, 3}});
    CHECK(adj(0, 1) == 1);
    CHECK(adj(1, 0) == 1);
    CHECK(adj(2, 3) == 1);
    CHECK(adj(0, 2) == 0);
    CHECK_THROWS_AS(adjacency_from_edges(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(adjacency_from_edges(3, {{1, 1}}), std::invalid_argument);
}

TEST_CASE("laplacian structure") {
    const auto lap = laplacian_from_adjacency(ring_adjacency(5));
    CHECK(lap == lap.transpose().eval());
    for (int i = 0; i < 5; ++i) {
        CHECK(lap.row(i).sum() == 0);
        CHECK(lap(i, i) == 2);
    }
}

TEST_CASE("neighbors of a ring vertex") {
    const LaplacianSample sample{laplacian_from_adjacency(ring_adjacency(5))};
    CHECK(neighbors(sample, 0) == std::vector<int>{1, 4});
    CHECK(neighbors(sample, 2) == std::vector<int>{1, 3});
    const LaplacianSample empty{Eigen::MatrixXi::Zero(3, 3)};
    CHECK(neighbors(empty, 1).empty());
}

TEST_CASE("spectral gap of the mean laplacian") {
    // ring on 5 vertices: lambda_2 = 2 - 2 cos(2 pi / 5)
    const double exact = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / 5.0);
    CHECK(lambda2_of_mean(fixed_model(ring_adjacency(5))) == doctest::Approx(exact).epsilon(1e-9));
    CHECK(lambda2_of_mean(fixed_model(ring_adjacency(5))) ==
          doctest::Approx(1.3819660112501051).epsilon(1e-12));

    // complete graph on n vertices: lambda_2 = n
    CHECK(lambda2_of_mean(fixed_model(complete_adjacency(4))) == doctest::Approx(4.0));

    // disconnected graph: lambda_2 = 0
    CHECK(lambda2_of_mean(fixed_model(adjacency_from_edges(4, {{0, 1}, {2, 3}}))) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // edge activation scales the mean laplacian, and with it lambda_2, by p
    GraphModel half = fixed_model(ring_adjacency(5));
    half.kind = GraphModel::Kind::EdgeActivation;
    half.activation_p = 0.5;
    CHECK(lambda2_of_mean(half) == doctest::Approx(0.5 * 1.3819660112501051).epsilon(1e-12));
    CHECK(mean_laplacian(half)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("fixed sampling consumes no randomness") {
    const GraphModel model = fixed_model(ring_adjacency(5));
    std::mt19937_64 rng_a(123), rng_b(123);
    const auto sample = danneal::sample(model, rng_a);
    CHECK(sample.laplacian == laplacian_from_adjacency(model.base_adjacency));
    CHECK(rng_a() == rng_b());  // untouched
}

TEST_CASE("edge activation keeps laplacian structure and hits p on average") {
    GraphModel model = fixed_model(complete_adjacency(6));
    model.kind = GraphModel::Kind::EdgeActivation;
    model.activation_p = 0.3;

    std::mt19937_64 rng = substream(42, 0, kStreamGraph);
    const int rounds = 20000;
    std::int64_t live_edges = 0;
    for (int i = 0; i < rounds; ++i) {
        const auto sample = danneal::sample(model, rng);
        const auto& lap = sample.laplacian;
        CHECK(lap == lap.transpose().eval());
        for (int r = 0; r < lap.rows(); ++r) CHECK(lap.row(r).sum() == 0);
        live_edges -= lap.sum() - lap.diagonal().sum();  // off-diagonal entries are -1 per arc
    }
    const double edges_per_round = static_cast<double>(live_edges) / 2.0 / rounds;
    CHECK(edges_per_round == doctest::Approx(0.3 * 15.0).epsilon(0.02));

    // p = 1 reproduces the base graph deterministically
    model.activation_p = 1.0;
    const auto all = danneal::sample(model, rng);
    CHECK(all.laplacian == laplacian_from_adjacency(model.base_adjacency));
}

TEST_CASE("sampling is reproducible from the stream seed") {
    GraphModel model = fixed_model(ring_adjacency(6));
    model.kind = GraphModel::Kind::EdgeActivation;
    model.activation_p = 0.5;
    std::mt19937_64 a = substream(7, 3, kStreamGraph);
    std::mt19937_64 b = substream(7, 3, kStreamGraph);
    for (int i = 0; i < 50; ++i) {
        CHECK(danneal::sample(model, a).laplacian == danneal::sample(model, b).laplacian);
    }
    // a different trial index decorrelates the draw sequence
    std::mt19937_64 c = substream(7, 4, kStreamGraph);
    bool any_difference = false;
    std::mt19937_64 a2 = substream(7, 3, kStreamGraph);
    for (int i = 0; i < 50 && !any_difference; ++i) {
        any_difference = danneal::sample(model, a2).laplacian != danneal::sample(model, c).laplacian;
    }
    CHECK(any_difference);
}

TEST_CASE("model validation") {
    GraphModel model = fixed_model(ring_adjacency(5));
    CHECK(model.violations().empty());

    model.base_adjacency(0, 1) = 0;  // break symmetry
    CHECK(!model.violations().empty());

    model = fixed_model(ring_adjacency(5));
    model.kind = GraphModel::Kind::EdgeActivation;
    model.activation_p = 0.0;
    CHECK(!model.violations().empty());
    model.activation_p = 1.5;
    CHECK(!model.violations().empty());
    model.activation_p = 0.5;
    CHECK(model.violations().empty());

    model.base_adjacency(2, 2) = 1;  // self loop
    CHECK(!model.violations().empty());
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
}

TEST_CASE("single vertex model is valid") {
    GraphModel model = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    CHECK(model.violations().empty());
    std::mt19937_64 rng(0);
    CHECK(danneal::sample(model, rng).laplacian(0, 0) == 0);
}

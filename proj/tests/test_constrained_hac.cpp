#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "support/oracles.hpp"
#include "tvdiar/constrained_hac.hpp"

using namespace tvdiar;
using doctest::Approx;

namespace {

hac::Instance inst(int id, std::initializer_list<double> coords, double mass = 1.0) {
    hac::Instance out;
    out.id = id;
    out.mass = mass;
    out.vector = Eigen::VectorXd(coords.size());
    int k = 0;
    for (double c : coords) out.vector(k++) = c;
    return out;
}

std::vector<hac::Instance> line_points(std::initializer_list<double> xs) {
    std::vector<hac::Instance> out;
    int id = 0;
    for (double x : xs) out.push_back(inst(id++, {x}));
    return out;
}

}  // namespace

TEST_CASE("constraint sets normalize and reject self pairs") {
    hac::ConstraintSet cs;
    CHECK(cs.empty());
    cs.add(3, 1);
    CHECK(cs.forbids(1, 3));
    CHECK(cs.forbids(3, 1));
    CHECK_FALSE(cs.forbids(1, 2));
    cs.add(1, 3);
    CHECK(cs.size() == 1);
    CHECK_THROWS_AS(cs.add(2, 2), std::invalid_argument);
}

TEST_CASE("ward cost of singleton merges is half the squared distance") {
    hac::ConstraintSet none;
    const auto a = inst(0, {0.0, 0.0});
    const auto b = inst(1, {3.0, 4.0});
    hac::ForestNode na, nb;
    na.node_id = 0;
    na.mass = 1.0;
    na.center = a.vector;
    na.members = {0};
    nb.node_id = 1;
    nb.mass = 1.0;
    nb.center = b.vector;
    nb.members = {1};
    CHECK(hac::ward_delta(na, nb, none) == Approx(12.5));  // 25 / 2

    SUBCASE("mass weighting") {
        nb.mass = 3.0;
        CHECK(hac::ward_delta(na, nb, none) == Approx(25.0 * 3.0 / 4.0));
    }
    SUBCASE("coincident centers cost nothing") {
        nb.center = na.center;
        CHECK(hac::ward_delta(na, nb, none) == Approx(0.0));
    }
    SUBCASE("a forbidden cross pair makes the cost infinite") {
        hac::ConstraintSet cs;
        cs.add(0, 1);
        CHECK(std::isinf(hac::ward_delta(na, nb, cs)));
    }
}

TEST_CASE("unconstrained agglomeration builds one tree") {
    const auto forest = hac::agglomerate(line_points({0.0, 1.0, 10.0}), {});
    CHECK(forest.leaf_count == 3);
    REQUIRE(forest.roots.size() == 1);
    REQUIRE(forest.nodes.size() == 5);

    const auto& first = forest.nodes[3];
    CHECK(first.left == 0);
    CHECK(first.right == 1);
    CHECK(first.height == Approx(0.5));
    CHECK(first.center(0) == Approx(0.5));
    CHECK(first.mass == Approx(2.0));
    CHECK(first.members == std::vector<int>{0, 1});

    const auto& root = forest.nodes[4];
    CHECK(root.left == 2);
    CHECK(root.right == 3);
    CHECK(root.height == Approx((2.0 / 3.0) * 9.5 * 9.5));
    CHECK(root.members == std::vector<int>{0, 1, 2});
}

TEST_CASE("agglomeration input validation") {
    CHECK_THROWS_AS(hac::agglomerate({}, {}), std::invalid_argument);

    auto dup = line_points({0.0, 1.0});
    dup[1].id = dup[0].id;
    CHECK_THROWS_AS(hac::agglomerate(dup, {}), std::invalid_argument);

    auto mixed = line_points({0.0, 1.0});
    mixed[1].vector = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(hac::agglomerate(mixed, {}), std::invalid_argument);

    auto weightless = line_points({0.0, 1.0});
    weightless[0].mass = 0.0;
    CHECK_THROWS_AS(hac::agglomerate(weightless, {}), std::invalid_argument);
}

TEST_CASE("fully constrained input stays a forest of leaves") {
    hac::ConstraintSet cs;
    cs.add(0, 1);
    cs.add(0, 2);
    cs.add(1, 2);
    const auto forest = hac::agglomerate(line_points({0.0, 0.1, 0.2}), cs);
    CHECK(forest.nodes.size() == 3);
    CHECK(forest.roots == std::vector<int>{0, 1, 2});
}

TEST_CASE("constraints propagate to merged clusters") {
    // two tight pairs; cross links forbid any mixing, leaving two trees
    hac::ConstraintSet cs;
    cs.add(0, 2);
    cs.add(1, 3);
    const auto forest = hac::agglomerate(line_points({0.0, 0.1, 10.0, 10.1}), cs);
    REQUIRE(forest.roots.size() == 2);
    std::set<std::vector<int>> groups;
    for (int r : forest.roots) groups.insert(forest.nodes[r].members);
    CHECK(groups == std::set<std::vector<int>>{{0, 1}, {2, 3}});

    // a single cross link still splits the forest after repeated merges
    hac::ConstraintSet only_one;
    only_one.add(0, 5);
    const auto two_blobs =
        hac::agglomerate(line_points({0.0, 0.1, 0.2, 10.0, 10.1, 10.2}), only_one);
    REQUIRE(two_blobs.roots.size() == 2);
    groups.clear();
    for (int r : two_blobs.roots) groups.insert(two_blobs.nodes[r].members);
    CHECK(groups == std::set<std::vector<int>>{{0, 1, 2}, {3, 4, 5}});
}

TEST_CASE("ties break toward the smallest node id pair") {
    // three equidistant-by-pairs points on a line: 0-1 and 1-2 both cost 0.5
    const auto forest = hac::agglomerate(line_points({0.0, 1.0, 2.0}), {});
    const auto& first = forest.nodes[3];
    CHECK(first.left == 0);
    CHECK(first.right == 1);
}

TEST_CASE("agglomeration replays a from scratch oracle") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + int(rng() % 18);
        const int d = 1 + int(rng() % 6);
        const auto instances = oracles::random_instances(rng, n, d);
        const auto cs = oracles::random_constraints(rng, n, 0.02 * double(rng() % 20));
        const auto forest = hac::agglomerate(instances, cs);
        const auto merges = oracles::oracle_agglomerate(instances, cs);

        REQUIRE(forest.nodes.size() == std::size_t(n) + merges.size());
        for (std::size_t k = 0; k < merges.size(); ++k) {
            const auto& node = forest.nodes[std::size_t(n) + k];
            CHECK(node.left == merges[k].left);
            CHECK(node.right == merges[k].right);
            CHECK(node.height == Approx(merges[k].height).epsilon(1e-9));
        }
    }
}

TEST_CASE("heights are nondecreasing along every unconstrained tree") {
    std::mt19937_64 rng(43);
    const auto instances = oracles::random_instances(rng, 40, 4);
    const auto forest = hac::agglomerate(instances, {});
    for (const auto& node : forest.nodes) {
        if (node.is_leaf()) continue;
        CHECK(node.height >= forest.nodes[node.left].height - 1e-12);
        CHECK(node.height >= forest.nodes[node.right].height - 1e-12);
    }
}

TEST_CASE("silhouette closed forms") {
    auto dist_of = [](const std::vector<hac::Instance>& xs) {
        return hac::pairwise_distances(xs);
    };
    const auto points = line_points({0.0, 0.1, 10.0, 10.1});
    const auto d = dist_of(points);

    hac::Partition split;
    split.cluster_of = {0, 0, 1, 1};
    split.cluster_count = 2;
    const double expected = 0.5 * (9.95 / 10.05 + 9.85 / 9.95);
    CHECK(hac::silhouette_score(split, d) == Approx(expected));
    CHECK(hac::silhouette_score(split, d) == Approx(0.99).epsilon(1e-3));

    hac::Partition lumped;
    lumped.cluster_of = {0, 0, 0, 0};
    lumped.cluster_count = 1;
    CHECK(hac::silhouette_score(lumped, d) == Approx(0.0));

    hac::Partition singletons;
    singletons.cluster_of = {0, 1, 2, 3};
    singletons.cluster_count = 4;
    CHECK(hac::silhouette_score(singletons, d) == Approx(0.0));

    hac::Partition tiny;
    tiny.cluster_of = {0};
    tiny.cluster_count = 1;
    CHECK_THROWS_AS(hac::silhouette_score(tiny, Eigen::MatrixXd::Zero(1, 1)),
                    std::invalid_argument);
}

TEST_CASE("forest cutting recovers planted splits") {
    const auto points = line_points({0.0, 0.1, 10.0, 10.1});
    const auto d = hac::pairwise_distances(points);

    SUBCASE("one tree cut into the two tight pairs") {
        const auto forest = hac::agglomerate(points, {});
        const auto cut = hac::cut_forest(forest, d);
        CHECK(cut.cluster_count == 2);
        CHECK(cut.cluster_of[0] == cut.cluster_of[1]);
        CHECK(cut.cluster_of[2] == cut.cluster_of[3]);
        CHECK(cut.cluster_of[0] != cut.cluster_of[2]);
    }
    SUBCASE("two constrained trees cut independently with unique ids") {
        hac::ConstraintSet cs;
        cs.add(0, 2);
        cs.add(1, 3);
        const auto forest = hac::agglomerate(points, cs);
        REQUIRE(forest.roots.size() == 2);
        const auto cut = hac::cut_forest(forest, d);
        CHECK(cut.cluster_count == 2);
        CHECK(cut.cluster_of[0] == cut.cluster_of[1]);
        CHECK(cut.cluster_of[2] == cut.cluster_of[3]);
        CHECK(cut.cluster_of[0] != cut.cluster_of[2]);
    }
    SUBCASE("single leaf trees become singleton clusters") {
        hac::ConstraintSet cs;
        cs.add(0, 1);
        const auto pair = line_points({5.0, 5.5});
        const auto forest = hac::agglomerate(pair, cs);
        const auto cut = hac::cut_forest(forest, hac::pairwise_distances(pair));
        CHECK(cut.cluster_count == 2);
        CHECK(cut.cluster_of[0] != cut.cluster_of[1]);
    }
}

TEST_CASE("forest cutting prefers fewer clusters on ties and separates planted blobs") {
    std::mt19937_64 rng(47);
    int recovered = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 3;
        std::vector<int> truth;
        const auto instances = oracles::planted_clusters(rng, k, 15, 4, 9.0, &truth);
        const auto forest = hac::agglomerate(instances, {});
        const auto cut = hac::cut_forest(forest, hac::pairwise_distances(instances));
        if (cut.cluster_count != k) continue;
        bool consistent = true;
        for (std::size_t i = 0; i < truth.size() && consistent; ++i)
            for (std::size_t j = i + 1; j < truth.size() && consistent; ++j)
                consistent = (truth[i] == truth[j]) ==
                             (cut.cluster_of[i] == cut.cluster_of[j]);
        if (consistent) ++recovered;
    }
    CHECK(recovered >= 19);
}

TEST_CASE("pairwise distance matrix") {
    const auto points = line_points({0.0, 3.0});
    const auto d = hac::pairwise_distances(points);
    CHECK(d(0, 0) == Approx(0.0));
    CHECK(d(0, 1) == Approx(3.0));
    CHECK(d(1, 0) == Approx(3.0));
}

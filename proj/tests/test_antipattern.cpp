#include "archeval/antipattern.hpp"

#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace archeval;

namespace {

ArchGraph nodes_with_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
    ArchGraph g;
    for (int i = 0; i < n; ++i) {
        g.add_node({"n" + std::to_string(i), "Node " + std::to_string(i), {},
                    NodeKind::component, {}, {}});
    }
    for (auto [s, t] : edges) {
        g.add_edge({"n" + std::to_string(s), "n" + std::to_string(t), {}, EdgeStyle::solid, {}});
    }
    return g;
}

}  // namespace

TEST_CASE("orphans are nodes without any data flow") {
    ArchGraph g = nodes_with_edges(4, {{0, 1}});
    auto [ratio, orphans] = orphan_ratio(g);
    CHECK(ratio == doctest::Approx(0.5));
    REQUIRE(orphans.size() == 2);
    CHECK(orphans[0] == "n2");
    CHECK(orphans[1] == "n3");

    ArchGraph full = nodes_with_edges(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(orphan_ratio(full).first == 0.0);

    CHECK(orphan_ratio(ArchGraph{}).first == 0.0);
}

TEST_CASE("containers inherit connectivity from descendants") {
    // P contains x; edge x->y; z floats free.
    // hand application: P is connected via x, so orphans = {z}, ratio 1/4
    ArchGraph g;
    g.add_node({"P", "P", {}, NodeKind::package_kind, {}, {}});
    g.add_node({"x", "x", {}, NodeKind::component, {}, "P"});
    g.add_node({"y", "y", {}, NodeKind::component, {}, {}});
    g.add_node({"z", "z", {}, NodeKind::component, {}, {}});
    g.add_edge({"x", "y", {}, EdgeStyle::solid, {}});

    auto [ratio, orphans] = orphan_ratio(g);
    CHECK(ratio == doctest::Approx(0.25));
    REQUIRE(orphans.size() == 1);
    CHECK(orphans[0] == "z");

    AntiPatternOptions strict;
    strict.containers_inherit_connectivity = false;
    auto [strict_ratio, strict_orphans] = orphan_ratio(g, strict);
    CHECK(strict_ratio == doctest::Approx(0.5));  // P and z by raw degree
    CHECK(strict_orphans.size() == 2);
}

TEST_CASE("god detection on the 21-node star") {
    // degrees: hub 20, twenty leaves 1 each
    // mean = 40/21 = 1.904762; E[d^2] = 420/21 = 20
    // variance = 20 - mean^2 = 16.37188; population sigma = 4.046218
    // tau = mean + 2 sigma = 9.997198; only the hub exceeds it
    ArchGraph star;
    star.add_node({"hub", "hub", {}, NodeKind::component, {}, {}});
    for (int i = 0; i < 20; ++i) {
        std::string id = "leaf" + std::to_string(i);
        star.add_node({id, id, {}, NodeKind::component, {}, {}});
        star.add_edge({"hub", id, {}, EdgeStyle::solid, {}});
    }
    auto [ratio, gods, stats] = god_ratio(star);
    CHECK(stats.mean == doctest::Approx(1.9048).epsilon(1e-4));
    CHECK(stats.stddev == doctest::Approx(4.046).epsilon(1e-3));
    CHECK(stats.threshold == doctest::Approx(9.997).epsilon(1e-3));
    REQUIRE(gods.size() == 1);
    CHECK(gods[0] == "hub");
    CHECK(ratio == doctest::Approx(0.0476).epsilon(1e-3));
}

TEST_CASE("uniform degree distributions produce no gods") {
    ArchGraph ring = nodes_with_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
    auto [ratio, gods, stats] = god_ratio(ring);
    CHECK(stats.stddev == doctest::Approx(0.0));
    CHECK(stats.threshold == doctest::Approx(2.0));
    CHECK(gods.empty());
    CHECK(ratio == 0.0);

    auto [empty_ratio, empty_gods, empty_stats] = god_ratio(ArchGraph{});
    CHECK(empty_ratio == 0.0);
    CHECK(empty_gods.empty());

    ArchGraph lone = nodes_with_edges(1, {});
    CHECK(std::get<1>(god_ratio(lone)).empty());
}

TEST_CASE("a node at exactly tau is not a god") {
    // degrees 0 and 2: mean 1, sigma 1, tau 3; degree-2 node stays below.
    // degrees {4,1,1,1,1}: mean 1.6, var (16+4*1)/5 - 2.56 = 1.44, sigma 1.2,
    // tau = 4.0 exactly; the hub with degree 4 must not be flagged.
    ArchGraph g = nodes_with_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    auto [ratio, gods, stats] = god_ratio(g);
    CHECK(stats.threshold == doctest::Approx(4.0));
    CHECK(gods.empty());
    CHECK(ratio == 0.0);
}

TEST_CASE("threshold always equals mean plus two stddev") {
    std::mt19937 rng(42);
    for (int round = 0; round < 30; ++round) {
        ArchGraph g = testing::random_graph(rng, 12, 16, true);
        auto [ratio, gods, stats] = god_ratio(g);
        CHECK(stats.threshold == doctest::Approx(stats.mean + 2.0 * stats.stddev).epsilon(1e-12));
        CHECK(ratio >= 0.0);
        CHECK(ratio <= 1.0);
    }
}

TEST_CASE("adding an edge never increases the orphan count") {
    std::mt19937 rng(43);
    for (int round = 0; round < 30; ++round) {
        ArchGraph g = testing::random_graph(rng, 10, 8, true);
        if (g.nodes().size() < 2) continue;
        auto before = orphan_ratio(g).second.size();
        ArchGraph extended = g;
        extended.add_edge({g.nodes().front().id, g.nodes().back().id, {}, EdgeStyle::solid, {}});
        auto after = orphan_ratio(extended).second.size();
        CHECK(after <= before);
    }
}

TEST_CASE("gods and orphans are disjoint") {
    std::mt19937 rng(44);
    for (int round = 0; round < 30; ++round) {
        ArchGraph g = testing::random_graph(rng, 14, 20, true);
        auto orphans = orphan_ratio(g).second;
        auto gods = std::get<1>(god_ratio(g));
        for (const auto& god : gods) {
            CHECK(std::find(orphans.begin(), orphans.end(), god) == orphans.end());
        }
    }
}

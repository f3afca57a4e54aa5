#include "archeval/graph.hpp"

#include <random>

#include "archeval/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace archeval;

namespace {

ArchGraph app_ui_db() {
    ArchGraph g;
    g.add_node({"App", "App", {}, NodeKind::package_kind, {}, {}});
    g.add_node({"UI", "UI", {}, NodeKind::component, {}, "App"});
    g.add_node({"DB", "DB", {}, NodeKind::database, {}, {}});
    g.add_edge({"UI", "DB", {}, EdgeStyle::solid, {}});
    return g;
}

}  // namespace

TEST_CASE("leaf_nodes returns childless nodes in declaration order") {
    CHECK(leaf_nodes(app_ui_db()) == std::vector<std::string>{"UI", "DB"});

    ArchGraph single;
    single.add_node({"X", "X", {}, NodeKind::component, {}, {}});
    CHECK(leaf_nodes(single) == std::vector<std::string>{"X"});

    CHECK(leaf_nodes(ArchGraph{}).empty());
}

TEST_CASE("degree counts relation edges only") {
    ArchGraph star;
    star.add_node({"hub", "hub", {}, NodeKind::component, {}, {}});
    for (const char* leaf : {"a", "b", "c"}) {
        star.add_node({leaf, leaf, {}, NodeKind::component, {}, {}});
        star.add_edge({"hub", leaf, {}, EdgeStyle::solid, {}});
    }
    CHECK(degree(star, "hub") == 3);
    CHECK(degree(star, "a") == 1);

    ArchGraph iso;
    iso.add_node({"x", "x", {}, NodeKind::component, {}, {}});
    CHECK(degree(iso, "x") == 0);

    // self-loop: hand enumeration of incident endpoints gives (a,a) twice
    ArchGraph loop;
    loop.add_node({"a", "a", {}, NodeKind::component, {}, {}});
    loop.add_edge({"a", "a", {}, EdgeStyle::solid, {}});
    CHECK(degree(loop, "a") == 2);

    CHECK_THROWS_AS(degree(loop, "ghost"), Error);
}

TEST_CASE("containment does not contribute to degree") {
    ArchGraph g = app_ui_db();
    CHECK(degree(g, "App") == 0);
}

TEST_CASE("degree sum equals twice the edge count") {
    std::mt19937 rng(7);
    for (int round = 0; round < 50; ++round) {
        ArchGraph g = testing::random_graph(rng, 10, 14, true);
        std::size_t total = 0;
        for (const ArchNode& n : g.nodes()) total += degree(g, n.id);
        CHECK(total == 2 * g.edges().size());
    }
}

TEST_CASE("layer_of maps the outermost ancestor container") {
    ArchGraph g;
    g.add_node({"AL", "Application Layer", {}, NodeKind::package_kind, {}, {}});
    g.add_node({"svc", "Scheduler", {}, NodeKind::component, {}, "AL"});
    g.add_node({"sub", "Inner", {}, NodeKind::package_kind, {}, "AL"});
    g.add_node({"deep", "Deep Component", {}, NodeKind::component, {}, "sub"});
    g.add_node({"free", "Floating", {}, NodeKind::component, {}, {}});
    g.add_node({"ext", "External Services", {}, NodeKind::package_kind, {}, {}});
    g.add_node({"api", "Weather API", {}, NodeKind::component, {}, "ext"});

    LayerMap map = LayerMap::defaults();
    CHECK(layer_of(g, "svc", map) == "application");
    CHECK(layer_of(g, "deep", map) == "application");
    CHECK(layer_of(g, "free", map) == "unlayered");
    CHECK(layer_of(g, "api", map) == "other:external services");

    // user-extensible mapping, non-ASCII container name
    ArchGraph de;
    de.add_node({"P", "Pr\xC3\xA4sentation", {}, NodeKind::package_kind, {}, {}});
    de.add_node({"w", "Widget", {}, NodeKind::component, {}, "P"});
    LayerMap custom = LayerMap::defaults();
    custom.add("pr\xC3\xA4sentation", "application");
    CHECK(layer_of(de, "w", custom) == "application");

    CHECK_THROWS_AS(layer_of(g, "ghost", map), Error);
}

TEST_CASE("graph construction enforces invariants") {
    ArchGraph g;
    g.add_node({"a", "a", {}, NodeKind::component, {}, {}});
    CHECK_THROWS_AS(g.add_node({"a", "again", {}, NodeKind::component, {}, {}}), Error);
    CHECK_THROWS_AS(g.add_node({"b", "", {}, NodeKind::component, {}, {}}), Error);
    CHECK_THROWS_AS(g.add_node({"c", "c", {}, NodeKind::component, {}, "missing"}), Error);
    CHECK_THROWS_AS(g.add_edge({"a", "ghost", {}, EdgeStyle::solid, {}}), Error);
}

TEST_CASE("leaves and containers partition the node set") {
    std::mt19937 rng(11);
    for (int round = 0; round < 30; ++round) {
        ArchGraph g = testing::random_graph(rng, 12, 6, true);
        auto leaves = leaf_nodes(g);
        auto containers = container_nodes(g);
        CHECK(leaves.size() + containers.size() == g.nodes().size());
    }
}

TEST_CASE("canonical_serialize emits the minimal document for empty graphs") {
    CHECK(canonical_serialize(ArchGraph{}) == "@startuml\n@enduml");
}

TEST_CASE("canonical_serialize is declaration-order independent") {
    ArchGraph first;
    first.add_node({"App", "App", {}, NodeKind::package_kind, {}, {}});
    first.add_node({"UI", "UI", {}, NodeKind::component, {}, "App"});
    first.add_node({"DB", "DB", {}, NodeKind::database, {}, {}});
    first.add_edge({"UI", "DB", {"query"}, EdgeStyle::solid, {}});

    ArchGraph second;
    second.add_node({"App", "App", {}, NodeKind::package_kind, {}, {}});
    second.add_node({"DB", "DB", {}, NodeKind::database, {}, {}});
    second.add_node({"UI", "UI", {}, NodeKind::component, {}, "App"});
    second.add_edge({"UI", "DB", {"query"}, EdgeStyle::solid, {}});

    CHECK(canonical_serialize(first) == canonical_serialize(second));
}

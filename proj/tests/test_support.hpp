#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "archeval/graph.hpp"
#include "archeval/text.hpp"

namespace archeval::testing {

// Containment path of a node: "root/child/.../name" by display names.
inline std::string parent_path(const ArchGraph& g, const ArchNode& n) {
    std::string path = n.display_name;
    const ArchNode* cur = &n;
    while (cur->parent) {
        cur = &g.at(*cur->parent);
        path = cur->display_name + "/" + path;
    }
    return path;
}

// Order-independent structural signature: node multiset keyed by
// (display, kind, parent path) plus edge multiset keyed by resolved
// endpoint paths, label and style. Two graphs are considered isomorphic for
// round-trip purposes iff their signatures are equal.
inline std::vector<std::string> graph_signature(const ArchGraph& g) {
    std::vector<std::string> sig;
    for (const ArchNode& n : g.nodes()) {
        sig.push_back("n|" + n.display_name + "|" + std::string(to_string(n.kind)) + "|" +
                      parent_path(g, n));
    }
    for (const ArchEdge& e : g.edges()) {
        sig.push_back("e|" + parent_path(g, g.at(e.source)) + "|" +
                      parent_path(g, g.at(e.target)) + "|" + e.label.value_or("") + "|" +
                      (e.style == EdgeStyle::dashed ? "dashed" : "solid"));
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

// Deterministic random graph for property tests.
inline ArchGraph random_graph(std::mt19937& rng, std::size_t max_nodes, std::size_t max_edges,
                              bool with_containers = false) {
    static const char* kNames[] = {
        "User Service", "Auth Service", "Database", "MySQL", "Cache", "Redis",
        "API Gateway", "Frontend", "Web UI", "Queue", "Kafka", "Scheduler",
        "Payment", "Logger", "Search", "Monitor", "Config", "Worker",
    };
    ArchGraph g;
    std::uniform_int_distribution<std::size_t> node_count(0, max_nodes);
    std::size_t n = node_count(rng);
    std::uniform_int_distribution<std::size_t> name_pick(0, std::size(kNames) - 1);
    for (std::size_t i = 0; i < n; ++i) {
        ArchNode node;
        node.id = "n" + std::to_string(i);
        node.display_name = kNames[name_pick(rng)];
        node.kind = NodeKind::component;
        if (with_containers && i > 0) {
            std::uniform_int_distribution<int> parent_pick(-2, static_cast<int>(i) - 1);
            int p = parent_pick(rng);
            if (p >= 0) node.parent = "n" + std::to_string(p);
        }
        g.add_node(node);
    }
    if (n > 0) {
        std::uniform_int_distribution<std::size_t> edge_count(0, max_edges);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::size_t m = edge_count(rng);
        for (std::size_t i = 0; i < m; ++i) {
            ArchEdge e;
            e.source = "n" + std::to_string(pick(rng));
            e.target = "n" + std::to_string(pick(rng));
            g.add_edge(e);
        }
    }
    return g;
}

}  // namespace archeval::testing

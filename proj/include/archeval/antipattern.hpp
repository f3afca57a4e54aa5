#pragma once

#include <cmath>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "archeval/graph.hpp"

namespace archeval {

/// Degree distribution statistics backing the god-component threshold.
struct DegreeStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    double threshold = 0.0;  // mean + 2 * stddev
};

struct AntiPatternReport {
    double orphan_ratio = 0.0;
    std::vector<std::string> orphans;
    double god_ratio = 0.0;
    std::vector<std::string> gods;
    DegreeStats stats;
};

struct AntiPatternOptions {
    /// When set, a container counts as connected if any containment
    /// descendant touches a relation edge. Strict mode uses raw per-node
    /// degree instead.
    bool containers_inherit_connectivity = true;
};

namespace detail {

inline std::unordered_map<std::string, std::size_t> degree_table(const ArchGraph& g) {
    std::unordered_map<std::string, std::size_t> deg;
    for (const ArchNode& n : g.nodes()) deg.emplace(n.id, 0);
    for (const ArchEdge& e : g.edges()) {
        deg[e.source] += 1;
        deg[e.target] += 1;
    }
    return deg;
}

}  // namespace detail

/// Nodes with no incoming or outgoing data flow. Containers inherit
/// connectivity from their descendants unless strict mode is selected; the
/// denominator is always the full node count.
inline std::pair<double, std::vector<std::string>> orphan_ratio(
    const ArchGraph& graph, const AntiPatternOptions& options = {}) {
    if (graph.nodes().empty()) return {0.0, {}};
    auto deg = detail::degree_table(graph);

    std::unordered_set<std::string> connected;
    for (const ArchNode& n : graph.nodes()) {
        if (deg[n.id] == 0) continue;
        connected.insert(n.id);
        if (options.containers_inherit_connectivity) {
            const ArchNode* cur = &n;
            while (cur->parent) {
                connected.insert(*cur->parent);
                cur = &graph.at(*cur->parent);
            }
        }
    }
    std::vector<std::string> orphans;
    for (const ArchNode& n : graph.nodes()) {
        if (!connected.count(n.id)) orphans.push_back(n.id);
    }
    double ratio = static_cast<double>(orphans.size()) / static_cast<double>(graph.nodes().size());
    return {ratio, std::move(orphans)};
}

/// Nodes whose total degree strictly exceeds tau = mean + 2 * population
/// stddev of the degree distribution. Graphs with fewer than two nodes have
/// no gods.
inline std::tuple<double, std::vector<std::string>, DegreeStats> god_ratio(const ArchGraph& graph) {
    DegreeStats stats;
    if (graph.nodes().empty()) return {0.0, {}, stats};
    auto deg = detail::degree_table(graph);

    const double n = static_cast<double>(graph.nodes().size());
    long long count = static_cast<long long>(graph.nodes().size());
    long long sum = 0, sum_sq = 0;
    for (const ArchNode& node : graph.nodes()) {
        long long d = static_cast<long long>(deg[node.id]);
        sum += d;
        sum_sq += d * d;
    }
    stats.mean = static_cast<double>(sum) / n;
    double variance = std::max(0.0, static_cast<double>(sum_sq) / n - stats.mean * stats.mean);
    stats.stddev = std::sqrt(variance);
    stats.threshold = stats.mean + 2.0 * stats.stddev;

    // strict d > mean + 2*sigma, decided exactly in integers:
    // (d*n - S)^2 > 4*(Q*n - S^2) with d > mean, S = sum, Q = sum of squares
    std::vector<std::string> gods;
    if (graph.nodes().size() >= 2) {
        for (const ArchNode& node : graph.nodes()) {
            long long d = static_cast<long long>(deg[node.id]);
            long long lhs = d * count - sum;
            if (lhs <= 0) continue;
            if (lhs * lhs > 4 * (sum_sq * count - sum * sum)) gods.push_back(node.id);
        }
    }
    double ratio = static_cast<double>(gods.size()) / n;
    return {ratio, std::move(gods), stats};
}

inline AntiPatternReport detect_antipatterns(const ArchGraph& graph,
                                             const AntiPatternOptions& options = {}) {
    AntiPatternReport report;
    auto [oratio, orphans] = orphan_ratio(graph, options);
    report.orphan_ratio = oratio;
    report.orphans = std::move(orphans);
    auto [gratio, gods, stats] = god_ratio(graph);
    report.god_ratio = gratio;
    report.gods = std::move(gods);
    report.stats = stats;
    return report;
}

}  // namespace archeval

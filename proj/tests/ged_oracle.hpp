#pragma once

// Exhaustive graph-edit-distance oracle for small instances. Enumerates
// every injective partial node map and evaluates its edit cost from first
// principles; deliberately shares no search or bookkeeping code with the
// library implementation it is used to check.

#include <algorithm>
#include <string>
#include <vector>

#include "archeval/alignment.hpp"
#include "archeval/graph.hpp"
#include "archeval/metrics.hpp"

namespace archeval::testing {

namespace oracle_detail {

struct FlatGraph {
    std::vector<std::string> labels;                   // joined normalized tokens
    std::vector<std::string> concepts;                 // synonym concept or ""
    std::vector<std::pair<int, int>> edges;            // by node index
};

inline FlatGraph flatten(const ArchGraph& g, const SynonymTable& synonyms) {
    FlatGraph f;
    std::unordered_map<std::string, int> index;
    for (const ArchNode& n : g.nodes()) {
        index[n.id] = static_cast<int>(f.labels.size());
        auto tokens = normalize_label(n.display_name);
        f.labels.push_back(text::join(tokens, " "));
        auto c = synonyms.concept_of(tokens);
        f.concepts.push_back(c.value_or(""));
    }
    for (const ArchEdge& e : g.edges()) {
        f.edges.emplace_back(index[e.source], index[e.target]);
    }
    return f;
}

inline int map_cost(const FlatGraph& p, const FlatGraph& r, const std::vector<int>& assign,
                    const CostModel& costs) {
    int cost = 0;
    std::vector<bool> used(r.labels.size(), false);
    for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] < 0) {
            cost += costs.node_delete;
            continue;
        }
        used[static_cast<std::size_t>(assign[i])] = true;
        bool label_match = !p.labels[i].empty() && p.labels[i] == r.labels[assign[i]];
        if (p.labels[i].empty() && r.labels[assign[i]].empty()) label_match = true;
        bool concept_match =
            !p.concepts[i].empty() && p.concepts[i] == r.concepts[assign[i]];
        if (!label_match && !concept_match) cost += costs.node_substitute;
    }
    for (std::size_t j = 0; j < r.labels.size(); ++j) {
        if (!used[j]) cost += costs.node_insert;
    }

    // translate pred edges, then match off against a copy of ref edges
    std::vector<std::pair<int, int>> ref_edges = r.edges;
    for (const auto& [a, b] : p.edges) {
        int sa = assign[static_cast<std::size_t>(a)];
        int sb = assign[static_cast<std::size_t>(b)];
        bool matched = false;
        if (sa >= 0 && sb >= 0) {
            auto it = std::find(ref_edges.begin(), ref_edges.end(), std::make_pair(sa, sb));
            if (it != ref_edges.end()) {
                ref_edges.erase(it);
                matched = true;
            }
        }
        if (!matched) cost += costs.edge_delete;
    }
    cost += static_cast<int>(ref_edges.size()) * costs.edge_insert;
    return cost;
}

inline void enumerate(const FlatGraph& p, const FlatGraph& r, std::vector<int>& assign,
                      std::vector<bool>& used, std::size_t k, const CostModel& costs,
                      int& best) {
    if (k == assign.size()) {
        best = std::min(best, map_cost(p, r, assign, costs));
        return;
    }
    assign[k] = -1;
    enumerate(p, r, assign, used, k + 1, costs, best);
    for (std::size_t j = 0; j < r.labels.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        assign[k] = static_cast<int>(j);
        enumerate(p, r, assign, used, k + 1, costs, best);
        used[j] = false;
    }
    assign[k] = -1;
}

}  // namespace oracle_detail

/// True GED by exhaustive enumeration of all node correspondences.
inline int exhaustive_ged(const ArchGraph& pred, const ArchGraph& ref, const CostModel& costs) {
    oracle_detail::FlatGraph p = oracle_detail::flatten(pred, costs.synonyms);
    oracle_detail::FlatGraph r = oracle_detail::flatten(ref, costs.synonyms);
    std::vector<int> assign(p.labels.size(), -1);
    std::vector<bool> used(r.labels.size(), false);
    // empty-map baseline: delete everything, insert everything
    int best = static_cast<int>(p.labels.size()) * costs.node_delete +
               static_cast<int>(r.labels.size()) * costs.node_insert +
               static_cast<int>(p.edges.size()) * costs.edge_delete +
               static_cast<int>(r.edges.size()) * costs.edge_insert;
    oracle_detail::enumerate(p, r, assign, used, 0, costs, best);
    return best;
}

}  // namespace archeval::testing

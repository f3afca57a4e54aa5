#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archeval/alignment.hpp"
#include "archeval/error.hpp"
#include "archeval/graph.hpp"

namespace archeval {

/// Precision / recall / F1 with raw counts. Zero-denominator convention:
/// the score is 1 only when both sides are empty (vacuous perfection) and 0
/// when only one side is.
struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

inline PrfScore prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PrfScore s;
    s.tp = tp;
    s.fp = fp;
    s.fn = fn;
    const bool pred_empty = (tp + fp == 0);
    const bool ref_empty = (tp + fn == 0);
    if (pred_empty && ref_empty) {
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = pred_empty ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = ref_empty ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = (s.precision + s.recall > 0.0)
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

inline PrfScore node_prf(const NodeMatching& matching) {
    return prf_from_counts(matching.pairs.size(), matching.unmatched_pred.size(),
                           matching.unmatched_ref.size());
}

inline PrfScore edge_prf(const EdgeMatching& matching) {
    return prf_from_counts(matching.tp.size(), matching.fp.size(), matching.fn.size());
}

/// Fraction of matched pairs whose layer labels agree. Undefined with no
/// pairs: the degenerate case surfaces as an error so callers can record the
/// metric as absent rather than as 0 or 1.
inline double layer_accuracy(const NodeMatching& matching) {
    if (matching.pairs.empty()) {
        throw Error(ErrorCode::NoMatchedNodes, "layer accuracy undefined with zero matched pairs");
    }
    std::size_t correct = 0;
    for (const MatchedPair& p : matching.pairs) {
        if (p.layer_correct) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(matching.pairs.size());
}

/// Mean of per-sample render outcomes over first-round generations.
inline double syntactic_validity(const std::vector<bool>& outcomes) {
    if (outcomes.empty()) {
        throw Error(ErrorCode::EmptyBatch, "syntactic validity undefined over zero samples");
    }
    std::size_t ok = 0;
    for (bool b : outcomes) ok += b ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

/// Integer edit costs. Substituting nodes whose normalized labels match (or
/// that share a synonym concept) is free, as is edge substitution; labels on
/// edges never contribute.
struct CostModel {
    int node_insert = 1;
    int node_delete = 1;
    int node_substitute = 1;  // mismatched labels
    int edge_insert = 1;
    int edge_delete = 1;
    SynonymTable synonyms = SynonymTable::defaults();
};

struct GedResult {
    int distance = 0;
    bool exact = false;
    std::vector<std::pair<std::string, std::string>> mapping;  // pred id -> ref id
    std::chrono::milliseconds elapsed{0};
};

namespace detail {

struct GedSide {
    std::vector<std::string> ids;
    std::vector<std::string> displays;
    std::vector<std::string> label_keys;  // joined tokens, or concept when present
    std::map<std::pair<int, int>, int> edge_multiset;
    int edge_total = 0;
};

inline GedSide ged_side(const ArchGraph& g, const SynonymTable& synonyms) {
    GedSide side;
    std::unordered_map<std::string, int> index;
    for (const ArchNode& n : g.nodes()) {
        index.emplace(n.id, static_cast<int>(side.ids.size()));
        side.ids.push_back(n.id);
        side.displays.push_back(n.display_name);
        side.label_keys.push_back(text::join(normalize_label(n.display_name), " "));
    }
    for (const ArchEdge& e : g.edges()) {
        side.edge_multiset[{index[e.source], index[e.target]}] += 1;
        side.edge_total += 1;
    }
    (void)synonyms;
    return side;
}

// Label substitution cost matrix: 0 when token sequences are equal or the
// synonym table maps both to one concept.
inline std::vector<std::vector<int>> label_costs(const ArchGraph& a, const ArchGraph& b,
                                                 const CostModel& costs) {
    std::vector<std::vector<std::string>> ta, tb;
    std::vector<std::optional<std::string>> ca, cb;
    for (const ArchNode& n : a.nodes()) {
        ta.push_back(normalize_label(n.display_name));
        ca.push_back(costs.synonyms.concept_of(ta.back()));
    }
    for (const ArchNode& n : b.nodes()) {
        tb.push_back(normalize_label(n.display_name));
        cb.push_back(costs.synonyms.concept_of(tb.back()));
    }
    std::vector<std::vector<int>> m(ta.size(), std::vector<int>(tb.size(), costs.node_substitute));
    for (std::size_t i = 0; i < ta.size(); ++i) {
        for (std::size_t j = 0; j < tb.size(); ++j) {
            if ((!ta[i].empty() && ta[i] == tb[j]) || (ca[i] && ca[i] == cb[j])) {
                m[i][j] = 0;
            } else if (ta[i].empty() && tb[j].empty()) {
                m[i][j] = 0;
            }
        }
    }
    return m;
}

// Edit cost of a fully specified node correspondence (sigma[i] = ref index
// or -1 for deletion). Any complete correspondence induces a valid edit
// path, so the value is always an upper bound on the true distance.
inline int edit_cost_for_map(const GedSide& p, const GedSide& r,
                             const std::vector<std::vector<int>>& label_cost,
                             const std::vector<int>& sigma, const CostModel& costs) {
    int cost = 0;
    std::vector<bool> ref_used(r.ids.size(), false);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (sigma[i] < 0) {
            cost += costs.node_delete;
        } else {
            cost += label_cost[i][static_cast<std::size_t>(sigma[i])];
            ref_used[static_cast<std::size_t>(sigma[i])] = true;
        }
    }
    for (std::size_t j = 0; j < r.ids.size(); ++j) {
        if (!ref_used[j]) cost += costs.node_insert;
    }
    std::map<std::pair<int, int>, int> remaining = r.edge_multiset;
    for (const auto& [pe, count] : p.edge_multiset) {
        int su = sigma[static_cast<std::size_t>(pe.first)];
        int sv = sigma[static_cast<std::size_t>(pe.second)];
        int matched = 0;
        if (su >= 0 && sv >= 0) {
            auto it = remaining.find({su, sv});
            if (it != remaining.end()) {
                matched = std::min(count, it->second);
                it->second -= matched;
            }
        }
        cost += (count - matched) * costs.edge_delete;
    }
    for (const auto& [re, count] : remaining) cost += count * costs.edge_insert;
    return cost;
}

struct BnbState {
    const GedSide* p;
    const GedSide* r;
    const std::vector<std::vector<int>>* label_cost;
    const CostModel* costs;
    std::chrono::steady_clock::time_point deadline;
    std::vector<int> sigma;
    std::vector<bool> ref_used;
    std::map<std::pair<int, int>, int> ref_remaining;
    int ref_matched_edges = 0;
    std::vector<int> best_sigma;
    int best = 0;
    bool aborted = false;
    std::uint64_t steps = 0;

    bool out_of_time() {
        if ((++steps & 0x3FF) == 0 && std::chrono::steady_clock::now() >= deadline) {
            aborted = true;
        }
        return aborted;
    }

    // Admissible remainder bound for pred nodes [k, np) and untouched ref
    // nodes: the larger of the count imbalance bound and the per-node label
    // bound, plus the edge count imbalance.
    int lower_bound(std::size_t k, int cost_so_far, int pred_edges_decided) const {
        const std::size_t np = p->ids.size();
        int rp = static_cast<int>(np - k);
        int rr = 0;
        for (bool used : ref_used) rr += used ? 0 : 1;
        int count_bound = 0;
        if (rp > rr) count_bound += (rp - rr) * costs->node_delete;
        if (rr > rp) count_bound += (rr - rp) * costs->node_insert;
        int label_bound = 0;
        for (std::size_t i = k; i < np; ++i) {
            int best_sub = costs->node_delete;
            for (std::size_t j = 0; j < r->ids.size(); ++j) {
                if (ref_used[j]) continue;
                best_sub = std::min(best_sub, (*label_cost)[i][j]);
                if (best_sub == 0) break;
            }
            label_bound += best_sub;
        }
        int node_bound = std::max(count_bound, label_bound);
        int ep_rem = p->edge_total - pred_edges_decided;
        int et_rem = r->edge_total - ref_matched_edges;
        int edge_bound = 0;
        if (ep_rem > et_rem) edge_bound += (ep_rem - et_rem) * costs->edge_delete;
        if (et_rem > ep_rem) edge_bound += (et_rem - ep_rem) * costs->edge_insert;
        return cost_so_far + node_bound + edge_bound;
    }

    void search(std::size_t k, int cost_so_far, int pred_edges_decided) {
        if (out_of_time()) return;
        const std::size_t np = p->ids.size();
        if (k == np) {
            int total = cost_so_far;
            for (std::size_t j = 0; j < ref_used.size(); ++j) {
                if (!ref_used[j]) total += costs->node_insert;
            }
            total += (r->edge_total - ref_matched_edges) * costs->edge_insert;
            if (total < best) {
                best = total;
                best_sigma = sigma;
            }
            return;
        }
        if (lower_bound(k, cost_so_far, pred_edges_decided) >= best) return;

        // cost and bookkeeping of pred edges fully decided by assigning k
        auto decide_edges = [&](int assignment, int& delta, int& decided,
                                std::vector<std::pair<int, int>>& consumed) {
            sigma[k] = assignment;
            for (const auto& [pe, count] : p->edge_multiset) {
                std::size_t a = static_cast<std::size_t>(pe.first);
                std::size_t b = static_cast<std::size_t>(pe.second);
                if (std::max(a, b) != k) continue;
                decided += count;
                int su = sigma[a], sv = sigma[b];
                int matched = 0;
                if (su >= 0 && sv >= 0) {
                    auto it = ref_remaining.find({su, sv});
                    if (it != ref_remaining.end() && it->second > 0) {
                        matched = std::min(count, it->second);
                        it->second -= matched;
                        ref_matched_edges += matched;
                        for (int c = 0; c < matched; ++c) consumed.push_back({su, sv});
                    }
                }
                delta += (count - matched) * costs->edge_delete;
            }
        };
        auto restore_edges = [&](const std::vector<std::pair<int, int>>& consumed) {
            for (const auto& e : consumed) {
                ref_remaining[e] += 1;
                ref_matched_edges -= 1;
            }
            sigma[k] = -2;
        };

        // try substitutions in ref order, then deletion
        for (std::size_t j = 0; j < r->ids.size(); ++j) {
            if (ref_used[j]) continue;
            int delta = (*label_cost)[k][j];
            int decided = 0;
            std::vector<std::pair<int, int>> consumed;
            ref_used[j] = true;
            decide_edges(static_cast<int>(j), delta, decided, consumed);
            search(k + 1, cost_so_far + delta, pred_edges_decided + decided);
            restore_edges(consumed);
            ref_used[j] = false;
            if (aborted) return;
        }
        {
            int delta = costs->node_delete;
            int decided = 0;
            std::vector<std::pair<int, int>> consumed;
            decide_edges(-1, delta, decided, consumed);
            search(k + 1, cost_so_far + delta, pred_edges_decided + decided);
            restore_edges(consumed);
        }
    }
};

}  // namespace detail

/// Graph edit distance under the integer cost model. Exact branch-and-bound
/// search runs when both graphs fit under `exact_cutoff` nodes and the
/// budget holds; otherwise (or on budget exhaustion) the result is the
/// deterministic greedy upper bound with `exact` false.
inline GedResult compute_ged(const ArchGraph& pred, const ArchGraph& ref,
                             std::chrono::milliseconds budget, const CostModel& costs,
                             std::size_t exact_cutoff = 8) {
    const auto start = std::chrono::steady_clock::now();
    detail::GedSide p = detail::ged_side(pred, costs.synonyms);
    detail::GedSide r = detail::ged_side(ref, costs.synonyms);
    std::vector<std::vector<int>> label_cost = detail::label_costs(pred, ref, costs);

    // greedy construction: align nodes by lexical scores, then charge
    // whatever the induced edit path cannot cover
    MatchConfig greedy_cfg;
    greedy_cfg.synonyms = costs.synonyms;
    std::vector<std::string> pred_ids = p.ids, ref_ids = r.ids;
    std::unordered_map<std::string, std::string> greedy_map =
        detail::lexical_map(pred, pred_ids, ref, ref_ids, greedy_cfg);

    std::unordered_map<std::string, int> ref_index;
    for (std::size_t j = 0; j < r.ids.size(); ++j) ref_index[r.ids[j]] = static_cast<int>(j);
    std::vector<int> greedy_sigma(p.ids.size(), -1);
    for (std::size_t i = 0; i < p.ids.size(); ++i) {
        auto it = greedy_map.find(p.ids[i]);
        if (it != greedy_map.end()) greedy_sigma[i] = ref_index[it->second];
    }
    int greedy_cost = detail::edit_cost_for_map(p, r, label_cost, greedy_sigma, costs);

    GedResult result;
    result.distance = greedy_cost;
    result.exact = false;
    std::vector<int> final_sigma = greedy_sigma;

    const bool try_exact = std::max(p.ids.size(), r.ids.size()) <= exact_cutoff;
    if (try_exact) {
        detail::BnbState bnb;
        bnb.p = &p;
        bnb.r = &r;
        bnb.label_cost = &label_cost;
        bnb.costs = &costs;
        bnb.deadline = start + budget;
        bnb.sigma.assign(p.ids.size(), -2);
        bnb.ref_used.assign(r.ids.size(), false);
        bnb.ref_remaining = r.edge_multiset;
        bnb.best = greedy_cost;
        bnb.best_sigma = greedy_sigma;
        bnb.search(0, 0, 0);
        result.distance = bnb.best;
        result.exact = !bnb.aborted;
        final_sigma = bnb.best_sigma;
    }

    for (std::size_t i = 0; i < final_sigma.size(); ++i) {
        if (final_sigma[i] >= 0) {
            result.mapping.emplace_back(p.ids[i], r.ids[static_cast<std::size_t>(final_sigma[i])]);
        }
    }
    result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return result;
}

/// Normalization of the raw distance onto [0, 100]; two empty graphs score
/// a perfect 100.
inline double ged_accuracy(const GedResult& ged, const ArchGraph& pred, const ArchGraph& ref) {
    const double denom = static_cast<double>(
        std::max(pred.nodes().size() + pred.edges().size(), ref.nodes().size() + ref.edges().size()));
    if (denom == 0.0) return 100.0;
    return 100.0 * std::max(0.0, 1.0 - static_cast<double>(ged.distance) / denom);
}

/// Layer-1 metric bundle for one case. Graph metrics are absent when the
/// prediction failed validation.
struct MetricReport {
    bool sv_sample = false;
    std::optional<PrfScore> node;
    std::optional<PrfScore> edge;
    std::optional<double> layer_accuracy;  // absent when no pairs matched
    std::optional<double> ged_accuracy;
    std::optional<bool> ged_exact;
};

}  // namespace archeval

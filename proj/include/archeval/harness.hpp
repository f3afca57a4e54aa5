#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "archeval/antipattern.hpp"
#include "archeval/error.hpp"
#include "archeval/genclient.hpp"
#include "archeval/judge.hpp"
#include "archeval/metrics.hpp"
#include "archeval/plantuml.hpp"
#include "archeval/prd.hpp"

namespace archeval {

struct ProjectCase {
    std::string case_id;
    std::filesystem::path prd_path;
    std::filesystem::path reference_path;
    std::optional<std::string> language_tag;
};

/// Per-case evaluation knobs. Judge handles are non-owning; callers wire
/// them up for the lifetime of the run.
struct EvalConfig {
    ValidationMode validity_mode = ValidationMode::internal_strict;
    MatchConfig match;
    CostModel ged_costs;
    std::chrono::milliseconds ged_budget{5000};
    std::size_t ged_exact_cutoff = 8;
    AntiPatternOptions antipattern;
    RendererConfig renderer;  // external_renderer mode only
    JudgeClient* judge = nullptr;
    NodeEquivalenceJudge* node_judge = nullptr;
};

struct CaseResult {
    std::string case_id;
    std::string model_name;
    ContextSetting setting = ContextSetting::full;
    MetricReport metrics;
    std::optional<AntiPatternReport> antipatterns;
    std::optional<JudgeScores> judge;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot replace " + path.string());
}

}  // namespace detail

/// Discovers `<root>/<case_id>/{prd.md, reference.puml}`, validating that
/// references parse and PRDs split into sections. Cases come back sorted by
/// id; any malformed case aborts with per-case detail.
inline std::vector<ProjectCase> load_dataset(const std::filesystem::path& root,
                                             std::vector<std::string>* warnings = nullptr) {
    if (!std::filesystem::exists(root) || !std::filesystem::is_directory(root)) {
        throw Error(ErrorCode::DatasetLayoutError, "dataset root missing: " + root.string());
    }
    std::vector<ProjectCase> cases;
    std::vector<std::string> problems;
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        ProjectCase c;
        c.case_id = dir.filename().string();
        c.prd_path = dir / "prd.md";
        c.reference_path = dir / "reference.puml";
        if (!std::filesystem::exists(c.prd_path)) {
            problems.push_back(c.case_id + ": missing prd.md");
            continue;
        }
        if (!std::filesystem::exists(c.reference_path)) {
            problems.push_back(c.case_id + ": missing reference.puml");
            continue;
        }
        try {
            ParseResult parsed = parse(detail::read_file(c.reference_path), ParseMode::strict);
            if (!parsed.ok()) {
                std::string detail = parsed.diagnostics.empty()
                                         ? "unknown error"
                                         : parsed.diagnostics.front().code + " at line " +
                                               std::to_string(parsed.diagnostics.front().span.line);
                problems.push_back(c.case_id + ": reference.puml does not parse (" + detail + ")");
                continue;
            }
            (void)parse_prd(detail::read_file(c.prd_path));
        } catch (const Error& e) {
            problems.push_back(c.case_id + ": " + e.what());
            continue;
        }
        std::filesystem::path lang = dir / "language.txt";
        if (std::filesystem::exists(lang)) {
            c.language_tag = std::string(text::trim(detail::read_file(lang)));
        }
        cases.push_back(std::move(c));
    }
    if (!problems.empty()) {
        std::string joined;
        for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
        throw Error(ErrorCode::DatasetLayoutError, joined);
    }
    if (cases.empty() && warnings) {
        warnings->push_back("dataset root contains no cases: " + root.string());
    }
    return cases;
}

/// Evaluates one prediction against one case. Nothing here is fatal: an
/// absent or invalid prediction yields sv=false with graph metrics absent,
/// and judge failures degrade to warnings.
inline CaseResult evaluate_case(const std::optional<std::string>& predicted_code,
                                const ProjectCase& project, const EvalConfig& config) {
    CaseResult result;
    result.case_id = project.case_id;

    if (!predicted_code || text::trim(*predicted_code).empty()) {
        result.metrics.sv_sample = false;
        result.warnings.push_back("no predicted diagram");
        return result;
    }

    SyntaxReport syntax;
    try {
        syntax = validate(*predicted_code, config.validity_mode,
                          config.validity_mode == ValidationMode::external_renderer
                              ? &config.renderer
                              : nullptr);
    } catch (const Error& e) {
        result.metrics.sv_sample = false;
        result.warnings.push_back(std::string("validation unavailable: ") + e.what());
        return result;
    }
    result.metrics.sv_sample = syntax.valid;
    if (!syntax.valid) {
        std::string code = syntax.diagnostics.empty() ? "invalid" : syntax.diagnostics[0].code;
        result.warnings.push_back("prediction rejected: " + code);
        return result;
    }

    ParseResult ref_parse;
    try {
        ref_parse = parse(detail::read_file(project.reference_path), ParseMode::strict);
    } catch (const Error& e) {
        result.warnings.push_back(std::string("reference unreadable: ") + e.what());
        return result;
    }
    if (!ref_parse.ok()) {
        result.warnings.push_back("reference does not parse");
        return result;
    }
    // the graph comes from a lenient parse so that renderer-validated input
    // still yields structure
    ParseResult pred_parse = parse(*predicted_code, ParseMode::lenient);
    if (!pred_parse.ok()) {
        result.warnings.push_back("prediction valid but not parseable internally");
        return result;
    }
    const ArchGraph& pred = *pred_parse.graph;
    const ArchGraph& ref = *ref_parse.graph;

    NodeMatching nodes = match_nodes(pred, ref, config.match, config.node_judge);
    EdgeMatching edges = match_edges(pred, ref, nodes, config.match);
    result.metrics.node = node_prf(nodes);
    result.metrics.edge = edge_prf(edges);
    try {
        result.metrics.layer_accuracy = layer_accuracy(nodes);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoMatchedNodes) throw;
        result.warnings.push_back("layer accuracy absent: no matched pairs");
    }
    GedResult ged = compute_ged(pred, ref, config.ged_budget, config.ged_costs,
                                config.ged_exact_cutoff);
    result.metrics.ged_accuracy = ged_accuracy(ged, pred, ref);
    result.metrics.ged_exact = ged.exact;

    result.antipatterns = detect_antipatterns(pred, config.antipattern);

    if (config.judge != nullptr) {
        try {
            std::string context = detail::read_file(project.prd_path);
            result.judge = config.judge->score_diagram(context, *predicted_code);
        } catch (const Error& e) {
            result.warnings.push_back(std::string("judge unavailable: ") + e.what());
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Mean over the cases where the metric was present.
struct MetricMean {
    double mean = 0.0;
    std::size_t count = 0;
};

struct AggregateRow {
    std::string model;
    ContextSetting setting = ContextSetting::full;
    std::size_t case_count = 0;
    double sv = 0.0;
    MetricMean node_f1, edge_f1, layer_acc, ged_acc;
    MetricMean completeness, accuracy, rationality, readability;
    MetricMean orphan_ratio, god_ratio;
};

struct AggregateReport {
    std::vector<AggregateRow> rows;  // sorted by (model, setting)
};

/// Unweighted per-metric means within each (model, setting) group; absent
/// metrics are skipped with per-metric counts. SV is the mean of sv_sample
/// over all cases in the group.
inline AggregateReport aggregate(const std::vector<CaseResult>& results) {
    if (results.empty()) {
        throw Error(ErrorCode::EmptyResults, "no case results to aggregate");
    }
    struct Accum {
        std::size_t cases = 0;
        std::size_t sv_hits = 0;
        struct Sum {
            double total = 0.0;
            std::size_t count = 0;
            void add(double v) {
                total += v;
                ++count;
            }
            MetricMean mean() const {
                return MetricMean{count ? total / static_cast<double>(count) : 0.0, count};
            }
        };
        Sum node_f1, edge_f1, layer_acc, ged_acc, comp, acc, rat, read, orphan, god;
    };
    std::map<std::pair<std::string, int>, Accum> groups;

    // deterministic accumulation order regardless of input order
    std::vector<const CaseResult*> sorted;
    sorted.reserve(results.size());
    for (const auto& r : results) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const CaseResult* a, const CaseResult* b) {
        return std::tie(a->model_name, a->setting, a->case_id) <
               std::tie(b->model_name, b->setting, b->case_id);
    });

    for (const CaseResult* r : sorted) {
        Accum& g = groups[{r->model_name, static_cast<int>(r->setting)}];
        g.cases += 1;
        g.sv_hits += r->metrics.sv_sample ? 1 : 0;
        if (r->metrics.node) g.node_f1.add(r->metrics.node->f1);
        if (r->metrics.edge) g.edge_f1.add(r->metrics.edge->f1);
        if (r->metrics.layer_accuracy) g.layer_acc.add(*r->metrics.layer_accuracy);
        if (r->metrics.ged_accuracy) g.ged_acc.add(*r->metrics.ged_accuracy);
        if (r->judge) {
            g.comp.add(r->judge->completeness);
            g.acc.add(r->judge->accuracy);
            g.rat.add(r->judge->rationality);
            g.read.add(r->judge->readability);
        }
        if (r->antipatterns) {
            g.orphan.add(r->antipatterns->orphan_ratio);
            g.god.add(r->antipatterns->god_ratio);
        }
    }

    AggregateReport report;
    for (const auto& [key, g] : groups) {
        AggregateRow row;
        row.model = key.first;
        row.setting = static_cast<ContextSetting>(key.second);
        row.case_count = g.cases;
        row.sv = g.cases ? static_cast<double>(g.sv_hits) / static_cast<double>(g.cases) : 0.0;
        row.node_f1 = g.node_f1.mean();
        row.edge_f1 = g.edge_f1.mean();
        row.layer_acc = g.layer_acc.mean();
        row.ged_acc = g.ged_acc.mean();
        row.completeness = g.comp.mean();
        row.accuracy = g.acc.mean();
        row.rationality = g.rat.mean();
        row.readability = g.read.mean();
        row.orphan_ratio = g.orphan.mean();
        row.god_ratio = g.god.mean();
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Dataset statistics
// ---------------------------------------------------------------------------

struct CaseStats {
    std::string case_id;
    std::size_t node_count = 0;
    std::size_t max_depth = 0;       // longest containment chain, roots at 1
    std::size_t container_count = 0;
    std::size_t relation_count = 0;
    std::size_t top_layer_count = 0;  // distinct leaf layers, "unlayered" excluded
};

inline std::vector<CaseStats> dataset_stats(const std::vector<ProjectCase>& cases,
                                            const LayerMap& layer_map = LayerMap::defaults()) {
    std::vector<CaseStats> out;
    for (const ProjectCase& c : cases) {
        ParseResult parsed = parse(detail::read_file(c.reference_path), ParseMode::strict);
        if (!parsed.ok()) {
            throw Error(ErrorCode::DatasetLayoutError, c.case_id + ": reference does not parse");
        }
        const ArchGraph& g = *parsed.graph;
        CaseStats stats;
        stats.case_id = c.case_id;
        stats.node_count = g.nodes().size();
        stats.relation_count = g.edges().size();
        stats.container_count = container_nodes(g).size();
        for (const ArchNode& n : g.nodes()) {
            std::size_t depth = 1;
            const ArchNode* cur = &n;
            while (cur->parent) {
                ++depth;
                cur = &g.at(*cur->parent);
            }
            stats.max_depth = std::max(stats.max_depth, depth);
        }
        std::set<std::string> layers;
        for (const std::string& leaf : leaf_nodes(g)) {
            std::string layer = layer_of(g, leaf, layer_map);
            if (layer != kUnlayeredLabel) layers.insert(layer);
        }
        stats.top_layer_count = layers.size();
        out.push_back(std::move(stats));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inter-rater agreement
// ---------------------------------------------------------------------------

/// Unweighted Cohen's kappa over categorical label vectors.
inline double cohens_kappa(const std::vector<std::string>& ratings_a,
                           const std::vector<std::string>& ratings_b) {
    if (ratings_a.size() != ratings_b.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "rating vectors differ in length: " + std::to_string(ratings_a.size()) +
                        " vs " + std::to_string(ratings_b.size()));
    }
    if (ratings_a.empty()) {
        throw Error(ErrorCode::EmptyRatings, "kappa undefined over empty ratings");
    }
    const double n = static_cast<double>(ratings_a.size());
    std::map<std::string, std::size_t> freq_a, freq_b;
    std::size_t agreements = 0;
    for (std::size_t i = 0; i < ratings_a.size(); ++i) {
        freq_a[ratings_a[i]] += 1;
        freq_b[ratings_b[i]] += 1;
        agreements += ratings_a[i] == ratings_b[i] ? 1 : 0;
    }
    double p_o = static_cast<double>(agreements) / n;
    double p_e = 0.0;
    for (const auto& [label, count_a] : freq_a) {
        auto it = freq_b.find(label);
        if (it == freq_b.end()) continue;
        p_e += (static_cast<double>(count_a) / n) * (static_cast<double>(it->second) / n);
    }
    if (p_e >= 1.0) return 1.0;  // total marginal agreement forces p_o = 1
    return (p_o - p_e) / (1.0 - p_e);
}

/// Linear-weighted kappa for ordinal scores (1-5 judge scales).
inline double cohens_kappa_linear(const std::vector<int>& ratings_a,
                                  const std::vector<int>& ratings_b) {
    if (ratings_a.size() != ratings_b.size()) {
        throw Error(ErrorCode::LengthMismatch, "rating vectors differ in length");
    }
    if (ratings_a.empty()) {
        throw Error(ErrorCode::EmptyRatings, "kappa undefined over empty ratings");
    }
    int lo = *std::min_element(ratings_a.begin(), ratings_a.end());
    int hi = *std::max_element(ratings_a.begin(), ratings_a.end());
    lo = std::min(lo, *std::min_element(ratings_b.begin(), ratings_b.end()));
    hi = std::max(hi, *std::max_element(ratings_b.begin(), ratings_b.end()));
    const int k = hi - lo + 1;
    if (k == 1) return 1.0;
    const double n = static_cast<double>(ratings_a.size());
    std::vector<double> fa(static_cast<std::size_t>(k), 0.0), fb(static_cast<std::size_t>(k), 0.0);
    double observed = 0.0;
    auto weight = [&](int i, int j) {
        return 1.0 - static_cast<double>(std::abs(i - j)) / static_cast<double>(k - 1);
    };
    for (std::size_t t = 0; t < ratings_a.size(); ++t) {
        fa[static_cast<std::size_t>(ratings_a[t] - lo)] += 1.0;
        fb[static_cast<std::size_t>(ratings_b[t] - lo)] += 1.0;
        observed += weight(ratings_a[t], ratings_b[t]);
    }
    double p_o = observed / n;
    double p_e = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            p_e += weight(i + lo, j + lo) * (fa[static_cast<std::size_t>(i)] / n) *
                   (fb[static_cast<std::size_t>(j)] / n);
        }
    }
    if (p_e >= 1.0) return 1.0;
    return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace archeval

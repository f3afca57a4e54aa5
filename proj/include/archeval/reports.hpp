#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "archeval/harness.hpp"

namespace archeval {

// nlohmann's default object keeps keys sorted, so every writer here is
// byte-deterministic for identical inputs.

inline nlohmann::json to_json(const PrfScore& s) {
    return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                          {"tp", s.tp},               {"fp", s.fp},         {"fn", s.fn}};
}

inline nlohmann::json to_json(const JudgeScores& s) {
    return nlohmann::json{{"completeness", s.completeness},
                          {"accuracy", s.accuracy},
                          {"rationality", s.rationality},
                          {"readability", s.readability},
                          {"rationale", s.rationale}};
}

inline nlohmann::json to_json(const AntiPatternReport& r) {
    return nlohmann::json{{"orphan_ratio", r.orphan_ratio},
                          {"orphans", r.orphans},
                          {"god_ratio", r.god_ratio},
                          {"gods", r.gods},
                          {"degree_mean", r.stats.mean},
                          {"degree_stddev", r.stats.stddev},
                          {"degree_threshold", r.stats.threshold}};
}

inline nlohmann::json to_json(const CaseResult& r) {
    nlohmann::json j;
    j["case_id"] = r.case_id;
    j["model"] = r.model_name;
    j["setting"] = std::string(to_string(r.setting));
    j["sv"] = r.metrics.sv_sample;
    if (r.metrics.node) j["node"] = to_json(*r.metrics.node);
    if (r.metrics.edge) j["edge"] = to_json(*r.metrics.edge);
    if (r.metrics.layer_accuracy) j["layer_acc"] = *r.metrics.layer_accuracy;
    if (r.metrics.ged_accuracy) j["ged_acc"] = *r.metrics.ged_accuracy;
    if (r.metrics.ged_exact) j["ged_exact"] = *r.metrics.ged_exact;
    if (r.antipatterns) j["antipatterns"] = to_json(*r.antipatterns);
    if (r.judge) j["judge"] = to_json(*r.judge);
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

inline CaseResult case_result_from_json(const nlohmann::json& j) {
    CaseResult r;
    r.case_id = j.value("case_id", "");
    r.model_name = j.value("model", "");
    if (auto s = context_setting_from_string(j.value("setting", "full"))) r.setting = *s;
    r.metrics.sv_sample = j.value("sv", false);
    auto prf = [](const nlohmann::json& p) {
        PrfScore s;
        s.precision = p.value("precision", 0.0);
        s.recall = p.value("recall", 0.0);
        s.f1 = p.value("f1", 0.0);
        s.tp = p.value("tp", 0u);
        s.fp = p.value("fp", 0u);
        s.fn = p.value("fn", 0u);
        return s;
    };
    if (j.contains("node")) r.metrics.node = prf(j.at("node"));
    if (j.contains("edge")) r.metrics.edge = prf(j.at("edge"));
    if (j.contains("layer_acc")) r.metrics.layer_accuracy = j.at("layer_acc").get<double>();
    if (j.contains("ged_acc")) r.metrics.ged_accuracy = j.at("ged_acc").get<double>();
    if (j.contains("ged_exact")) r.metrics.ged_exact = j.at("ged_exact").get<bool>();
    if (j.contains("antipatterns")) {
        AntiPatternReport a;
        const auto& ja = j.at("antipatterns");
        a.orphan_ratio = ja.value("orphan_ratio", 0.0);
        a.god_ratio = ja.value("god_ratio", 0.0);
        if (ja.contains("orphans")) a.orphans = ja.at("orphans").get<std::vector<std::string>>();
        if (ja.contains("gods")) a.gods = ja.at("gods").get<std::vector<std::string>>();
        a.stats.mean = ja.value("degree_mean", 0.0);
        a.stats.stddev = ja.value("degree_stddev", 0.0);
        a.stats.threshold = ja.value("degree_threshold", 0.0);
        r.antipatterns = std::move(a);
    }
    if (j.contains("judge")) {
        const auto& js = j.at("judge");
        JudgeScores s;
        s.completeness = js.value("completeness", 0);
        s.accuracy = js.value("accuracy", 0);
        s.rationality = js.value("rationality", 0);
        s.readability = js.value("readability", 0);
        s.rationale = js.value("rationale", "");
        r.judge = std::move(s);
    }
    if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

inline nlohmann::json to_json(const AggregateRow& row) {
    auto metric = [](const MetricMean& m) {
        return nlohmann::json{{"mean", m.mean}, {"count", m.count}};
    };
    return nlohmann::json{{"model", row.model},
                          {"setting", std::string(to_string(row.setting))},
                          {"case_count", row.case_count},
                          {"sv", row.sv},
                          {"node_f1", metric(row.node_f1)},
                          {"edge_f1", metric(row.edge_f1)},
                          {"layer_acc", metric(row.layer_acc)},
                          {"ged_acc", metric(row.ged_acc)},
                          {"comp", metric(row.completeness)},
                          {"acc", metric(row.accuracy)},
                          {"rat", metric(row.rationality)},
                          {"read", metric(row.readability)},
                          {"orphan_ratio", metric(row.orphan_ratio)},
                          {"god_ratio", metric(row.god_ratio)}};
}

inline nlohmann::json to_json(const AggregateReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const AggregateRow& row : report.rows) rows.push_back(to_json(row));
    return nlohmann::json{{"rows", rows}};
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace detail

/// Fixed column order: model, setting, sv, node_f1, edge_f1, layer_acc,
/// ged_acc, comp, acc, rat, read, orphan_ratio, god_ratio.
inline std::string to_csv(const AggregateReport& report) {
    std::string out =
        "model,setting,sv,node_f1,edge_f1,layer_acc,ged_acc,comp,acc,rat,read,"
        "orphan_ratio,god_ratio\n";
    for (const AggregateRow& r : report.rows) {
        out += r.model;
        out += ",";
        out += std::string(to_string(r.setting));
        for (double v : {r.sv, r.node_f1.mean, r.edge_f1.mean, r.layer_acc.mean, r.ged_acc.mean,
                         r.completeness.mean, r.accuracy.mean, r.rationality.mean,
                         r.readability.mean, r.orphan_ratio.mean, r.god_ratio.mean}) {
            out += ",";
            out += detail::fmt_double(v);
        }
        out += "\n";
    }
    return out;
}

/// Markdown table; the judge "Avg." column is derived from the four
/// dimensions on the fly and never stored.
inline std::string to_markdown(const AggregateReport& report) {
    std::string out =
        "| Model | Setting | SV | Node F1 | Edge F1 | Layer | GED | Comp. | Acc. | Rat. | "
        "Read. | Avg. | Orphan | God |\n"
        "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const AggregateRow& r : report.rows) {
        double judged = r.completeness.count
                            ? (r.completeness.mean + r.accuracy.mean + r.rationality.mean +
                               r.readability.mean) /
                                  4.0
                            : 0.0;
        out += "| " + r.model + " | " + std::string(to_string(r.setting));
        for (double v : {r.sv, r.node_f1.mean, r.edge_f1.mean, r.layer_acc.mean, r.ged_acc.mean,
                         r.completeness.mean, r.accuracy.mean, r.rationality.mean,
                         r.readability.mean, judged, r.orphan_ratio.mean, r.god_ratio.mean}) {
            out += " | " + detail::fmt_double(v);
        }
        out += " |\n";
    }
    return out;
}

inline nlohmann::json to_json(const CaseStats& s) {
    return nlohmann::json{{"case_id", s.case_id},
                          {"node_count", s.node_count},
                          {"max_depth", s.max_depth},
                          {"container_count", s.container_count},
                          {"relation_count", s.relation_count},
                          {"top_layer_count", s.top_layer_count}};
}

}  // namespace archeval

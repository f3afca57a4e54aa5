#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "archeval/error.hpp"
#include "archeval/graph.hpp"
#include "archeval/text.hpp"

namespace archeval {

/// Lowercased word tokens of a node name with stereotypes stripped and the
/// stopwords {the, a, an, of, and} removed. May be empty.
inline std::vector<std::string> normalize_label(std::string_view raw) {
    static const std::set<std::string> kStopwords = {"the", "a", "an", "of", "and"};
    std::vector<std::string> tokens = text::split_words(raw);
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (auto& t : tokens) {
        if (!kStopwords.count(t)) out.push_back(std::move(t));
    }
    return out;
}

/// Maps normalized token sequences to canonical concepts, so that e.g.
/// "MySQL" and "Database" align. User tables extend or replace the built-in
/// groups.
class SynonymTable {
public:
    SynonymTable() = default;

    void add_group(std::string concept_name, std::initializer_list<const char*> terms) {
        add_term(concept_name, concept_name);
        for (const char* t : terms) add_term(t, concept_name);
    }

    void add_term(std::string_view term, std::string concept_name) {
        std::string key = text::join(normalize_label(term), " ");
        if (!key.empty()) term_to_concept_[key] = std::move(concept_name);
    }

    std::optional<std::string> concept_of(const std::vector<std::string>& tokens) const {
        if (tokens.empty()) return std::nullopt;
        auto it = term_to_concept_.find(text::join(tokens, " "));
        if (it == term_to_concept_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const noexcept { return term_to_concept_.size(); }

    /// File format: `concept: term1, term2, ...`, one concept per line,
    /// UTF-8, `#` comments.
    void merge_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open synonym table " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            std::string_view v = text::trim(line);
            if (v.empty() || v[0] == '#') continue;
            std::size_t colon = v.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorCode::ConfigError,
                            "synonym line lacks 'concept:' prefix: " + std::string(v));
            }
            std::string concept_name(text::trim(v.substr(0, colon)));
            add_term(concept_name, concept_name);
            std::string_view rest = v.substr(colon + 1);
            std::size_t start = 0;
            while (start <= rest.size()) {
                std::size_t comma = rest.find(',', start);
                std::string_view term = comma == std::string_view::npos
                                            ? rest.substr(start)
                                            : rest.substr(start, comma - start);
                term = text::trim(term);
                if (!term.empty()) add_term(term, concept_name);
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
        }
    }

    static SynonymTable defaults() {
        SynonymTable t;
        t.add_group("database", {"db", "mysql", "postgresql", "postgres", "mariadb", "sqlite",
                                 "oracle db", "sql server", "mongodb", "mongo", "rds",
                                 "data store", "datastore", "relational database", "数据库"});
        t.add_group("cache", {"redis", "memcached", "cache layer", "caching layer", "缓存"});
        t.add_group("queue", {"message queue", "mq", "rabbitmq", "kafka", "activemq", "sqs",
                              "message broker", "broker", "event bus", "消息队列"});
        t.add_group("gateway", {"api gateway", "reverse proxy", "nginx", "网关"});
        t.add_group("load balancer", {"lb", "haproxy", "elb", "负载均衡"});
        t.add_group("frontend", {"front end", "ui", "user interface", "web ui", "gui",
                                 "web client", "browser", "前端"});
        t.add_group("backend", {"back end", "application server", "app server", "后端"});
        t.add_group("auth", {"authentication", "auth service", "authentication service",
                             "identity provider", "oauth", "sso", "keycloak", "认证"});
        t.add_group("object storage", {"blob storage", "s3", "oss", "minio", "file storage",
                                       "file store", "对象存储"});
        t.add_group("search engine", {"elasticsearch", "solr", "full text search", "搜索引擎"});
        t.add_group("monitoring", {"prometheus", "grafana", "metrics", "telemetry", "监控"});
        t.add_group("logging", {"log", "logs", "log service", "elk", "log aggregator",
                                "logstash", "日志"});
        t.add_group("ci", {"ci cd", "continuous integration", "jenkins", "build pipeline"});
        t.add_group("container runtime", {"docker", "kubernetes", "k8s",
                                          "container orchestration"});
        t.add_group("web server", {"http server", "apache", "tomcat", "iis"});
        t.add_group("api", {"rest api", "api service", "api server", "web api", "http api"});
        t.add_group("scheduler", {"cron", "task scheduler", "job scheduler", "quartz", "调度器"});
        t.add_group("notification", {"notification service", "push notification",
                                     "email service", "mailer", "smtp", "通知服务"});
        t.add_group("payment", {"payment gateway", "payment service", "stripe", "paypal",
                                "支付"});
        t.add_group("user service", {"user management", "account service", "user module",
                                     "用户服务"});
        t.add_group("config", {"configuration", "config service", "config center", "settings",
                               "配置中心"});
        t.add_group("service registry", {"registry", "service discovery", "discovery", "eureka",
                                         "consul", "nacos"});
        t.add_group("cdn", {"content delivery network"});
        t.add_group("firewall", {"waf"});
        t.add_group("analytics", {"reporting", "report service", "bi", "数据分析"});
        t.add_group("model service", {"ml", "machine learning", "inference service", "ml model",
                                      "llm", "large language model", "模型服务"});
        t.add_group("data access", {"orm", "dao", "data access layer", "repository layer",
                                    "persistence layer"});
        t.add_group("middleware", {"中间件"});
        t.add_group("mobile client", {"mobile app", "android app", "ios app", "移动端"});
        t.add_group("admin console", {"admin", "admin panel", "management console", "dashboard",
                                      "管理后台"});
        t.add_group("file system", {"filesystem", "fs", "文件系统"});
        t.add_group("time series database", {"influxdb", "timescaledb"});
        t.add_group("graph database", {"neo4j", "图数据库"});
        t.add_group("vector database", {"milvus", "faiss", "pinecone", "向量数据库"});
        t.add_group("secret manager", {"vault", "secrets"});
        t.add_group("tracing", {"jaeger", "zipkin", "opentelemetry", "链路追踪"});
        t.add_group("websocket", {"ws", "socket io", "websocket server"});
        t.add_group("etl", {"data pipeline", "airflow"});
        t.add_group("crawler", {"web crawler", "spider", "scraper", "爬虫"});
        t.add_group("email", {"mail", "邮件"});
        return t;
    }

private:
    std::unordered_map<std::string, std::string> term_to_concept_;
};

enum class MatchMode { lexical, judge, hybrid };

inline std::string_view to_string(MatchMode m) {
    switch (m) {
        case MatchMode::lexical: return "lexical";
        case MatchMode::judge: return "judge";
        case MatchMode::hybrid: return "hybrid";
    }
    return "lexical";
}

struct MatchConfig {
    MatchMode mode = MatchMode::lexical;
    double similarity_threshold = 0.5;
    SynonymTable synonyms = SynonymTable::defaults();
    bool direction_sensitive = true;
    LayerMap layer_map = LayerMap::defaults();
    // candidates scoring inside [floor, threshold) are referred to the judge
    double judge_band_floor = 0.2;
};

enum class MatchMethod { exact, token, synonym, judge };

inline std::string_view to_string(MatchMethod m) {
    switch (m) {
        case MatchMethod::exact: return "exact";
        case MatchMethod::token: return "token";
        case MatchMethod::synonym: return "synonym";
        case MatchMethod::judge: return "judge";
    }
    return "token";
}

struct MatchedPair {
    std::string pred;  // NodeId in the predicted graph
    std::string ref;   // NodeId in the reference graph
    double score = 0.0;
    MatchMethod method = MatchMethod::token;
    bool layer_correct = false;
};

struct NodeMatching {
    std::vector<MatchedPair> pairs;
    std::vector<std::string> unmatched_pred;  // false positives
    std::vector<std::string> unmatched_ref;   // false negatives
};

struct EdgeMatching {
    std::vector<std::pair<std::size_t, std::size_t>> tp;  // (pred idx, ref idx)
    std::vector<std::size_t> fp;                          // pred edge indices
    std::vector<std::size_t> fn;                          // ref edge indices
    std::vector<std::size_t> container_resolved;          // pred edges that used container alignment
};

/// Query sent to the semantic judge for a borderline pair.
struct AlignmentQuery {
    std::string pred_name;
    std::string ref_name;
    std::string pred_context;
    std::string ref_context;
};

/// Arbiter for node-name equivalence. The judge module provides the
/// network-backed implementation; tests use deterministic fakes.
class NodeEquivalenceJudge {
public:
    virtual ~NodeEquivalenceJudge() = default;
    /// One verdict per query, in input order: true when the names are
    /// equivalent or related by generalization.
    virtual std::vector<bool> judge_pairs(const std::vector<AlignmentQuery>& queries) = 0;
};

namespace detail {

struct ScoredName {
    std::string id;
    std::string display;
    std::vector<std::string> tokens;
    std::optional<std::string> concept_name;
};

inline std::vector<ScoredName> scored_names(const ArchGraph& g,
                                            const std::vector<std::string>& ids,
                                            const SynonymTable& synonyms) {
    std::vector<ScoredName> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
        const ArchNode& n = g.at(id);
        ScoredName s;
        s.id = id;
        s.display = n.display_name;
        s.tokens = normalize_label(n.display_name);
        s.concept_name = synonyms.concept_of(s.tokens);
        out.push_back(std::move(s));
    }
    return out;
}

inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct Candidate {
    std::size_t p, r;
    double score;
    MatchMethod method;
};

inline bool candidate_precedes(const Candidate& a, const Candidate& b,
                               const std::vector<ScoredName>& preds,
                               const std::vector<ScoredName>& refs) {
    auto key = [&](const Candidate& c) {
        return std::make_tuple(-c.score, preds[c.p].display, refs[c.r].display, preds[c.p].id,
                               refs[c.r].id);
    };
    return key(a) < key(b);
}

/// Greedy deterministic selection over accepted candidates: descending
/// score, ties broken by pred name, ref name, then ids.
inline std::vector<Candidate> greedy_select(std::vector<Candidate> candidates,
                                            const std::vector<ScoredName>& preds,
                                            const std::vector<ScoredName>& refs) {
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                  return candidate_precedes(a, b, preds, refs);
              });
    std::vector<bool> p_used(preds.size(), false), r_used(refs.size(), false);
    std::vector<Candidate> picked;
    for (const Candidate& c : candidates) {
        if (p_used[c.p] || r_used[c.r]) continue;
        p_used[c.p] = true;
        r_used[c.r] = true;
        picked.push_back(c);
    }
    return picked;
}

// Lexical-only injective map between two id sets; used for container
// endpoint resolution and for the greedy GED construction.
inline std::unordered_map<std::string, std::string> lexical_map(
    const ArchGraph& pred, const std::vector<std::string>& pred_ids, const ArchGraph& ref,
    const std::vector<std::string>& ref_ids, const MatchConfig& config) {
    std::vector<ScoredName> ps = scored_names(pred, pred_ids, config.synonyms);
    std::vector<ScoredName> rs = scored_names(ref, ref_ids, config.synonyms);
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < rs.size(); ++j) {
            double score;
            MatchMethod method;
            if (!ps[i].tokens.empty() && ps[i].tokens == rs[j].tokens) {
                score = 1.0;
                method = MatchMethod::exact;
            } else if (ps[i].concept_name && ps[i].concept_name == rs[j].concept_name) {
                score = 1.0;
                method = MatchMethod::synonym;
            } else {
                score = jaccard(ps[i].tokens, rs[j].tokens);
                method = MatchMethod::token;
                if (score < config.similarity_threshold) continue;
            }
            candidates.push_back({i, j, score, method});
        }
    }
    std::unordered_map<std::string, std::string> map;
    for (const Candidate& c : greedy_select(std::move(candidates), ps, rs)) {
        map.emplace(ps[c.p].id, rs[c.r].id);
    }
    return map;
}

}  // namespace detail

/// Injective leaf-node alignment between predicted and reference graphs.
/// Candidate scoring: equal normalized token sequences score 1 (exact),
/// synonym-table concept agreement scores 1, otherwise token-set Jaccard.
/// In judge/hybrid mode, candidates scoring inside [0.2, threshold) are
/// referred to the semantic judge and kept when ruled equivalent.
inline NodeMatching match_nodes(const ArchGraph& pred, const ArchGraph& ref,
                                const MatchConfig& config,
                                NodeEquivalenceJudge* judge = nullptr) {
    using detail::Candidate;

    const bool uses_judge = config.mode != MatchMode::lexical;
    if (uses_judge && judge == nullptr) {
        throw Error(ErrorCode::JudgeUnavailable,
                    "judge/hybrid matching requires a judge handle");
    }

    std::vector<std::string> pred_leaves = leaf_nodes(pred);
    std::vector<std::string> ref_leaves = leaf_nodes(ref);
    std::vector<detail::ScoredName> ps = detail::scored_names(pred, pred_leaves, config.synonyms);
    std::vector<detail::ScoredName> rs = detail::scored_names(ref, ref_leaves, config.synonyms);

    std::vector<Candidate> accepted;
    std::vector<Candidate> borderline;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < rs.size(); ++j) {
            double score;
            MatchMethod method;
            if (!ps[i].tokens.empty() && ps[i].tokens == rs[j].tokens) {
                score = 1.0;
                method = MatchMethod::exact;
            } else if (ps[i].concept_name && ps[i].concept_name == rs[j].concept_name) {
                score = 1.0;
                method = MatchMethod::synonym;
            } else {
                score = detail::jaccard(ps[i].tokens, rs[j].tokens);
                method = MatchMethod::token;
                if (score < config.similarity_threshold) {
                    if (uses_judge && score >= config.judge_band_floor) {
                        borderline.push_back({i, j, score, MatchMethod::judge});
                    }
                    continue;
                }
            }
            accepted.push_back({i, j, score, method});
        }
    }

    if (!borderline.empty()) {
        // deterministic submission order, independent of thread count
        std::sort(borderline.begin(), borderline.end(),
                  [&](const Candidate& a, const Candidate& b) {
                      return detail::candidate_precedes(a, b, ps, rs);
                  });
        std::vector<AlignmentQuery> queries;
        queries.reserve(borderline.size());
        for (const Candidate& c : borderline) {
            queries.push_back(AlignmentQuery{ps[c.p].display, rs[c.r].display,
                                             std::string(to_string(pred.at(ps[c.p].id).kind)),
                                             std::string(to_string(ref.at(rs[c.r].id).kind))});
        }
        std::vector<bool> verdicts = judge->judge_pairs(queries);
        for (std::size_t k = 0; k < borderline.size() && k < verdicts.size(); ++k) {
            if (verdicts[k]) accepted.push_back(borderline[k]);
        }
    }

    NodeMatching matching;
    std::vector<bool> p_used(ps.size(), false), r_used(rs.size(), false);
    for (const Candidate& c : detail::greedy_select(std::move(accepted), ps, rs)) {
        MatchedPair pair;
        pair.pred = ps[c.p].id;
        pair.ref = rs[c.r].id;
        pair.score = c.score;
        pair.method = c.method;
        pair.layer_correct = layer_of(pred, pair.pred, config.layer_map) ==
                             layer_of(ref, pair.ref, config.layer_map);
        p_used[c.p] = true;
        r_used[c.r] = true;
        matching.pairs.push_back(std::move(pair));
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!p_used[i]) matching.unmatched_pred.push_back(ps[i].id);
    }
    for (std::size_t j = 0; j < rs.size(); ++j) {
        if (!r_used[j]) matching.unmatched_ref.push_back(rs[j].id);
    }
    return matching;
}

/// Derives the edge alignment from a node matching. Container endpoints are
/// resolved through a lexical container-to-container alignment; that
/// resolution never contributes to node-level counts. A predicted edge is a
/// true positive iff its resolved endpoints hit an unconsumed reference edge
/// (respecting direction when configured); matching is greedy in declaration
/// order. Edge labels do not affect TP status.
inline EdgeMatching match_edges(const ArchGraph& pred, const ArchGraph& ref,
                                const NodeMatching& nodes, const MatchConfig& config) {
    std::unordered_map<std::string, std::string> node_map;
    for (const MatchedPair& p : nodes.pairs) node_map.emplace(p.pred, p.ref);

    std::unordered_map<std::string, std::string> container_map = detail::lexical_map(
        pred, container_nodes(pred), ref, container_nodes(ref), config);

    auto resolve = [&](const std::string& id, bool& via_container) -> std::optional<std::string> {
        if (auto it = node_map.find(id); it != node_map.end()) return it->second;
        if (auto it = container_map.find(id); it != container_map.end()) {
            via_container = true;
            return it->second;
        }
        return std::nullopt;
    };

    EdgeMatching em;
    std::vector<bool> ref_used(ref.edges().size(), false);
    for (std::size_t i = 0; i < pred.edges().size(); ++i) {
        const ArchEdge& pe = pred.edges()[i];
        bool via_container = false;
        auto src = resolve(pe.source, via_container);
        auto tgt = resolve(pe.target, via_container);
        if (via_container) em.container_resolved.push_back(i);
        if (!src || !tgt) {
            em.fp.push_back(i);
            continue;
        }
        bool matched = false;
        for (std::size_t j = 0; j < ref.edges().size(); ++j) {
            if (ref_used[j]) continue;
            const ArchEdge& re = ref.edges()[j];
            bool hit = (re.source == *src && re.target == *tgt);
            if (!hit && !config.direction_sensitive) {
                hit = (re.source == *tgt && re.target == *src);
            }
            if (hit) {
                ref_used[j] = true;
                em.tp.emplace_back(i, j);
                matched = true;
                break;
            }
        }
        if (!matched) em.fp.push_back(i);
    }
    for (std::size_t j = 0; j < ref.edges().size(); ++j) {
        if (!ref_used[j]) em.fn.push_back(j);
    }
    return em;
}

}  // namespace archeval

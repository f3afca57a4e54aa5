#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "archeval/alignment.hpp"
#include "archeval/chat.hpp"
#include "archeval/detail/hash.hpp"
#include "archeval/error.hpp"
#include "archeval/version.hpp"

namespace archeval {

struct JudgeConfig {
    std::string endpoint;
    std::string model_name;  // mandatory, no default
    double temperature = 0.0;
    int max_retries = 3;
    std::filesystem::path cache_dir;  // empty disables the response cache
    std::chrono::milliseconds request_timeout{60000};
    int max_concurrency = 4;
};

/// Four-dimension diagram scores, each on the 1-5 scale.
struct JudgeScores {
    int completeness = 0;
    int accuracy = 0;
    int rationality = 0;
    int readability = 0;
    std::string rationale;
};

enum class NodeRelation { identical, synonym, generalization, unrelated };

inline std::string_view to_string(NodeRelation r) {
    switch (r) {
        case NodeRelation::identical: return "identical";
        case NodeRelation::synonym: return "synonym";
        case NodeRelation::generalization: return "generalization";
        case NodeRelation::unrelated: return "unrelated";
    }
    return "unrelated";
}

struct AlignmentVerdict {
    std::string pred_name;
    std::string ref_name;
    bool equivalent = false;
    NodeRelation relation = NodeRelation::unrelated;
};

inline AlignmentVerdict make_verdict(std::string pred, std::string ref, NodeRelation relation) {
    AlignmentVerdict v;
    v.pred_name = std::move(pred);
    v.ref_name = std::move(ref);
    v.relation = relation;
    v.equivalent = relation != NodeRelation::unrelated;
    return v;
}

namespace detail {

// Balanced-brace extraction of the first JSON object, string-aware.
inline std::optional<std::string> first_json_object(std::string_view raw) {
    for (std::size_t start = raw.find('{'); start != std::string_view::npos;
         start = raw.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (c == '\\') ++i;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    std::string candidate(raw.substr(start, i - start + 1));
                    if (nlohmann::json::accept(candidate)) return candidate;
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

inline int score_field(const nlohmann::json& scores, const char* key) {
    if (!scores.contains(key)) {
        throw Error(ErrorCode::MalformedJudgeResponse, std::string("missing score '") + key + "'");
    }
    const nlohmann::json& v = scores.at(key);
    nlohmann::json raw = v;
    if (v.is_object()) {
        if (!v.contains("score")) {
            throw Error(ErrorCode::MalformedJudgeResponse,
                        std::string("score object for '") + key + "' lacks a 'score' field");
        }
        raw = v.at("score");
    }
    if (!raw.is_number_integer()) {
        throw Error(ErrorCode::MalformedJudgeResponse,
                    std::string("score '") + key + "' is not an integer");
    }
    int value = raw.get<int>();
    if (value < 1 || value > 5) {
        throw Error(ErrorCode::MalformedJudgeResponse,
                    std::string("score '") + key + "' outside [1,5]: " + std::to_string(value));
    }
    return value;
}

}  // namespace detail

/// Parses a judge response into scores: markdown fences and surrounding
/// prose are tolerated, the first JSON object wins. Scores may be bare
/// integers or objects carrying an integer "score". Out-of-range values are
/// rejected, never clamped.
inline JudgeScores parse_judge_json(std::string_view raw) {
    auto object_text = detail::first_json_object(raw);
    if (!object_text) {
        throw Error(ErrorCode::MalformedJudgeResponse, "no JSON object in response");
    }
    nlohmann::json j = nlohmann::json::parse(*object_text);
    if (!j.contains("rationale") || !j.contains("scores")) {
        throw Error(ErrorCode::MalformedJudgeResponse, "missing 'rationale' or 'scores' key");
    }
    const nlohmann::json& scores = j.at("scores");
    JudgeScores out;
    out.rationale = j.at("rationale").is_string() ? j.at("rationale").get<std::string>()
                                                  : j.at("rationale").dump();
    out.completeness = detail::score_field(scores, "completeness");
    out.accuracy = detail::score_field(scores, "accuracy");
    out.rationality = detail::score_field(scores, "rationality");
    out.readability = detail::score_field(scores, "readability");
    return out;
}

inline constexpr const char* kEvaluatorSystemPrompt = R"([Role]
Expert Software Architect & Impartial Evaluator.

[Evaluation Rubric] (Constraint: Strictly adhere to Exemption Rules)
- Dim 1: Completeness (1-5): Evaluate strictly against PRD for missing components. (Exemption: Do NOT penalize hallucinations here).
- Dim 2: Accuracy (1-5): Evaluate against PRD for fabricated elements. (Exemption: Do NOT penalize omitted components here).
- Dim 3: Rationality (1-5): Evaluate topology against software engineering common sense. (Exemption: Ignore PRD omissions here).
- Dim 4: Readability (1-5): Evaluate code hierarchy/modularity based purely on code syntax. (Exemption: Do NOT evaluate functional correctness).

[Output Format]
STRICT JSON output required containing the rationale and Scores:
{
  "rationale": "...",
  "scores": {
    "completeness": {"score": <1-5>},
    "accuracy": {"score": <1-5>},
    "rationality": {"score": <1-5>},
    "readability": {"score": <1-5>}
  }
}
)";

inline constexpr const char* kAlignmentSystemPrompt = R"([Role]
Expert Software Architect judging whether component names denote the same architectural element.

[Task]
For each numbered pair, classify the relation of NAME_A to NAME_B as one of:
- identical: same element, possibly with trivial formatting differences
- synonym: different wording for the same element
- generalization: one is a specific instance or specialization of the other (e.g. MySQL and Database)
- unrelated: distinct architectural elements

[Output Format]
STRICT JSON only:
{"verdicts": [{"pair": 1, "relation": "identical|synonym|generalization|unrelated"}, ...]}
)";

/// LLM-as-a-judge client: diagram scoring, node-equivalence arbitration,
/// strict-JSON handling with bounded correction retries, and a file cache
/// keyed by prompt version, inputs, and model.
class JudgeClient {
public:
    JudgeClient(JudgeConfig config, std::shared_ptr<ChatTransport> transport)
        : config_(std::move(config)),
          transport_(std::move(transport)),
          slots_(std::max(1, config_.max_concurrency)) {
        if (config_.model_name.empty()) {
            throw Error(ErrorCode::ConfigError, "judge model_name is mandatory");
        }
        if (!transport_) {
            throw Error(ErrorCode::JudgeUnavailable, "judge transport not configured");
        }
    }

    /// Scores a predicted diagram against the PRD (or the reference code
    /// when no PRD is available) on the four dimensions.
    JudgeScores score_diagram(const std::string& prd_or_reference,
                              const std::string& predicted_code) {
        if (predicted_code.empty()) {
            throw Error(ErrorCode::ConfigError, "predicted code must be non-empty");
        }
        std::string user = "<PRD_OR_GROUND_TRUTH>\n" + prd_or_reference +
                           "\n</PRD_OR_GROUND_TRUTH>\n\n<PREDICTED_DIAGRAM>\n" + predicted_code +
                           "\n</PREDICTED_DIAGRAM>";
        std::string raw = cached_complete(kEvaluatorPromptVersion, kEvaluatorSystemPrompt, user,
                                          [](const std::string& body) {
                                              (void)parse_judge_json(body);
                                          });
        return parse_judge_json(raw);
    }

    /// Classifies candidate name pairs in batches of at most 20. Entries the
    /// model leaves unparseable default to unrelated, with a warning pushed
    /// to `warnings` when provided. Results come back in input order.
    std::vector<AlignmentVerdict> judge_node_equivalence(
        const std::vector<AlignmentQuery>& candidates,
        std::vector<std::string>* warnings = nullptr) {
        if (candidates.empty()) {
            throw Error(ErrorCode::ConfigError, "candidate list must be non-empty");
        }
        std::vector<AlignmentVerdict> out;
        out.reserve(candidates.size());
        constexpr std::size_t kBatch = 20;
        for (std::size_t offset = 0; offset < candidates.size(); offset += kBatch) {
            std::size_t end = std::min(candidates.size(), offset + kBatch);
            std::string user = "Classify these component name pairs:\n";
            for (std::size_t i = offset; i < end; ++i) {
                user += std::to_string(i - offset + 1) + ". NAME_A: \"" +
                        candidates[i].pred_name + "\" (" + candidates[i].pred_context +
                        "), NAME_B: \"" + candidates[i].ref_name + "\" (" +
                        candidates[i].ref_context + ")\n";
            }
            std::string raw = cached_complete(kAlignmentPromptVersion, kAlignmentSystemPrompt,
                                              user, [](const std::string&) {});
            append_batch_verdicts(candidates, offset, end, raw, out, warnings);
        }
        return out;
    }

    const JudgeConfig& config() const noexcept { return config_; }

private:
    static NodeRelation relation_from_string(std::string_view s) {
        if (s == "identical") return NodeRelation::identical;
        if (s == "synonym") return NodeRelation::synonym;
        if (s == "generalization") return NodeRelation::generalization;
        return NodeRelation::unrelated;
    }

    void append_batch_verdicts(const std::vector<AlignmentQuery>& candidates, std::size_t offset,
                               std::size_t end, const std::string& raw,
                               std::vector<AlignmentVerdict>& out,
                               std::vector<std::string>* warnings) {
        std::vector<std::optional<NodeRelation>> parsed(end - offset);
        if (auto object_text = detail::first_json_object(raw)) {
            nlohmann::json j = nlohmann::json::parse(*object_text);
            if (j.contains("verdicts") && j.at("verdicts").is_array()) {
                for (const auto& item : j.at("verdicts")) {
                    if (!item.is_object() || !item.contains("pair") || !item.contains("relation"))
                        continue;
                    if (!item.at("pair").is_number_integer()) continue;
                    long pair = item.at("pair").get<long>();
                    if (pair < 1 || static_cast<std::size_t>(pair) > parsed.size()) continue;
                    if (!item.at("relation").is_string()) continue;
                    parsed[static_cast<std::size_t>(pair - 1)] =
                        relation_from_string(item.at("relation").get<std::string>());
                }
            }
        }
        for (std::size_t i = offset; i < end; ++i) {
            auto relation = parsed[i - offset];
            if (!relation && warnings) {
                warnings->push_back("judge verdict missing for pair '" + candidates[i].pred_name +
                                    "' / '" + candidates[i].ref_name + "'; assuming unrelated");
            }
            out.push_back(make_verdict(candidates[i].pred_name, candidates[i].ref_name,
                                       relation.value_or(NodeRelation::unrelated)));
        }
    }

    /// Sends a request with malformed-response retries; the successful raw
    /// body is cached under a key covering template version, inputs, and
    /// model. `check` throws MalformedJudgeResponse to trigger a retry with
    /// the parse error quoted back to the model.
    std::string cached_complete(const std::string& prompt_version, const std::string& system,
                                const std::string& user,
                                const std::function<void(const std::string&)>& check) {
        const std::string key = archeval::detail::sha256_hex(
            prompt_version + '\x1e' + config_.model_name + '\x1e' + system + '\x1e' + user);
        if (auto hit = cache_get(key)) return *hit;

        ChatRequest request;
        request.model = config_.model_name;
        request.system_prompt = system;
        request.user_prompt = user;
        request.temperature = config_.temperature;

        std::string last_parse_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                request.user_prompt =
                    user + "\n\nYour previous reply could not be parsed (" + last_parse_error +
                    "). Reply again with STRICT JSON only, no prose, no markdown fences.";
            }
            std::string body = guarded_complete(request);
            try {
                check(body);
                cache_put(key, body);
                return body;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::MalformedJudgeResponse) throw;
                last_parse_error = e.what();
            }
        }
        throw Error(ErrorCode::MalformedJudgeResponse,
                    "unparseable after " + std::to_string(config_.max_retries + 1) +
                        " attempts: " + last_parse_error);
    }

    std::string guarded_complete(const ChatRequest& request) {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};
        return transport_->complete(request);
    }

    std::optional<std::string> cache_get(const std::string& key) {
        if (config_.cache_dir.empty()) return std::nullopt;
        std::filesystem::path file = config_.cache_dir / (key + ".json");
        std::ifstream in(file, std::ios::binary);
        if (!in) return std::nullopt;
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return body;
    }

    void cache_put(const std::string& key, const std::string& body) {
        if (config_.cache_dir.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(config_.cache_dir, ec);
        std::filesystem::path final_path = config_.cache_dir / (key + ".json");
        std::filesystem::path tmp_path = config_.cache_dir / (key + ".tmp");
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            out.write(body.data(), static_cast<std::streamsize>(body.size()));
        }
        std::filesystem::rename(tmp_path, final_path, ec);
    }

    JudgeConfig config_;
    std::shared_ptr<ChatTransport> transport_;
    std::counting_semaphore<> slots_;
};

/// Adapter exposing the judge as the alignment module's equivalence oracle.
class JudgeBackedAligner final : public NodeEquivalenceJudge {
public:
    explicit JudgeBackedAligner(JudgeClient& client, std::vector<std::string>* warnings = nullptr)
        : client_(client), warnings_(warnings) {}

    std::vector<bool> judge_pairs(const std::vector<AlignmentQuery>& queries) override {
        if (queries.empty()) return {};
        std::vector<AlignmentVerdict> verdicts =
            client_.judge_node_equivalence(queries, warnings_);
        std::vector<bool> out;
        out.reserve(verdicts.size());
        for (const auto& v : verdicts) out.push_back(v.equivalent);
        return out;
    }

private:
    JudgeClient& client_;
    std::vector<std::string>* warnings_;
};

}  // namespace archeval

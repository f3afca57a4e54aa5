#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "archeval/chat.hpp"
#include "archeval/detail/hash.hpp"
#include "archeval/error.hpp"
#include "archeval/plantuml.hpp"
#include "archeval/prd.hpp"
#include "archeval/version.hpp"

namespace archeval {

inline constexpr const char* kDefaultGenerationPrompt =
    R"(You are a senior software architect. Read the product requirements document and design the software architecture of the system.

Output exactly one PlantUML component diagram and nothing else:
- a single @startuml ... @enduml block
- organize components into layered packages (Application Layer, Support Layer, Infrastructure Layer) where applicable
- declare components, databases, queues, and actors explicitly, then draw the data flows between them with directed arrows
- no commentary before or after the diagram
)";

struct GenerationConfig {
    std::string endpoint;
    std::string model_name;
    double temperature = 0.0;  // greedy decoding
    std::string system_prompt = kDefaultGenerationPrompt;
    std::string prompt_version = kGenerationPromptVersion;
    int max_output_tokens = 4096;
    std::chrono::milliseconds request_timeout{120000};
};

/// First-round generation record; persisted before being returned so that
/// every record handed out already exists on disk.
struct GenerationRecord {
    std::string case_id;
    ContextSetting setting = ContextSetting::full;
    std::string model_name;
    std::string raw_output;
    std::optional<std::string> extracted_code;
    std::string prompt_digest;
    std::string timestamp;  // UTC, ISO 8601
    int round = 1;
};

namespace detail {

inline std::string sanitize_path_component(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? "unnamed" : out;
}

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

inline nlohmann::json to_json(const GenerationRecord& r) {
    nlohmann::json j;
    j["case_id"] = r.case_id;
    j["setting"] = std::string(to_string(r.setting));
    j["model_name"] = r.model_name;
    j["raw_output"] = r.raw_output;
    if (r.extracted_code) j["extracted_code"] = *r.extracted_code;
    j["prompt_digest"] = r.prompt_digest;
    j["timestamp"] = r.timestamp;
    j["round"] = r.round;
    return j;
}

inline GenerationRecord generation_record_from_json(const nlohmann::json& j) {
    GenerationRecord r;
    r.case_id = j.value("case_id", "");
    if (auto s = context_setting_from_string(j.value("setting", "full"))) r.setting = *s;
    r.model_name = j.value("model_name", "");
    r.raw_output = j.value("raw_output", "");
    if (j.contains("extracted_code")) r.extracted_code = j.at("extracted_code").get<std::string>();
    r.prompt_digest = j.value("prompt_digest", "");
    r.timestamp = j.value("timestamp", "");
    r.round = j.value("round", 1);
    return r;
}

inline std::filesystem::path generation_record_path(const std::filesystem::path& outputs_root,
                                                    const std::string& model_name,
                                                    ContextSetting setting,
                                                    const std::string& case_id) {
    return outputs_root / detail::sanitize_path_component(model_name) /
           std::string(to_string(setting)) / (detail::sanitize_path_component(case_id) + ".json");
}

/// One request, no resampling. The raw output is stored verbatim; records
/// with no extractable diagram block are kept (they count as SV failures
/// downstream, which is data, not an error).
inline GenerationRecord generate_diagram(const std::string& prd_text,
                                         const GenerationConfig& config,
                                         const std::string& case_id, ContextSetting setting,
                                         ChatTransport& transport,
                                         const std::filesystem::path& outputs_root) {
    if (prd_text.empty()) {
        throw Error(ErrorCode::ConfigError, "prd text must be non-empty");
    }
    ChatRequest request;
    request.model = config.model_name;
    request.system_prompt = config.system_prompt;
    request.user_prompt = prd_text;
    request.temperature = config.temperature;
    request.max_tokens = config.max_output_tokens;

    std::string raw;
    try {
        raw = transport.complete(request);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::GenerationTransportError, e.what());
    }
    if (text::trim(raw).empty()) {
        throw Error(ErrorCode::EmptyModelOutput, "model returned no content");
    }

    GenerationRecord record;
    record.case_id = case_id;
    record.setting = setting;
    record.model_name = config.model_name;
    record.raw_output = raw;
    record.prompt_digest = detail::sha256_hex(config.prompt_version + '\x1e' +
                                              config.system_prompt + '\x1e' + prd_text);
    record.timestamp = detail::utc_timestamp();
    record.round = 1;
    try {
        record.extracted_code = extract_plantuml_block(raw).source_text;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoDiagramFound) throw;
    }

    // persist-then-return, atomically
    std::filesystem::path path =
        generation_record_path(outputs_root, config.model_name, setting, case_id);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << to_json(record).dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot persist " + path.string());
    return record;
}

}  // namespace archeval

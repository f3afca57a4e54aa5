#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace archeval {

/// Stable error identifiers used across the toolkit. CLI exit codes and
/// harness warning records are derived from these, so names do not change.
enum class ErrorCode {
    // graph
    UnknownNode,
    InvalidGraph,
    // plantuml frontend
    UnbalancedBlock,
    UndefinedAlias,
    MalformedArrow,
    MissingDelimiters,
    NoDiagramFound,
    RendererUnavailable,
    RenderTimeout,
    // alignment / metrics
    JudgeUnavailable,
    NoMatchedNodes,
    EmptyBatch,
    // judge
    JudgeTransportError,
    MalformedJudgeResponse,
    // prd
    NoSectionsFound,
    MissingRequiredSection,
    // genclient
    GenerationTransportError,
    EmptyModelOutput,
    // harness
    DatasetLayoutError,
    EmptyResults,
    LengthMismatch,
    EmptyRatings,
    // plumbing
    ConfigError,
    IoError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::InvalidGraph: return "InvalidGraph";
        case ErrorCode::UnbalancedBlock: return "UnbalancedBlock";
        case ErrorCode::UndefinedAlias: return "UndefinedAlias";
        case ErrorCode::MalformedArrow: return "MalformedArrow";
        case ErrorCode::MissingDelimiters: return "MissingDelimiters";
        case ErrorCode::NoDiagramFound: return "NoDiagramFound";
        case ErrorCode::RendererUnavailable: return "RendererUnavailable";
        case ErrorCode::RenderTimeout: return "RenderTimeout";
        case ErrorCode::JudgeUnavailable: return "JudgeUnavailable";
        case ErrorCode::NoMatchedNodes: return "NoMatchedNodes";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::JudgeTransportError: return "JudgeTransportError";
        case ErrorCode::MalformedJudgeResponse: return "MalformedJudgeResponse";
        case ErrorCode::NoSectionsFound: return "NoSectionsFound";
        case ErrorCode::MissingRequiredSection: return "MissingRequiredSection";
        case ErrorCode::GenerationTransportError: return "GenerationTransportError";
        case ErrorCode::EmptyModelOutput: return "EmptyModelOutput";
        case ErrorCode::DatasetLayoutError: return "DatasetLayoutError";
        case ErrorCode::EmptyResults: return "EmptyResults";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyRatings: return "EmptyRatings";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Exception type carrying a stable ErrorCode alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace archeval

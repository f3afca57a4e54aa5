#pragma once

namespace archeval {

inline constexpr const char* kVersion = "0.1.0";

// Prompt templates are versioned so cached judge/generation responses are
// invalidated whenever the wording changes.
inline constexpr const char* kEvaluatorPromptVersion = "diagram-evaluator-v1";
inline constexpr const char* kAlignmentPromptVersion = "node-alignment-v1";
inline constexpr const char* kGenerationPromptVersion = "diagram-generation-v1";

}  // namespace archeval

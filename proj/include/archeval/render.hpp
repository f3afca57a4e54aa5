#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "archeval/detail/process.hpp"
#include "archeval/error.hpp"

namespace archeval {

/// External renderer invocation: diagram text on stdin, image bytes on
/// stdout, fixed argument template.
struct RendererConfig {
    std::string executable;
    std::chrono::milliseconds timeout{30000};
};

struct RenderOutcome {
    bool success = false;
    int exit_code = -1;
    std::string image;       // stdout bytes
    std::string error_text;  // stderr capture
};

inline RenderOutcome render_external(std::string_view diagram_text, const RendererConfig& config) {
    if (config.executable.empty()) {
        throw Error(ErrorCode::RendererUnavailable, "no renderer executable configured");
    }
    std::error_code ec;
    if (!std::filesystem::exists(config.executable, ec)) {
        // Also allow bare command names resolved through PATH.
        if (config.executable.find('/') != std::string::npos) {
            throw Error(ErrorCode::RendererUnavailable,
                        "renderer executable not found: " + config.executable);
        }
    }
    std::vector<std::string> argv{config.executable, "-pipe", "-tpng", "-failfast2"};
    detail::ProcessResult proc = detail::run_process(argv, diagram_text, config.timeout);
    if (proc.spawn_failed) {
        throw Error(ErrorCode::RendererUnavailable, "failed to spawn " + config.executable);
    }
    if (proc.timed_out) {
        throw Error(ErrorCode::RenderTimeout, "renderer exceeded " +
                                                  std::to_string(config.timeout.count()) + " ms");
    }
    if (proc.exit_code == 127) {
        throw Error(ErrorCode::RendererUnavailable, "renderer not executable: " + config.executable);
    }
    RenderOutcome out;
    out.exit_code = proc.exit_code;
    out.image = std::move(proc.out);
    out.error_text = std::move(proc.err);
    out.success = (proc.exit_code == 0);
    return out;
}

}  // namespace archeval

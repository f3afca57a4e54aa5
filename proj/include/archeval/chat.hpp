#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "archeval/error.hpp"

namespace archeval {

/// One chat-completion request. Temperature stays 0 everywhere in this
/// toolkit (greedy decoding), callers never override it per call.
struct ChatRequest {
    std::string model;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    int max_tokens = 0;  // 0 = provider default
};

/// Transport over a chat-completion-compatible API. Implementations throw
/// archeval::Error on failure after their own retry policy.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string describe() const = 0;
};

/// Deterministic in-process transport for tests and hermetic benchmark runs.
class MockChatTransport final : public ChatTransport {
public:
    using Handler = std::function<std::string(const ChatRequest&)>;

    explicit MockChatTransport(Handler handler) : handler_(std::move(handler)) {}

    static std::shared_ptr<MockChatTransport> returning(std::string text) {
        return std::make_shared<MockChatTransport>(
            [text = std::move(text)](const ChatRequest&) { return text; });
    }

    std::string complete(const ChatRequest& request) override {
        ++calls_;
        return handler_(request);
    }

    std::string describe() const override { return "mock"; }

    int calls() const noexcept { return calls_.load(); }

private:
    Handler handler_;
    std::atomic<int> calls_{0};
};

/// HTTP transport with bounded exponential-backoff retries. The API key is
/// read from the named environment variable when present.
class HttpChatTransport final : public ChatTransport {
public:
    HttpChatTransport(std::string endpoint, std::string api_key_env, ErrorCode failure_code,
                      std::chrono::milliseconds timeout = std::chrono::milliseconds(60000),
                      int max_retries = 3)
        : endpoint_(std::move(endpoint)),
          api_key_env_(std::move(api_key_env)),
          failure_code_(failure_code),
          timeout_(timeout),
          max_retries_(max_retries) {
        split_endpoint();
    }

    std::string complete(const ChatRequest& request) override {
        nlohmann::json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        if (request.max_tokens > 0) body["max_tokens"] = request.max_tokens;
        body["messages"] = nlohmann::json::array({
            {{"role", "system"}, {"content", request.system_prompt}},
            {{"role", "user"}, {"content", request.user_prompt}},
        });

        httplib::Headers headers{{"Content-Type", "application/json"}};
        if (const char* key = std::getenv(api_key_env_.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        std::string last_error;
        for (int attempt = 0; attempt <= max_retries_; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(250) * (1 << (attempt - 1)));
            }
            httplib::Client client(base_);
            client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
            client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
            auto res = client.Post(path_, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "connection failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw Error(failure_code_, "HTTP " + std::to_string(res->status) + ": " +
                                               res->body.substr(0, 300));
            }
            try {
                nlohmann::json parsed = nlohmann::json::parse(res->body);
                return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw Error(failure_code_,
                            std::string("unexpected completion payload: ") + e.what());
            }
        }
        throw Error(failure_code_, "request failed after " + std::to_string(max_retries_ + 1) +
                                       " attempts (" + last_error + ")");
    }

    std::string describe() const override { return endpoint_; }

private:
    void split_endpoint() {
        // scheme://host[:port][/path]; default path is the standard
        // chat-completions route
        std::size_t scheme = endpoint_.find("://");
        std::size_t path_start =
            scheme == std::string::npos ? endpoint_.find('/') : endpoint_.find('/', scheme + 3);
        if (path_start == std::string::npos || path_start + 1 >= endpoint_.size()) {
            base_ = endpoint_.substr(0, path_start);
            path_ = "/v1/chat/completions";
        } else {
            base_ = endpoint_.substr(0, path_start);
            path_ = endpoint_.substr(path_start);
        }
        if (base_.empty()) throw Error(ErrorCode::ConfigError, "empty endpoint URL");
    }

    std::string endpoint_;
    std::string api_key_env_;
    ErrorCode failure_code_;
    std::chrono::milliseconds timeout_;
    int max_retries_;
    std::string base_;
    std::string path_;
};

}  // namespace archeval

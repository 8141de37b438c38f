#pragma once

#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "exloop/errors.hpp"
#include "exloop/prompts.hpp"
#include "exloop/providers.hpp"

namespace exloop {

// Response decoding is split out so it can be tested without a server.

inline std::string parse_chat_completion_response(const nlohmann::json& body) {
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("unexpected chat completion response: ") + e.what());
    }
}

inline std::vector<double> parse_embedding_response(const nlohmann::json& body) {
    try {
        return body.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("unexpected embedding response: ") + e.what());
    }
}

namespace detail {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
    const std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

inline std::string auth_token(const std::string& env_var) {
    if (env_var.empty()) return {};
    const char* v = std::getenv(env_var.c_str());
    return v ? v : "";
}

}  // namespace detail

// OpenAI-style chat completion client. The auth token is read from an
// environment variable, never from config files.
class HttpChatCompletion : public DistillerProvider {
  public:
    HttpChatCompletion(std::string endpoint_url, std::string model,
                       std::string token_env_var = "EXLOOP_API_KEY", double temperature = 1.0)
        : url_(detail::split_url(endpoint_url)),
          model_(std::move(model)),
          token_(detail::auth_token(token_env_var)),
          temperature_(temperature) {}

    std::string complete(const std::string& prompt) override {
        const nlohmann::json payload = {
            {"model", model_},
            {"messages", {{{"role", "user"}, {"content", prompt}}}},
            {"temperature", temperature_},
        };
        httplib::Client client(url_.base);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        const auto res = client.Post(url_.path, headers, payload.dump(), "application/json");
        if (!res) throw ProviderError("chat completion request failed: " + url_.base);
        if (res->status != 200) {
            throw ProviderError("chat completion returned HTTP " + std::to_string(res->status));
        }
        const auto body = nlohmann::json::parse(res->body, nullptr, false);
        if (body.is_discarded()) throw ProviderError("chat completion returned invalid JSON");
        return parse_chat_completion_response(body);
    }

  private:
    detail::SplitUrl url_;
    std::string model_;
    std::string token_;
    double temperature_;
};

// Judge backed by any completion provider: renders the judge prompt and
// decodes the Yes/No reply.
class CompletionJudge : public JudgeProvider {
  public:
    explicit CompletionJudge(DistillerProvider& completion) : completion_(completion) {}

    JudgeVerdict judge(const std::string& a, const std::string& b) override {
        return parse_judge_reply(completion_.complete(build_judge_prompt(a, b)));
    }

  private:
    DistillerProvider& completion_;
};

class HttpEmbedder : public EmbedderProvider {
  public:
    HttpEmbedder(std::string endpoint_url, std::string model, std::size_t dimension,
                 std::string token_env_var = "EXLOOP_API_KEY")
        : url_(detail::split_url(endpoint_url)),
          model_(std::move(model)),
          token_(detail::auth_token(token_env_var)),
          dimension_(dimension) {}

    std::vector<double> embed(std::string_view text) override {
        const nlohmann::json payload = {
            {"model", model_},
            {"input", {std::string(text)}},
        };
        httplib::Client client(url_.base);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        const auto res = client.Post(url_.path, headers, payload.dump(), "application/json");
        if (!res) throw ProviderError("embedding request failed: " + url_.base);
        if (res->status != 200) {
            throw ProviderError("embedding endpoint returned HTTP " +
                                std::to_string(res->status));
        }
        const auto body = nlohmann::json::parse(res->body, nullptr, false);
        if (body.is_discarded()) throw ProviderError("embedding endpoint returned invalid JSON");
        std::vector<double> v = parse_embedding_response(body);
        if (v.size() != dimension_) {
            throw DimensionMismatch("embedding endpoint returned dimension " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(dimension_));
        }
        return v;
    }

    std::size_t dimension() const override { return dimension_; }

  private:
    detail::SplitUrl url_;
    std::string model_;
    std::string token_;
    std::size_t dimension_;
};

}  // namespace exloop

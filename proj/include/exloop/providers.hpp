#pragma once

#include <cctype>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "exloop/errors.hpp"

namespace exloop {

// Provider seams. Real deployments back these with an LLM and an embedding
// service; tests and the bundled demo use deterministic stubs.

struct DistillerProvider {
    virtual ~DistillerProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

enum class JudgeVerdict { Yes, No };

struct JudgeProvider {
    virtual ~JudgeProvider() = default;
    virtual JudgeVerdict judge(const std::string& principle_a, const std::string& principle_b) = 0;
};

struct EmbedderProvider {
    virtual ~EmbedderProvider() = default;
    virtual std::vector<double> embed(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
};

struct PolicyProvider {
    virtual ~PolicyProvider() = default;
    // Emits the next tagged agent action given the rollout history so far.
    virtual std::string next_action(const std::string& history_text) = 0;
};

// Case-insensitive yes/no prefix match after trimming; anything else is an
// AmbiguousJudgement (callers may fall back to threshold-only matching).
inline JudgeVerdict parse_judge_reply(std::string_view reply) {
    std::size_t b = 0, e = reply.size();
    while (b < e && std::isspace(static_cast<unsigned char>(reply[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(reply[e - 1]))) --e;
    const std::string_view body = reply.substr(b, e - b);
    auto has_prefix = [&](std::string_view word) {
        if (body.size() < word.size()) return false;
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(body[i])) != word[i]) return false;
        }
        return true;
    };
    if (has_prefix("yes")) return JudgeVerdict::Yes;
    if (has_prefix("no")) return JudgeVerdict::No;
    throw AmbiguousJudgement("judge replied '" + std::string(body.substr(0, 40)) +
                             "', expected Yes or No");
}

class FunctionDistiller : public DistillerProvider {
  public:
    explicit FunctionDistiller(std::function<std::string(const std::string&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const std::string& prompt) override { return fn_(prompt); }

  private:
    std::function<std::string(const std::string&)> fn_;
};

class FunctionJudge : public JudgeProvider {
  public:
    explicit FunctionJudge(std::function<JudgeVerdict(const std::string&, const std::string&)> fn)
        : fn_(std::move(fn)) {}
    JudgeVerdict judge(const std::string& a, const std::string& b) override {
        ++calls;
        return fn_(a, b);
    }
    std::size_t calls = 0;  // instrumentation for tests

  private:
    std::function<JudgeVerdict(const std::string&, const std::string&)> fn_;
};

}  // namespace exloop

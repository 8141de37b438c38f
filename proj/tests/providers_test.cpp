#include "exloop/providers.hpp"

#include <gtest/gtest.h>

#include "exloop/curation.hpp"
#include "exloop/http_providers.hpp"
#include "exloop/prompts.hpp"
#include "exloop/stub_providers.hpp"
#include "golden_rollout.hpp"

using namespace exloop;

TEST(ParseJudgeReply, PrefixMatching) {
    EXPECT_EQ(parse_judge_reply("Yes"), JudgeVerdict::Yes);
    EXPECT_EQ(parse_judge_reply("  yes, they match."), JudgeVerdict::Yes);
    EXPECT_EQ(parse_judge_reply("YES\n"), JudgeVerdict::Yes);
    EXPECT_EQ(parse_judge_reply("No"), JudgeVerdict::No);
    EXPECT_EQ(parse_judge_reply("no."), JudgeVerdict::No);
    EXPECT_THROW(parse_judge_reply("maybe"), AmbiguousJudgement);
    EXPECT_THROW(parse_judge_reply(""), AmbiguousJudgement);
    EXPECT_THROW(parse_judge_reply("I think yes"), AmbiguousJudgement);
}

TEST(JudgePrompt, PlaceholdersFilled) {
    const std::string p = build_judge_prompt("candidate text", "incumbent text");
    EXPECT_NE(p.find("Principle A: \"candidate text\""), std::string::npos);
    EXPECT_NE(p.find("Principle B: \"incumbent text\""), std::string::npos);
    EXPECT_EQ(p.find("{summary}"), std::string::npos);
    EXPECT_EQ(p.find("{existing_principle_description}"), std::string::npos);
}

TEST(SystemPrompt, QuestionSubstituted) {
    const std::string p = system_prompt("who was it?");
    EXPECT_NE(p.find("User: who was it?"), std::string::npos);
    EXPECT_EQ(p.find("{question}"), std::string::npos);
    EXPECT_NE(p.find("<answer> Beijing </answer>"), std::string::npos);
}

TEST(StubDistiller, DeterministicAndParseable) {
    const Trajectory t = parse_trajectory(kGoldenRollout);
    const std::string prompt = build_distill_prompt(t, DistillOutcome::Success);
    StubDistiller distiller;
    const std::string a = distiller.complete(prompt);
    const std::string b = distiller.complete(prompt);
    EXPECT_EQ(a, b);
    const PrincipleDraft d = parse_principle_output(a, DistillOutcome::Success, "t0", "p0");
    EXPECT_EQ(d.kind, PrincipleKind::Guiding);
    EXPECT_FALSE(d.description.empty());
    EXPECT_FALSE(d.triples.empty());
    EXPECT_EQ(d.warnings, 0);
    // success patterns key on the answer
    EXPECT_NE(d.description.find("(pattern: success/kate-warne)"), std::string::npos);
    EXPECT_NE(d.description.find("Kate Warne"), std::string::npos);
}

TEST(StubDistiller, FailureUsesCautionaryPattern) {
    const Trajectory t = make_trajectory({{SegmentKind::Think, "Guessing from vague memory"},
                                          {SegmentKind::SearchExperience, "past expositions"},
                                          {SegmentKind::Answer, "Lyon"}});
    StubDistiller distiller;
    const std::string reply =
        distiller.complete(build_distill_prompt(t, DistillOutcome::Failure));
    const PrincipleDraft d = parse_principle_output(reply, DistillOutcome::Failure);
    EXPECT_EQ(d.kind, PrincipleKind::Cautionary);
    EXPECT_NE(d.description.find("(pattern: failure/guessing-from-vague)"), std::string::npos);
}

TEST(StubDistiller, SurvivesArbitraryPrompts) {
    StubDistiller distiller;
    const std::string reply = distiller.complete("not a distill prompt at all");
    EXPECT_NO_THROW(parse_principle_output(reply, DistillOutcome::Failure));
}

TEST(StubJudge, PatternMarkerRule) {
    StubJudge judge;
    EXPECT_EQ(judge.judge("one phrasing (pattern: success/x)", "other phrasing (pattern: success/x)"),
              JudgeVerdict::Yes);
    EXPECT_EQ(judge.judge("one phrasing (pattern: success/x)", "other phrasing (pattern: success/y)"),
              JudgeVerdict::No);
    EXPECT_EQ(judge.judge("identical no-marker text", "identical no-marker text"),
              JudgeVerdict::Yes);
    EXPECT_EQ(judge.judge("some text", "different text"), JudgeVerdict::No);
}

TEST(CompletionJudge, RoundTripsThroughPromptAndParser) {
    FunctionDistiller completion([](const std::string& prompt) {
        // scripted reply keyed off the rendered judge prompt
        return prompt.find("Principle A: \"same\"") != std::string::npos &&
                       prompt.find("Principle B: \"same\"") != std::string::npos
                   ? "Yes"
                   : "No";
    });
    CompletionJudge judge(completion);
    EXPECT_EQ(judge.judge("same", "same"), JudgeVerdict::Yes);
    EXPECT_EQ(judge.judge("same", "other"), JudgeVerdict::No);
}

TEST(HttpResponseParsers, ChatCompletion) {
    const nlohmann::json body = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "the reply"}}}}}}};
    EXPECT_EQ(parse_chat_completion_response(body), "the reply");
    EXPECT_THROW(parse_chat_completion_response(nlohmann::json::object()), ProviderError);
}

TEST(HttpResponseParsers, Embedding) {
    const nlohmann::json body = {{"data", {{{"embedding", {0.1, 0.2, 0.3}}}}}};
    const auto v = parse_embedding_response(body);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[1], 0.2);
    EXPECT_THROW(parse_embedding_response(nlohmann::json::object()), ProviderError);
}

TEST(HttpProviders, BadEndpointUrlRejected) {
    EXPECT_THROW(HttpChatCompletion("not-a-url", "model"), ConfigError);
    EXPECT_NO_THROW(HttpChatCompletion("http://localhost:1/v1/chat/completions", "model"));
}

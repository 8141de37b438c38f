#include "exloop/reward.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "golden_rollout.hpp"
#include "test_util.hpp"

using namespace exloop;

TEST(NormalizeAnswer, Basics) {
    EXPECT_EQ(normalize_answer("Kate Warne"), "kate warne");
    EXPECT_EQ(normalize_answer("The  Beijing."), "beijing");
    EXPECT_EQ(normalize_answer(""), "");
    EXPECT_EQ(normalize_answer("A An The"), "");
    EXPECT_EQ(normalize_answer("an apple, a day"), "apple day");
    EXPECT_EQ(normalize_answer("don't"), "dont");
    EXPECT_EQ(normalize_answer("  spaced   out  "), "spaced out");
    // articles are whole words only
    EXPECT_EQ(normalize_answer("another theory"), "another theory");
}

TEST(ExactMatch, Basics) {
    EXPECT_EQ(exact_match("Kate Warne", "Kate Warne"), 1);
    EXPECT_EQ(exact_match("kate warne.", "Kate Warne"), 1);
    EXPECT_EQ(exact_match("Beijing", "Shanghai"), 0);
    EXPECT_EQ(exact_match("The Eiffel Tower", "eiffel tower"), 1);
}

TEST(ThinkScore, Table) {
    // hand-written oracle over the full range used anywhere in the suite
    const double expected[] = {0.0, 0.2, 0.36, 0.52, 0.68, 0.84, 1.0,
                               1.0, 1.0, 0.5,  0.5,  0.5,  0.5};
    for (int n = 0; n <= 12; ++n) {
        EXPECT_EQ(think_score(n), expected[n]) << "n=" << n;
    }
}

TEST(ThinkScore, MonotoneThenCapped) {
    for (int n = 0; n < 6; ++n) {
        EXPECT_LE(think_score(n), think_score(n + 1));
    }
    for (int n = 9; n < 40; ++n) {
        EXPECT_EQ(think_score(n), 0.5);
    }
}

namespace {
ActionCounts counts(int n_exp, int n_know) {
    ActionCounts c;
    c.n_exp = n_exp;
    c.n_know = n_know;
    return c;
}
}  // namespace

TEST(SearchScore, Rules) {
    EXPECT_EQ(search_score(counts(0, 0)), 0.0);
    EXPECT_EQ(search_score(counts(0, 1)), 0.2);
    EXPECT_EQ(search_score(counts(1, 0)), 0.2);
    EXPECT_EQ(search_score(counts(1, 1)), 0.6);  // 0.5 diversity + 0.1 bonus
    EXPECT_EQ(search_score(counts(1, 3)), 0.8);  // 0.5 + 0.3
    EXPECT_EQ(search_score(counts(1, 6)), 1.0);  // bonus capped at 0.5
    EXPECT_EQ(search_score(counts(4, 9)), 1.0);
    EXPECT_EQ(search_score(counts(0, 7)), 0.7);  // 0.2 + capped 0.5
}

TEST(SearchScore, BoundedAndTypeMonotone) {
    for (int e = 0; e <= 12; ++e) {
        for (int k = 0; k <= 12; ++k) {
            const double s = search_score(counts(e, k));
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
            if (e == 0) EXPECT_GE(search_score(counts(1, k)), s);
            if (k == 0) EXPECT_GE(search_score(counts(e, 1)), s);
        }
    }
}

TEST(FormatReward, GoldenRollout) {
    const Trajectory t = parse_trajectory(kGoldenRollout);
    EXPECT_NEAR(format_reward(t), 0.82, 1e-12);  // (0.84 + 0.8) / 2
}

TEST(FormatReward, IncompleteScoresZero) {
    const Trajectory t = make_trajectory({{SegmentKind::Think, "only thinking"}});
    EXPECT_EQ(format_reward(t), 0.0);
}

TEST(FormatReward, MaximalCase) {
    std::vector<std::pair<SegmentKind, std::string>> parts;
    for (int i = 0; i < 6; ++i) parts.emplace_back(SegmentKind::Think, "t");
    for (int i = 0; i < 3; ++i) parts.emplace_back(SegmentKind::SearchExperience, "q");
    for (int i = 0; i < 3; ++i) parts.emplace_back(SegmentKind::SearchKnowledge, "q");
    parts.emplace_back(SegmentKind::Answer, "a");
    EXPECT_EQ(format_reward(make_trajectory(parts)), 1.0);
}

TEST(TotalReward, GoldenRollout) {
    const Trajectory t = parse_trajectory(kGoldenRollout);
    const RewardBreakdown b = total_reward(t, kGoldenAnswer);
    EXPECT_EQ(b.r_outcome, 1);
    EXPECT_NEAR(b.r_think, 0.84, 1e-12);
    EXPECT_NEAR(b.r_search, 0.8, 1e-12);
    EXPECT_NEAR(b.r_format, 0.82, 1e-12);
    EXPECT_NEAR(b.r_total, 1.082, 1e-12);
}

TEST(TotalReward, WrongAnswerIncompleteFormat) {
    const Trajectory t = make_trajectory({{SegmentKind::Answer, "Lyon"}});
    const RewardBreakdown b = total_reward(t, "Paris");
    EXPECT_EQ(b.r_outcome, 0);
    EXPECT_EQ(b.r_format, 0.0);
    EXPECT_EQ(b.r_total, 0.0);
}

TEST(TotalReward, CorrectAnswerIncompleteFormat) {
    const Trajectory t = make_trajectory({{SegmentKind::Answer, " Paris "}});
    const RewardBreakdown b = total_reward(t, "Paris");
    EXPECT_EQ(b.r_outcome, 1);
    EXPECT_EQ(b.r_format, 0.0);
    EXPECT_EQ(b.r_total, 1.0);
}

TEST(TotalReward, MissingAnswerIsNotAnError) {
    const Trajectory t = make_trajectory(
        {{SegmentKind::Think, "t"}, {SegmentKind::SearchKnowledge, "q"}});
    const RewardBreakdown b = total_reward(t, "Paris");
    EXPECT_EQ(b.r_outcome, 0);
    EXPECT_EQ(b.r_total, 0.0);
}

TEST(TotalReward, CustomWeights) {
    const Trajectory t = parse_trajectory(kGoldenRollout);
    const RewardBreakdown b = total_reward(t, kGoldenAnswer, {2.0, 0.5});
    EXPECT_NEAR(b.r_total, 2.0 * 1 + 0.5 * 0.82, 1e-12);
}

TEST(TotalReward, StableUnderReparse) {
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 100; ++i) {
        const Trajectory t = parse_trajectory(testutil::random_rollout_text(rng), "p", "gold");
        const RewardBreakdown a = total_reward(t, "gold");
        const Trajectory reparsed = parse_trajectory(serialize_trajectory(t), "p", "gold");
        const RewardBreakdown b = total_reward(reparsed, "gold");
        EXPECT_EQ(a.r_outcome, b.r_outcome);
        EXPECT_EQ(a.r_think, b.r_think);
        EXPECT_EQ(a.r_search, b.r_search);
        EXPECT_EQ(a.r_format, b.r_format);
        EXPECT_EQ(a.r_total, b.r_total);
    }
}

#include "exloop/grpo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace exloop;

TEST(GroupAdvantages, MeanBaselineOnly) {
    const std::vector<double> rewards = {1, 1, 0, 0, 0, 0, 0, 0};
    const auto adv = group_advantages(rewards, /*normalize_std=*/false);
    EXPECT_NEAR(adv[0], 0.75, 1e-12);
    EXPECT_NEAR(adv[1], 0.75, 1e-12);
    for (int i = 2; i < 8; ++i) EXPECT_NEAR(adv[i], -0.25, 1e-12);
}

TEST(GroupAdvantages, StdNormalized) {
    const std::vector<double> rewards = {1, 1, 0, 0, 0, 0, 0, 0};
    const auto adv = group_advantages(rewards, true);
    // mean 0.25, population std sqrt(0.1875)
    EXPECT_NEAR(adv[0], 1.7320508075688772, 1e-12);
    EXPECT_NEAR(adv[2], -0.57735026918962573, 1e-12);
}

TEST(GroupAdvantages, DegenerateGroupIsZero) {
    const std::vector<double> rewards = {0.3, 0.3, 0.3};
    for (const bool normalize : {true, false}) {
        for (const double a : group_advantages(rewards, normalize)) EXPECT_EQ(a, 0.0);
    }
}

TEST(GroupAdvantages, GroupTooSmall) {
    EXPECT_THROW(group_advantages(std::vector<double>{1.0}, true), GroupTooSmall);
    EXPECT_THROW(group_advantages(std::vector<double>{}, true), GroupTooSmall);
}

TEST(GroupAdvantages, ZeroSumProperty) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> rewards(2 + rng() % 15);
        for (double& r : rewards) r = dist(rng);
        for (const bool normalize : {true, false}) {
            const auto adv = group_advantages(rewards, normalize);
            double sum = 0.0;
            for (double a : adv) sum += a;
            EXPECT_LT(std::abs(sum), 1e-9);
        }
    }
}

TEST(GroupAdvantages, RewardScaleInvariantWhenNormalized) {
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    std::vector<double> rewards(8);
    for (double& r : rewards) r = dist(rng);
    const auto base_adv = group_advantages(rewards, true);
    std::vector<double> scaled = rewards;
    for (double& r : scaled) r *= 37.5;
    const auto scaled_adv = group_advantages(scaled, true);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        EXPECT_NEAR(scaled_adv[i], base_adv[i], 1e-9);
    }
}

TEST(ClippedSurrogate, Examples) {
    for (const double a : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
        EXPECT_EQ(clipped_surrogate(1.0, a, 0.2), a);
    }
    EXPECT_NEAR(clipped_surrogate(1.5, 1.0, 0.2), 1.2, 1e-12);
    EXPECT_NEAR(clipped_surrogate(0.5, -1.0, 0.2), -0.8, 1e-12);
}

TEST(ClippedSurrogate, PessimisticBoundProperty) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ratio_dist(0.01, 3.0);
    std::uniform_real_distribution<double> adv_dist(-2.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const double ratio = ratio_dist(rng);
        const double adv = adv_dist(rng);
        EXPECT_LE(clipped_surrogate(ratio, adv, 0.2), ratio * adv + 1e-15);
    }
}

TEST(KlPenalty, Examples) {
    EXPECT_EQ(kl_penalty(0.7, 0.7), 0.0);
    EXPECT_NEAR(kl_penalty(-0.5, -0.4), std::exp(0.1) - 1.1, 1e-12);     // r = 0.1
    EXPECT_NEAR(kl_penalty(-0.4, -0.5), std::exp(-0.1) + 0.1 - 1.0, 1e-12);  // r = -0.1
    EXPECT_NEAR(kl_penalty(-0.5, -0.4), 0.0051709, 1e-7);
    EXPECT_NEAR(kl_penalty(-0.4, -0.5), 0.0048374, 1e-7);
}

TEST(KlPenalty, NonNegativeEverywhere) {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> dist(-4.0, 0.0);
    for (int i = 0; i < 2000; ++i) {
        const double p = dist(rng);
        const double r = dist(rng);
        EXPECT_GE(kl_penalty(p, r), 0.0);
    }
}

namespace {

TrajectoryLogProbs make_traj(std::vector<double> logp, std::vector<double> old_lp,
                             std::vector<double> ref, std::vector<int> mask, double reward) {
    TrajectoryLogProbs t;
    t.policy_logp = std::move(logp);
    t.old_logp = std::move(old_lp);
    t.ref_logp = std::move(ref);
    t.mask = std::move(mask);
    t.reward = reward;
    return t;
}

GroupBatch two_trajectory_batch() {
    GroupBatch batch;
    batch.groups.push_back({
        make_traj({-1.0, -2.0, -0.5}, {-1.0, -2.0, -0.5}, {-1.0, -2.0, -0.5}, {1, 1, 1}, 1.0),
        make_traj({-0.7, -1.1, -0.9}, {-0.7, -1.1, -0.9}, {-0.7, -1.1, -0.9}, {1, 1, 1}, 0.0),
    });
    return batch;
}

}  // namespace

TEST(GrpoObjective, PolicyEqualsOldZeroBeta) {
    GroupBatch batch = two_trajectory_batch();
    batch.beta = 0.0;
    // ratios are all 1, advantages are +1/-1 with equal masked counts, so the
    // token mean of broadcast advantages is exactly 0
    EXPECT_NEAR(grpo_objective(batch), 0.0, 1e-12);
}

TEST(GrpoObjective, EqualRewardsAndRefGiveZeroForAnyBeta) {
    GroupBatch batch = two_trajectory_batch();
    for (auto& t : batch.groups[0]) t.reward = 0.5;
    batch.beta = 7.0;
    EXPECT_EQ(grpo_objective(batch), 0.0);
}

TEST(GrpoObjective, TokenByTokenOracle) {
    // one group, hand-evaluated: trajectory 0 runs at ratio 1.5 with a
    // positive advantage, trajectory 1 at ratio 1.0 with the negative one
    const double lr = std::log(1.5);
    GroupBatch batch;
    batch.beta = 0.0;
    batch.normalize_std = false;
    batch.groups.push_back({
        make_traj({-1.0 + lr, -2.0 + lr}, {-1.0, -2.0}, {-1.0, -2.0}, {1, 1}, 1.0),
        make_traj({-0.5, -0.5}, {-0.5, -0.5}, {-0.5, -0.5}, {1, 1}, 0.0),
    });
    // advantages: +0.5 and -0.5
    // traj 0 tokens: min(1.5*0.5, 1.2*0.5) = 0.6 each
    // traj 1 tokens: -0.5 each
    const double expected = (0.6 + 0.6 - 0.5 - 0.5) / 4.0;
    EXPECT_NEAR(grpo_objective(batch), expected, 1e-12);
}

TEST(GrpoObjective, MaskedTokensAreExactlyIgnored) {
    GroupBatch batch = two_trajectory_batch();
    batch.groups[0][0].mask = {1, 0, 1};
    const double before = grpo_objective(batch);
    batch.groups[0][0].policy_logp[1] += 10.0;
    EXPECT_EQ(grpo_objective(batch), before);
    batch.groups[0][0].policy_logp[1] -= 20.0;
    EXPECT_EQ(grpo_objective(batch), before);
}

TEST(GrpoObjective, PermutationInvariantWithinGroup) {
    GroupBatch batch;
    batch.groups.push_back({
        make_traj({-1.0, -0.2}, {-0.9, -0.3}, {-1.1, -0.2}, {1, 1}, 0.9),
        make_traj({-0.4, -0.6}, {-0.5, -0.5}, {-0.4, -0.7}, {1, 0}, 0.1),
        make_traj({-2.0, -0.1}, {-1.8, -0.2}, {-2.1, -0.1}, {0, 1}, 0.5),
    });
    const double forward = grpo_objective(batch);
    std::swap(batch.groups[0][0], batch.groups[0][2]);
    EXPECT_NEAR(grpo_objective(batch), forward, 1e-15);
}

TEST(GrpoObjective, Validation) {
    GroupBatch batch = two_trajectory_batch();
    batch.groups[0][0].mask = {0, 0, 0};
    EXPECT_THROW(grpo_objective(batch), EmptyMask);

    batch = two_trajectory_batch();
    batch.groups[0][0].old_logp.pop_back();
    EXPECT_THROW(grpo_objective(batch), LengthMismatch);

    batch = two_trajectory_batch();
    batch.groups.push_back({batch.groups[0][0]});  // group of 1
    EXPECT_THROW(grpo_objective(batch), LengthMismatch);

    batch = two_trajectory_batch();
    batch.epsilon = 0.0;
    EXPECT_THROW(grpo_objective(batch), Error);
}

TEST(GrpoObjective, TokenMeanModes) {
    // unequal masked counts make the two weightings differ
    GroupBatch batch;
    batch.beta = 0.0;
    batch.normalize_std = false;
    batch.groups.push_back({
        make_traj({-1.0, -1.0, -1.0}, {-1.0, -1.0, -1.0}, {-1.0, -1.0, -1.0}, {1, 1, 1}, 1.0),
        make_traj({-1.0, -1.0, -1.0}, {-1.0, -1.0, -1.0}, {-1.0, -1.0, -1.0}, {1, 0, 0}, 0.0),
    });
    // advantages +0.5 / -0.5; global mean = (3*0.5 - 0.5)/4 = 0.25
    EXPECT_NEAR(grpo_objective(batch), 0.25, 1e-12);
    batch.token_mean = TokenMean::PerTrajectory;
    // per-trajectory means: +0.5 and -0.5, averaged = 0
    EXPECT_NEAR(grpo_objective(batch), 0.0, 1e-12);
}

TEST(ToyPolicyGradcheck, MatchesFiniteDifferences) {
    EXPECT_LT(toy_policy_gradcheck(8, 4, 4, /*seed=*/0), 1e-4);
}

TEST(ToyPolicyGradcheck, PolicyAtOldAndRefIsExact) {
    toy::ToyProblem p = toy::make_toy_problem(8, 4, 4, 1);
    p.theta = p.old_logits;
    p.ref_logits = p.old_logits;
    p.beta = 0.0;
    const auto analytic = toy::analytic_gradient(p);
    for (int v = 0; v < p.vocab; ++v) {
        std::vector<double> theta = p.theta;
        const double h = 1e-5;
        theta[v] += h;
        const double up = toy::objective(p, theta);
        theta[v] -= 2 * h;
        const double down = toy::objective(p, theta);
        const double fd = (up - down) / (2 * h);
        EXPECT_NEAR(analytic[v], fd, 1e-6);
    }
}

TEST(ToyPolicyGradcheck, ZeroAdvantageZeroSurrogateGradient) {
    toy::ToyProblem p = toy::make_toy_problem(8, 4, 4, 2);
    for (auto& group : p.rewards) {
        for (double& r : group) r = 0.7;  // degenerate groups, advantages all 0
    }
    p.beta = 0.0;
    for (const double g : toy::analytic_gradient(p)) EXPECT_EQ(g, 0.0);
}

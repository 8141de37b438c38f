#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "exloop/errors.hpp"

namespace exloop {

struct TrajectoryLogProbs {
    std::vector<double> policy_logp;
    std::vector<double> old_logp;
    std::vector<double> ref_logp;
    std::vector<int> mask;  // 1 = token contributes, 0 = observation token
    double reward = 0.0;
};

enum class TokenMean { Global, PerTrajectory };

struct GroupBatch {
    std::vector<std::vector<TrajectoryLogProbs>> groups;
    double epsilon = 0.2;
    double beta = 0.001;
    bool normalize_std = true;
    TokenMean token_mean = TokenMean::Global;
};

// Group-relative advantages: reward minus the group mean, optionally divided
// by the population standard deviation. A (near-)constant group yields all
// zeros rather than amplified noise.
inline std::vector<double> group_advantages(std::span<const double> rewards,
                                            bool normalize_std = true) {
    const std::size_t n = rewards.size();
    if (n < 2) throw GroupTooSmall("group_advantages: need at least 2 rewards, got " +
                                   std::to_string(n));
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(n);
    std::vector<double> adv(n);
    for (std::size_t i = 0; i < n; ++i) adv[i] = rewards[i] - mean;
    if (normalize_std) {
        double var = 0.0;
        for (double a : adv) var += a * a;
        var /= static_cast<double>(n);
        const double std_dev = std::sqrt(var);
        if (std_dev < 1e-8) {
            std::fill(adv.begin(), adv.end(), 0.0);
        } else {
            for (double& a : adv) a /= std_dev;
        }
    }
    return adv;
}

inline double clipped_surrogate(double ratio, double advantage, double epsilon) {
    const double clipped = std::min(std::max(ratio, 1.0 - epsilon), 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

// Non-negative k3 estimator of KL(policy || ref) at one token:
// exp(r) - r - 1 with r = ref_logp - policy_logp.
inline double kl_penalty(double policy_logp, double ref_logp) {
    const double r = ref_logp - policy_logp;
    return std::exp(r) - r - 1.0;
}

namespace detail {

inline void validate_batch(const GroupBatch& batch) {
    if (batch.epsilon <= 0.0) throw Error("grpo: epsilon must be > 0");
    if (batch.beta < 0.0) throw Error("grpo: beta must be >= 0");
    std::size_t group_size = 0;
    for (const auto& group : batch.groups) {
        if (group_size == 0) group_size = group.size();
        if (group.size() != group_size) {
            throw LengthMismatch("grpo: groups must share one size G");
        }
        if (group.size() < 2) throw GroupTooSmall("grpo: groups need G >= 2");
        for (const TrajectoryLogProbs& t : group) {
            const std::size_t len = t.policy_logp.size();
            if (t.old_logp.size() != len || t.ref_logp.size() != len || t.mask.size() != len) {
                throw LengthMismatch("grpo: per-token sequences must share one length");
            }
            bool any = false;
            for (int m : t.mask) any = any || (m != 0);
            if (!any) throw EmptyMask("grpo: trajectory with all-zero mask");
        }
    }
}

}  // namespace detail

// Clipped importance-sampling objective with the trajectory advantage
// broadcast to its masked tokens and a per-token k3 KL penalty. Tokens with
// mask 0 are skipped entirely, so perturbing them cannot change the result.
inline double grpo_objective(const GroupBatch& batch) {
    detail::validate_batch(batch);
    double global_sum = 0.0;
    std::size_t global_tokens = 0;
    double traj_mean_sum = 0.0;
    std::size_t traj_count = 0;
    for (const auto& group : batch.groups) {
        std::vector<double> rewards;
        rewards.reserve(group.size());
        for (const TrajectoryLogProbs& t : group) rewards.push_back(t.reward);
        const std::vector<double> adv = group_advantages(rewards, batch.normalize_std);
        for (std::size_t i = 0; i < group.size(); ++i) {
            const TrajectoryLogProbs& t = group[i];
            double traj_sum = 0.0;
            std::size_t traj_tokens = 0;
            for (std::size_t k = 0; k < t.policy_logp.size(); ++k) {
                if (t.mask[k] == 0) continue;
                const double ratio = std::exp(t.policy_logp[k] - t.old_logp[k]);
                double term = clipped_surrogate(ratio, adv[i], batch.epsilon);
                term -= batch.beta * kl_penalty(t.policy_logp[k], t.ref_logp[k]);
                traj_sum += term;
                ++traj_tokens;
            }
            global_sum += traj_sum;
            global_tokens += traj_tokens;
            traj_mean_sum += traj_sum / static_cast<double>(traj_tokens);
            ++traj_count;
        }
    }
    if (batch.token_mean == TokenMean::PerTrajectory) {
        return traj_mean_sum / static_cast<double>(traj_count);
    }
    return global_sum / static_cast<double>(global_tokens);
}

// -- toy tabular policy for end-to-end gradient verification -----------------

namespace toy {

inline std::vector<double> log_softmax(std::span<const double> logits) {
    double mx = logits[0];
    for (double x : logits) mx = std::max(mx, x);
    double z = 0.0;
    for (double x : logits) z += std::exp(x - mx);
    const double log_z = mx + std::log(z);
    std::vector<double> out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
    return out;
}

// Fixed rollout data: actions sampled from the old policy, random rewards
// and masks. The policy under test shares one logit vector across positions.
struct ToyProblem {
    int vocab = 8;
    std::vector<double> theta;       // policy logits (the variable)
    std::vector<double> old_logits;  // behaviour policy
    std::vector<double> ref_logits;  // reference policy
    std::vector<std::vector<std::vector<int>>> actions;  // [group][traj][t]
    std::vector<std::vector<double>> rewards;            // [group][traj]
    std::vector<std::vector<std::vector<int>>> masks;    // [group][traj][t]
    double epsilon = 0.2;
    double beta = 0.001;
};

inline ToyProblem make_toy_problem(int vocab, int seq_len, int group_size, std::uint64_t seed,
                                   double epsilon = 0.2, double beta = 0.001) {
    ToyProblem p;
    p.vocab = vocab;
    p.epsilon = epsilon;
    p.beta = beta;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    p.old_logits.resize(vocab);
    p.theta.resize(vocab);
    p.ref_logits.resize(vocab);
    for (int v = 0; v < vocab; ++v) p.old_logits[v] = gauss(rng);
    for (int v = 0; v < vocab; ++v) p.theta[v] = p.old_logits[v] + 0.3 * gauss(rng);
    for (int v = 0; v < vocab; ++v) p.ref_logits[v] = p.old_logits[v] + 0.3 * gauss(rng);

    const std::vector<double> old_lp = log_softmax(p.old_logits);
    std::vector<double> cdf(vocab);
    {
        double acc = 0.0;
        for (int v = 0; v < vocab; ++v) {
            acc += std::exp(old_lp[v]);
            cdf[v] = acc;
        }
        cdf[vocab - 1] = 1.0;
    }
    const int n_groups = 2;
    p.actions.resize(n_groups);
    p.rewards.resize(n_groups);
    p.masks.resize(n_groups);
    for (int g = 0; g < n_groups; ++g) {
        p.actions[g].resize(group_size);
        p.rewards[g].resize(group_size);
        p.masks[g].resize(group_size);
        for (int i = 0; i < group_size; ++i) {
            p.actions[g][i].resize(seq_len);
            p.masks[g][i].resize(seq_len);
            for (int t = 0; t < seq_len; ++t) {
                const double u = unit(rng);
                int a = 0;
                while (a + 1 < vocab && u > cdf[a]) ++a;
                p.actions[g][i][t] = a;
                p.masks[g][i][t] = unit(rng) < 0.75 ? 1 : 0;
            }
            p.masks[g][i][0] = 1;  // every trajectory keeps at least one token
            p.rewards[g][i] = unit(rng);
        }
    }
    return p;
}

inline GroupBatch make_batch(const ToyProblem& p, std::span<const double> theta) {
    const std::vector<double> lp_theta = log_softmax(theta);
    const std::vector<double> lp_old = log_softmax(p.old_logits);
    const std::vector<double> lp_ref = log_softmax(p.ref_logits);
    GroupBatch batch;
    batch.epsilon = p.epsilon;
    batch.beta = p.beta;
    for (std::size_t g = 0; g < p.actions.size(); ++g) {
        std::vector<TrajectoryLogProbs> group;
        for (std::size_t i = 0; i < p.actions[g].size(); ++i) {
            TrajectoryLogProbs t;
            t.reward = p.rewards[g][i];
            for (std::size_t k = 0; k < p.actions[g][i].size(); ++k) {
                const int a = p.actions[g][i][k];
                t.policy_logp.push_back(lp_theta[a]);
                t.old_logp.push_back(lp_old[a]);
                t.ref_logp.push_back(lp_ref[a]);
                t.mask.push_back(p.masks[g][i][k]);
            }
            group.push_back(std::move(t));
        }
        batch.groups.push_back(std::move(group));
    }
    return batch;
}

inline double objective(const ToyProblem& p, std::span<const double> theta) {
    return grpo_objective(make_batch(p, theta));
}

// Analytic d(objective)/d(theta). Uses d log pi(a)/d theta_v = [v == a] - pi(v)
// and the usual one-sided clip gating.
inline std::vector<double> analytic_gradient(const ToyProblem& p) {
    const std::vector<double> lp_theta = log_softmax(p.theta);
    const std::vector<double> lp_old = log_softmax(p.old_logits);
    const std::vector<double> lp_ref = log_softmax(p.ref_logits);
    std::vector<double> pi(p.vocab);
    for (int v = 0; v < p.vocab; ++v) pi[v] = std::exp(lp_theta[v]);

    std::size_t total_tokens = 0;
    for (std::size_t g = 0; g < p.actions.size(); ++g) {
        for (const auto& traj : p.masks[g]) {
            for (int m : traj) total_tokens += (m != 0);
        }
    }

    std::vector<double> grad(p.vocab, 0.0);
    for (std::size_t g = 0; g < p.actions.size(); ++g) {
        const std::vector<double> adv = group_advantages(p.rewards[g], true);
        for (std::size_t i = 0; i < p.actions[g].size(); ++i) {
            for (std::size_t k = 0; k < p.actions[g][i].size(); ++k) {
                if (p.masks[g][i][k] == 0) continue;
                const int a = p.actions[g][i][k];
                const double ratio = std::exp(lp_theta[a] - lp_old[a]);
                const double A = adv[i];
                const bool unclipped_active =
                    A >= 0.0 ? ratio <= 1.0 + p.epsilon : ratio >= 1.0 - p.epsilon;
                const double surr_coeff = unclipped_active ? ratio * A : 0.0;
                const double r = lp_ref[a] - lp_theta[a];
                const double kl_coeff = p.beta * (std::exp(r) - 1.0);
                // d term / d theta_v = (surr_coeff + kl_coeff) * (1[v==a] - pi_v)
                const double coeff = surr_coeff + kl_coeff;
                for (int v = 0; v < p.vocab; ++v) {
                    grad[v] += coeff * ((v == a ? 1.0 : 0.0) - pi[v]);
                }
            }
        }
    }
    for (double& g : grad) g /= static_cast<double>(total_tokens);
    return grad;
}

}  // namespace toy

// Central finite differences against the analytic gradient of the objective
// over a small tabular softmax policy; returns the worst relative error.
inline double toy_policy_gradcheck(int vocab, int seq_len, int group_size, std::uint64_t seed,
                                   double epsilon = 0.2, double beta = 0.001,
                                   double step = 1e-5) {
    toy::ToyProblem p = toy::make_toy_problem(vocab, seq_len, group_size, seed, epsilon, beta);
    const std::vector<double> analytic = toy::analytic_gradient(p);
    double worst = 0.0;
    std::vector<double> theta = p.theta;
    for (int v = 0; v < vocab; ++v) {
        const double saved = theta[v];
        theta[v] = saved + step;
        const double up = toy::objective(p, theta);
        theta[v] = saved - step;
        const double down = toy::objective(p, theta);
        theta[v] = saved;
        const double fd = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(analytic[v]), 1e-6});
        worst = std::max(worst, std::abs(fd - analytic[v]) / denom);
    }
    return worst;
}

}  // namespace exloop

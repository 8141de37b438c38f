#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

#include "exloop/trajectory.hpp"

namespace exloop {

inline std::string trim_copy(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// SQuAD-style normalization: lowercase, strip ASCII punctuation, drop the
// articles a/an/the, collapse whitespace.
inline std::string normalize_answer(std::string_view s) {
    std::string depunct;
    depunct.reserve(s.size());
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::ispunct(uc)) continue;
        depunct.push_back(static_cast<char>(std::tolower(uc)));
    }
    std::string out;
    std::size_t i = 0;
    while (i < depunct.size()) {
        while (i < depunct.size() && std::isspace(static_cast<unsigned char>(depunct[i]))) ++i;
        std::size_t j = i;
        while (j < depunct.size() && !std::isspace(static_cast<unsigned char>(depunct[j]))) ++j;
        if (j > i) {
            const std::string_view word(depunct.data() + i, j - i);
            if (word != "a" && word != "an" && word != "the") {
                if (!out.empty()) out.push_back(' ');
                out.append(word);
            }
        }
        i = j;
    }
    return out;
}

inline int exact_match(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

// Discrete think-count score: 0.2 at one think, stepping to 1.0 at six,
// held at 1.0 through eight, capped at 0.5 beyond that.
inline double think_score(int n_think) {
    static constexpr double kTable[7] = {0.0, 0.2, 0.36, 0.52, 0.68, 0.84, 1.0};
    if (n_think <= 0) return 0.0;
    if (n_think <= 6) return kTable[n_think];
    if (n_think <= 8) return 1.0;
    return 0.5;
}

// Diversity (0.5 both search types, 0.2 one type) plus a 0.1 bonus per
// search beyond the first, bonus capped at 0.5. Computed in integer tenths
// so results are exact table values.
inline double search_score(const ActionCounts& counts) {
    const int n_searches = counts.n_exp + counts.n_know;
    int tenths = 0;
    if (counts.n_exp >= 1 && counts.n_know >= 1) {
        tenths = 5;
    } else if (n_searches >= 1) {
        tenths = 2;
    }
    if (n_searches >= 1) tenths += std::min(n_searches - 1, 5);
    return tenths / 10.0;
}

inline double format_reward(const Trajectory& trajectory) {
    if (!is_complete(trajectory)) return 0.0;
    const ActionCounts c = action_counts(trajectory);
    return (think_score(c.n_think) + search_score(c)) / 2.0;
}

struct RewardWeights {
    double outcome = 1.0;
    double format = 0.1;
};

struct RewardBreakdown {
    int r_outcome = 0;        // exact match on the extracted answer
    double r_think = 0.0;     // component scores are reported even when the
    double r_search = 0.0;    // completeness gate zeroes r_format
    double r_format = 0.0;
    double r_total = 0.0;
    RewardWeights weights;
};

// A missing <answer> is not an error; it simply scores r_outcome = 0.
inline RewardBreakdown total_reward(const Trajectory& trajectory, std::string_view gold,
                                    RewardWeights weights = {}) {
    RewardBreakdown b;
    b.weights = weights;
    const ActionCounts c = action_counts(trajectory);
    b.r_think = think_score(c.n_think);
    b.r_search = search_score(c);
    b.r_format = is_complete(trajectory) ? (b.r_think + b.r_search) / 2.0 : 0.0;
    if (const auto ans = answer_text(trajectory)) {
        b.r_outcome = exact_match(trim_copy(*ans), gold);
    }
    b.r_total = weights.outcome * b.r_outcome + weights.format * b.r_format;
    return b;
}

}  // namespace exloop

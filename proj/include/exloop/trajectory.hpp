#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exloop/errors.hpp"

namespace exloop {

// Tag vocabulary of the interaction grammar. Agent actions are authored by
// the policy, observations are injected by the environment. Raw covers
// untagged interstitial text (newlines between turns and the like), kept so
// that serialize(parse(text)) == text byte-exactly.
enum class SegmentKind {
    Think,
    SearchExperience,
    SearchKnowledge,
    Answer,
    ExperienceObs,
    InformationObs,
    Raw,
};

enum class Origin { Agent, Environment };

constexpr bool is_agent_action(SegmentKind k) {
    return k == SegmentKind::Think || k == SegmentKind::SearchExperience ||
           k == SegmentKind::SearchKnowledge || k == SegmentKind::Answer;
}

constexpr Origin origin_of(SegmentKind k) {
    // Raw interstitial text is not an agent action; it rides with the
    // environment side and is never counted.
    return is_agent_action(k) ? Origin::Agent : Origin::Environment;
}

constexpr std::string_view tag_name(SegmentKind k) {
    switch (k) {
        case SegmentKind::Think: return "think";
        case SegmentKind::SearchExperience: return "search_experience";
        case SegmentKind::SearchKnowledge: return "search_knowledge";
        case SegmentKind::Answer: return "answer";
        case SegmentKind::ExperienceObs: return "experience";
        case SegmentKind::InformationObs: return "information";
        case SegmentKind::Raw: return "";
    }
    return "";
}

struct Segment {
    SegmentKind kind;
    std::string content;  // text between the delimiters; raw text for Raw
    Origin origin;
    std::size_t begin = 0;  // span into the source text, delimiters included
    std::size_t end = 0;
};

struct Trajectory {
    std::vector<Segment> segments;
    std::string source_text;
    std::string problem_id;
    std::optional<std::string> gold_answer;
};

struct ActionCounts {
    int n_think = 0;
    int n_exp = 0;
    int n_know = 0;
    bool has_answer = false;
};

namespace detail {

inline constexpr std::array<SegmentKind, 6> kTaggedKinds = {
    SegmentKind::Think,         SegmentKind::SearchExperience,
    SegmentKind::SearchKnowledge, SegmentKind::Answer,
    SegmentKind::ExperienceObs, SegmentKind::InformationObs,
};

inline std::string open_tag(SegmentKind k) {
    return "<" + std::string(tag_name(k)) + ">";
}

inline std::string close_tag(SegmentKind k) {
    return "</" + std::string(tag_name(k)) + ">";
}

struct TagToken {
    SegmentKind kind;
    bool closing;
    std::size_t pos;
    std::size_t len;
};

// Earliest occurrence of any vocabulary tag (open or close) at or after
// `from`. Tag matching is exact and case-sensitive; no attribute syntax.
inline std::optional<TagToken> find_next_tag(std::string_view text, std::size_t from) {
    std::optional<TagToken> best;
    for (SegmentKind k : kTaggedKinds) {
        for (bool closing : {false, true}) {
            const std::string token = closing ? close_tag(k) : open_tag(k);
            const std::size_t pos = text.find(token, from);
            if (pos == std::string_view::npos) continue;
            if (!best || pos < best->pos) {
                best = TagToken{k, closing, pos, token.size()};
            }
        }
    }
    return best;
}

}  // namespace detail

inline Trajectory parse_trajectory(std::string_view text, std::string problem_id = "",
                                   std::optional<std::string> gold_answer = std::nullopt) {
    Trajectory out;
    out.source_text = std::string(text);
    out.problem_id = std::move(problem_id);
    out.gold_answer = std::move(gold_answer);

    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto tok = detail::find_next_tag(text, pos);
        if (!tok) {
            out.segments.push_back({SegmentKind::Raw, std::string(text.substr(pos)),
                                    Origin::Environment, pos, text.size()});
            break;
        }
        if (tok->pos > pos) {
            out.segments.push_back({SegmentKind::Raw,
                                    std::string(text.substr(pos, tok->pos - pos)),
                                    Origin::Environment, pos, tok->pos});
        }
        if (tok->closing) {
            throw MalformedTag("stray closing tag " + detail::close_tag(tok->kind), tok->pos);
        }
        const std::size_t body_start = tok->pos + tok->len;
        const auto inner = detail::find_next_tag(text, body_start);
        if (!inner) {
            throw MalformedTag("unclosed tag " + detail::open_tag(tok->kind), tok->pos);
        }
        if (!inner->closing) {
            throw NestedTag(detail::open_tag(inner->kind) + " opened inside " +
                                detail::open_tag(tok->kind),
                            inner->pos);
        }
        if (inner->kind != tok->kind) {
            throw MalformedTag("mismatched closing tag " + detail::close_tag(inner->kind) +
                                   " inside " + detail::open_tag(tok->kind),
                               inner->pos);
        }
        out.segments.push_back({tok->kind,
                                std::string(text.substr(body_start, inner->pos - body_start)),
                                origin_of(tok->kind), tok->pos, inner->pos + inner->len});
        pos = inner->pos + inner->len;
    }

    // One extraction point for the reward: at most one <answer>, and nothing
    // the agent says may follow it.
    bool answered = false;
    for (const Segment& seg : out.segments) {
        if (seg.kind == SegmentKind::Answer) {
            if (answered) throw MalformedTag("multiple <answer> segments", seg.begin);
            answered = true;
        } else if (answered && seg.origin == Origin::Agent) {
            throw MalformedTag("agent action after <answer>", seg.begin);
        }
    }
    return out;
}

inline std::string serialize_trajectory(const Trajectory& trajectory) {
    std::string out;
    for (const Segment& seg : trajectory.segments) {
        if (seg.kind == SegmentKind::Raw) {
            out += seg.content;
        } else {
            out += detail::open_tag(seg.kind);
            out += seg.content;
            out += detail::close_tag(seg.kind);
        }
    }
    return out;
}

// Builds a trajectory from (kind, content) pairs with canonical spans; the
// source text is the canonical serialization.
inline Trajectory make_trajectory(const std::vector<std::pair<SegmentKind, std::string>>& parts,
                                  std::string problem_id = "",
                                  std::optional<std::string> gold_answer = std::nullopt) {
    Trajectory out;
    out.problem_id = std::move(problem_id);
    out.gold_answer = std::move(gold_answer);
    std::size_t pos = 0;
    for (const auto& [kind, content] : parts) {
        std::size_t len = content.size();
        if (kind != SegmentKind::Raw) {
            len += detail::open_tag(kind).size() + detail::close_tag(kind).size();
        }
        out.segments.push_back({kind, content, origin_of(kind), pos, pos + len});
        pos += len;
    }
    out.source_text = serialize_trajectory(out);
    return out;
}

inline ActionCounts action_counts(const Trajectory& trajectory) {
    ActionCounts c;
    for (const Segment& seg : trajectory.segments) {
        switch (seg.kind) {
            case SegmentKind::Think: ++c.n_think; break;
            case SegmentKind::SearchExperience: ++c.n_exp; break;
            case SegmentKind::SearchKnowledge: ++c.n_know; break;
            case SegmentKind::Answer: c.has_answer = true; break;
            default: break;  // Raw and observations are never counted
        }
    }
    return c;
}

// Structurally complete: at least one think, at least one search of either
// kind, and a final answer.
inline bool is_complete(const Trajectory& trajectory) {
    const ActionCounts c = action_counts(trajectory);
    return c.n_think >= 1 && (c.n_exp + c.n_know) >= 1 && c.has_answer;
}

inline std::optional<std::string> answer_text(const Trajectory& trajectory) {
    for (const Segment& seg : trajectory.segments) {
        if (seg.kind == SegmentKind::Answer) return seg.content;
    }
    return std::nullopt;
}

struct MaskSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    int weight = 1;  // 0 = excluded from the policy update
};

// Character-span loss mask: observation segments (delimiters included) carry
// weight 0, everything else weight 1. Adjacent equal-weight spans are merged
// so the result partitions [0, len) with no zero-length runs. With
// exp_absorb, retrieved <experience> spans are unmasked (weight 1) while
// <information> stays masked.
inline std::vector<MaskSpan> loss_mask(const Trajectory& trajectory, bool exp_absorb = false) {
    std::vector<MaskSpan> out;
    for (const Segment& seg : trajectory.segments) {
        int weight = 1;
        if (seg.kind == SegmentKind::InformationObs) weight = 0;
        if (seg.kind == SegmentKind::ExperienceObs) weight = exp_absorb ? 1 : 0;
        if (seg.begin == seg.end) continue;
        if (!out.empty() && out.back().weight == weight && out.back().end == seg.begin) {
            out.back().end = seg.end;
        } else {
            out.push_back({seg.begin, seg.end, weight});
        }
    }
    return out;
}

}  // namespace exloop

#pragma once

#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exloop/experience_base.hpp"
#include "exloop/prompts.hpp"
#include "exloop/providers.hpp"
#include "exloop/retrieval.hpp"

namespace exloop {

struct PrincipleDraft {
    PrincipleKind kind = PrincipleKind::Guiding;
    std::string description;
    std::vector<Triple> triples;
    std::string source_trajectory;
    std::string problem_id;
    int warnings = 0;  // skipped unparseable triple lines
};

namespace detail {

// A triple line looks like "(subject, predicate, object)" with an optional
// trailing comma. Lines that do not fit are counted, not fatal.
inline bool parse_triple_line(std::string_view line, Triple& out) {
    std::string s = trim_copy(line);
    if (!s.empty() && s.back() == ',') s.pop_back();
    s = trim_copy(s);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
    const std::string inner = s.substr(1, s.size() - 2);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (parts.size() < 2) {
        const std::size_t comma = inner.find(',', start);
        if (comma == std::string::npos) break;
        parts.push_back(trim_copy(inner.substr(start, comma - start)));
        start = comma + 1;
    }
    parts.push_back(trim_copy(inner.substr(start)));
    if (parts.size() != 3) return false;
    if (parts[0].empty() || parts[1].empty() || parts[2].empty()) return false;
    out = {parts[0], parts[1], parts[2]};
    return true;
}

inline void parse_triples_section(std::string_view section, std::vector<Triple>& triples,
                                  int& warnings) {
    // A well-behaved distiller may emit a real JSON array of [s,p,o] arrays.
    const std::string text = trim_copy(section);
    const auto parsed = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_array()) {
        for (const auto& item : parsed) {
            if (item.is_array() && item.size() == 3 && item[0].is_string() &&
                item[1].is_string() && item[2].is_string()) {
                Triple t{item[0].get<std::string>(), item[1].get<std::string>(),
                         item[2].get<std::string>()};
                if (!trim_copy(t.subject).empty() && !trim_copy(t.predicate).empty() &&
                    !trim_copy(t.object).empty()) {
                    triples.push_back(std::move(t));
                    continue;
                }
            }
            ++warnings;
        }
        return;
    }
    // Otherwise: tuple lines, possibly wrapped in loose brackets.
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = trim_copy(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty() || line == "[" || line == "]" || line == "],") continue;
        Triple t;
        if (parse_triple_line(line, t)) {
            triples.push_back(std::move(t));
        } else {
            ++warnings;
        }
        if (eol == text.size()) break;
    }
}

}  // namespace detail

// Splits the distiller reply on the two separator markers. The description
// is mandatory; triples are parsed leniently and may end up empty.
inline PrincipleDraft parse_principle_output(std::string_view text, DistillOutcome outcome,
                                             std::string source_trajectory = "",
                                             std::string problem_id = "") {
    const std::size_t desc_pos = text.find(kDescriptionSeparator);
    if (desc_pos == std::string_view::npos) {
        throw MissingSeparator("distiller output lacks " + std::string(kDescriptionSeparator));
    }
    const std::size_t desc_start = desc_pos + kDescriptionSeparator.size();
    const std::size_t struct_pos = text.find(kStructuredSeparator, desc_start);
    if (struct_pos == std::string_view::npos) {
        throw MissingSeparator("distiller output lacks " + std::string(kStructuredSeparator));
    }
    PrincipleDraft draft;
    draft.kind =
        outcome == DistillOutcome::Success ? PrincipleKind::Guiding : PrincipleKind::Cautionary;
    draft.description = trim_copy(text.substr(desc_start, struct_pos - desc_start));
    if (draft.description.empty()) {
        throw EmptyDescription("distiller output has an empty description part");
    }
    detail::parse_triples_section(text.substr(struct_pos + kStructuredSeparator.size()),
                                  draft.triples, draft.warnings);
    draft.source_trajectory = std::move(source_trajectory);
    draft.problem_id = std::move(problem_id);
    return draft;
}

namespace detail {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);  // keep the smallest index as the root
        parent[b] = a;
    }
};

}  // namespace detail

// Within-problem semantic dedup: pairwise equivalence closes transitively
// (union-find) and the first draft of each cluster survives, in input order.
// Byte-identical descriptions short-circuit without consulting the judge.
// Drafts from different problems are never compared.
inline std::vector<PrincipleDraft> dedup_batch(const std::vector<PrincipleDraft>& drafts,
                                               JudgeProvider& judge) {
    detail::UnionFind uf(drafts.size());
    std::vector<std::vector<std::size_t>> groups;
    {
        std::vector<std::string> seen;
        for (std::size_t i = 0; i < drafts.size(); ++i) {
            std::size_t g = 0;
            for (; g < seen.size(); ++g) {
                if (seen[g] == drafts[i].problem_id) break;
            }
            if (g == seen.size()) {
                seen.push_back(drafts[i].problem_id);
                groups.emplace_back();
            }
            groups[g].push_back(i);
        }
    }
    for (const auto& group : groups) {
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t b = a + 1; b < group.size(); ++b) {
                const std::size_t i = group[a], j = group[b];
                if (uf.find(i) == uf.find(j)) continue;
                if (drafts[i].description == drafts[j].description) {
                    uf.unite(i, j);
                } else if (judge.judge(drafts[i].description, drafts[j].description) ==
                           JudgeVerdict::Yes) {
                    uf.unite(i, j);
                }
            }
        }
    }
    std::vector<PrincipleDraft> out;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        if (uf.find(i) == i) out.push_back(drafts[i]);
    }
    return out;
}

enum class MatchMode { TwoStage, ThresholdOnly };

enum class IntegrationKind { Created, Merged };

struct IntegrationResult {
    IntegrationKind kind = IntegrationKind::Created;
    std::uint64_t id = 0;
    double best_similarity = -1.0;  // -1 when the base was empty
};

// Merge-or-create: a candidate below the similarity threshold is added as a
// new principle; above it, threshold-only mode merges into the argmax while
// two-stage mode lets the judge arbitrate. Merging keeps the incumbent's
// description, triples and embedding and only links the source trajectory.
// The base is untouched if the embedder or judge throws.
inline IntegrationResult integrate_candidate(ExperienceBase& base, const PrincipleDraft& draft,
                                             EmbedderProvider& embedder, JudgeProvider* judge,
                                             MatchMode mode = MatchMode::TwoStage) {
    const std::vector<double> embedding = embedder.embed(draft.description);
    if (embedding.size() != base.dimension) {
        throw DimensionMismatch("integrate_candidate: embedder dimension " +
                                std::to_string(embedding.size()) + " vs base " +
                                std::to_string(base.dimension));
    }

    const Principle* best = nullptr;
    double best_sim = -1.0;
    for (const auto& [id, p] : base.principles) {
        const double sim = cosine_similarity(embedding, p.embedding);
        if (best == nullptr || sim > best_sim) {
            best = &p;
            best_sim = sim;
        }
    }

    bool merge = false;
    if (best != nullptr && best_sim >= base.thresholds.sim) {
        if (mode == MatchMode::ThresholdOnly) {
            merge = true;
        } else {
            if (judge == nullptr) {
                throw Error("integrate_candidate: two-stage matching needs a judge");
            }
            merge = judge->judge(draft.description, best->description) == JudgeVerdict::Yes;
        }
    }

    if (merge) {
        merge_trajectory(base, best->id, draft.source_trajectory);
        return {IntegrationKind::Merged, best->id, best_sim};
    }
    PrincipleSeed seed;
    seed.kind = draft.kind;
    seed.description = draft.description;
    seed.triples = draft.triples;
    seed.embedding = embedding;
    seed.source_trajectories = {draft.source_trajectory};
    const std::uint64_t id = add_principle(base, std::move(seed));
    return {IntegrationKind::Created, id, best_sim};
}

// -- draft record files (CLI interchange) -----------------------------------

inline nlohmann::json draft_to_json(const PrincipleDraft& d) {
    nlohmann::json triples = nlohmann::json::array();
    for (const Triple& t : d.triples) triples.push_back({t.subject, t.predicate, t.object});
    return {
        {"kind", std::string(kind_name(d.kind))},
        {"description", d.description},
        {"triples", triples},
        {"source_trajectory", d.source_trajectory},
        {"problem_id", d.problem_id},
        {"warnings", d.warnings},
    };
}

inline PrincipleDraft draft_from_json(const nlohmann::json& j, std::size_t line_no) {
    try {
        PrincipleDraft d;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "guiding") {
            d.kind = PrincipleKind::Guiding;
        } else if (kind == "cautionary") {
            d.kind = PrincipleKind::Cautionary;
        } else {
            throw CorruptRecord("unknown draft kind '" + kind + "'", line_no);
        }
        d.description = j.at("description").get<std::string>();
        for (const auto& t : j.at("triples")) {
            if (!t.is_array() || t.size() != 3) {
                throw CorruptRecord("triple is not a [s,p,o] array", line_no);
            }
            d.triples.push_back(
                {t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
        }
        d.source_trajectory = j.at("source_trajectory").get<std::string>();
        d.problem_id = j.at("problem_id").get<std::string>();
        d.warnings = j.value("warnings", 0);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptRecord(std::string("bad draft record: ") + e.what(), line_no);
    }
}

}  // namespace exloop

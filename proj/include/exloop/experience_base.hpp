#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "exloop/errors.hpp"
#include "exloop/reward.hpp"

namespace exloop {

enum class PrincipleKind { Guiding, Cautionary };

inline std::string_view kind_name(PrincipleKind k) {
    return k == PrincipleKind::Guiding ? "guiding" : "cautionary";
}

struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;

    bool operator==(const Triple&) const = default;
};

struct Principle {
    std::uint64_t id = 0;
    PrincipleKind kind = PrincipleKind::Guiding;
    std::string description;
    std::vector<Triple> triples;
    std::vector<double> embedding;
    std::uint64_t c_use = 0;
    std::uint64_t c_succ = 0;
    std::vector<std::string> source_trajectories;
    std::uint64_t created_round = 0;
};

struct BaseThresholds {
    double sim = 0.85;
    double prune = 0.3;
};

struct ExperienceBase {
    std::map<std::uint64_t, Principle> principles;  // ordered: id-ascending iteration
    std::size_t dimension = 0;
    BaseThresholds thresholds;
    std::uint64_t round = 0;
    std::uint64_t next_id = 1;

    std::size_t size() const { return principles.size(); }
};

// Laplace-smoothed success ratio (c_succ + 1) / (c_use + 2).
inline double metric_score(std::int64_t c_succ, std::int64_t c_use) {
    if (c_succ < 0 || c_use < 0 || c_succ > c_use) {
        throw InvalidCounts("metric_score: need 0 <= c_succ <= c_use, got c_succ=" +
                            std::to_string(c_succ) + " c_use=" + std::to_string(c_use));
    }
    return static_cast<double>(c_succ + 1) / static_cast<double>(c_use + 2);
}

inline double metric_score(const Principle& p) {
    return metric_score(static_cast<std::int64_t>(p.c_succ), static_cast<std::int64_t>(p.c_use));
}

// A new principle before it gets an id and counters.
struct PrincipleSeed {
    PrincipleKind kind = PrincipleKind::Guiding;
    std::string description;
    std::vector<Triple> triples;
    std::vector<double> embedding;
    std::vector<std::string> source_trajectories;
};

inline std::uint64_t add_principle(ExperienceBase& base, PrincipleSeed seed) {
    if (seed.embedding.size() != base.dimension) {
        throw DimensionMismatch("add_principle: embedding has dimension " +
                                std::to_string(seed.embedding.size()) + ", base expects " +
                                std::to_string(base.dimension));
    }
    if (trim_copy(seed.description).empty()) {
        throw EmptyDescription("add_principle: empty description");
    }
    if (seed.source_trajectories.empty()) {
        throw InvalidPrinciple("add_principle: a principle must trace to at least one trajectory");
    }
    for (const Triple& t : seed.triples) {
        if (trim_copy(t.subject).empty() || trim_copy(t.predicate).empty() ||
            trim_copy(t.object).empty()) {
            throw InvalidPrinciple("add_principle: triple with empty field");
        }
    }
    double norm_sq = 0.0;
    for (double x : seed.embedding) norm_sq += x * x;
    if (norm_sq == 0.0) {
        throw InvalidPrinciple("add_principle: zero embedding");
    }

    Principle p;
    p.id = base.next_id++;
    p.kind = seed.kind;
    p.description = std::move(seed.description);
    p.triples = std::move(seed.triples);
    p.embedding = std::move(seed.embedding);
    p.source_trajectories = std::move(seed.source_trajectories);
    p.created_round = base.round;
    const std::uint64_t id = p.id;
    base.principles.emplace(id, std::move(p));
    return id;
}

inline Principle& find_principle(ExperienceBase& base, std::uint64_t id) {
    const auto it = base.principles.find(id);
    if (it == base.principles.end()) {
        throw UnknownPrinciple("no principle with id " + std::to_string(id));
    }
    return it->second;
}

// Links one more source trajectory to an existing principle (idempotent);
// counters and the principle count are untouched.
inline Principle& merge_trajectory(ExperienceBase& base, std::uint64_t id,
                                   const std::string& trajectory_id) {
    Principle& p = find_principle(base, id);
    for (const std::string& existing : p.source_trajectories) {
        if (existing == trajectory_id) return p;
    }
    p.source_trajectories.push_back(trajectory_id);
    return p;
}

// Transactional: either every id is credited or none is.
inline void record_usage(ExperienceBase& base, std::span<const std::uint64_t> ids, bool success) {
    for (std::uint64_t id : ids) find_principle(base, id);
    for (std::uint64_t id : ids) {
        Principle& p = base.principles.at(id);
        ++p.c_use;
        if (success) ++p.c_succ;
    }
}

inline std::vector<std::uint64_t> prune(ExperienceBase& base) {
    std::vector<std::uint64_t> removed;
    for (auto it = base.principles.begin(); it != base.principles.end();) {
        if (metric_score(it->second) < base.thresholds.prune) {
            removed.push_back(it->first);
            it = base.principles.erase(it);
        } else {
            ++it;
        }
    }
    return removed;
}

namespace detail {

inline nlohmann::json principle_to_json(const Principle& p) {
    nlohmann::json triples = nlohmann::json::array();
    for (const Triple& t : p.triples) {
        triples.push_back({t.subject, t.predicate, t.object});
    }
    return {
        {"id", p.id},
        {"kind", std::string(kind_name(p.kind))},
        {"description", p.description},
        {"triples", triples},
        {"embedding", p.embedding},
        {"c_use", p.c_use},
        {"c_succ", p.c_succ},
        {"source_trajectories", p.source_trajectories},
        {"created_round", p.created_round},
    };
}

inline Principle principle_from_json(const nlohmann::json& j, std::size_t line_no) {
    try {
        Principle p;
        p.id = j.at("id").get<std::uint64_t>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "guiding") {
            p.kind = PrincipleKind::Guiding;
        } else if (kind == "cautionary") {
            p.kind = PrincipleKind::Cautionary;
        } else {
            throw CorruptRecord("unknown principle kind '" + kind + "'", line_no);
        }
        p.description = j.at("description").get<std::string>();
        for (const auto& t : j.at("triples")) {
            if (!t.is_array() || t.size() != 3) {
                throw CorruptRecord("triple is not a [s,p,o] array", line_no);
            }
            p.triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                                 t[2].get<std::string>()});
        }
        p.embedding = j.at("embedding").get<std::vector<double>>();
        p.c_use = j.at("c_use").get<std::uint64_t>();
        p.c_succ = j.at("c_succ").get<std::uint64_t>();
        p.source_trajectories = j.at("source_trajectories").get<std::vector<std::string>>();
        p.created_round = j.at("created_round").get<std::uint64_t>();
        if (p.c_succ > p.c_use) throw CorruptRecord("c_succ exceeds c_use", line_no);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptRecord(std::string("bad principle record: ") + e.what(), line_no);
    }
}

}  // namespace detail

// Line-delimited JSON: header record first, then one principle per line in
// id order. Doubles round-trip exactly (shortest-representation dump).
inline std::string base_to_string(const ExperienceBase& base) {
    std::string out;
    const nlohmann::json header = {
        {"dimension", base.dimension},
        {"theta_sim", base.thresholds.sim},
        {"theta_prune", base.thresholds.prune},
        {"round", base.round},
    };
    out += header.dump();
    out += '\n';
    for (const auto& [id, p] : base.principles) {
        out += detail::principle_to_json(p).dump();
        out += '\n';
    }
    return out;
}

inline void persist(const ExperienceBase& base, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoFailure("cannot open " + path.string() + " for writing");
    f << base_to_string(base);
    if (!f) throw IoFailure("write failed for " + path.string());
}

inline ExperienceBase base_from_string(const std::string& text) {
    ExperienceBase base;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    std::uint64_t max_id = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw CorruptRecord(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!have_header) {
            try {
                base.dimension = j.at("dimension").get<std::size_t>();
                base.thresholds.sim = j.at("theta_sim").get<double>();
                base.thresholds.prune = j.at("theta_prune").get<double>();
                base.round = j.at("round").get<std::uint64_t>();
            } catch (const nlohmann::json::exception& e) {
                throw CorruptRecord(std::string("bad header: ") + e.what(), line_no);
            }
            have_header = true;
            continue;
        }
        Principle p = detail::principle_from_json(j, line_no);
        if (p.embedding.size() != base.dimension) {
            throw DimensionMismatch("principle " + std::to_string(p.id) + " has dimension " +
                                    std::to_string(p.embedding.size()) + ", base header says " +
                                    std::to_string(base.dimension));
        }
        if (base.principles.count(p.id)) {
            throw CorruptRecord("duplicate principle id " + std::to_string(p.id), line_no);
        }
        max_id = std::max(max_id, p.id);
        base.principles.emplace(p.id, std::move(p));
    }
    if (!have_header) throw CorruptRecord("missing header record", 1);
    base.next_id = max_id + 1;
    return base;
}

inline ExperienceBase restore(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return base_from_string(text);
}

}  // namespace exloop

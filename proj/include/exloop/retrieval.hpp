#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exloop/errors.hpp"
#include "exloop/experience_base.hpp"
#include "exloop/providers.hpp"

namespace exloop {

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("cosine_similarity: " + std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()));
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw ZeroVector("cosine_similarity: zero-norm vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Deterministic stand-in for a real embedding model: signed hashing of
// character 4/5/6-grams into d buckets, L2-normalized. Same text, same
// vector. Short 1-3 character inputs hash as a single gram; degenerate
// inputs (empty text or full cancellation) fall back to the first basis
// vector. The gram sizes sit at word scale so that texts sharing content
// words score far above texts sharing only stop-words.
inline std::vector<double> test_embedder(std::string_view text, std::size_t d,
                                         std::uint64_t seed) {
    if (d < 2) throw DimensionMismatch("test_embedder: dimension must be >= 2");
    std::vector<double> v(d, 0.0);
    const std::uint64_t salt = detail::splitmix64(seed ^ 0x5bf03635ULL);
    auto add_gram = [&](std::string_view gram) {
        const std::uint64_t h = detail::splitmix64(detail::fnv1a(gram) ^ salt);
        const std::size_t bucket = h % d;
        const double sign = (detail::splitmix64(h) & 1) ? 1.0 : -1.0;
        v[bucket] += sign;
    };
    if (!text.empty() && text.size() < 4) add_gram(text);
    for (std::size_t n = 4; n <= 6; ++n) {
        if (text.size() < n) break;
        for (std::size_t i = 0; i + n <= text.size(); ++i) {
            add_gram(text.substr(i, n));
        }
    }
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) {
        v.assign(d, 0.0);
        v[0] = 1.0;
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

class HashEmbedder : public EmbedderProvider {
  public:
    HashEmbedder(std::size_t dimension, std::uint64_t seed) : d_(dimension), seed_(seed) {}
    std::vector<double> embed(std::string_view text) override {
        return test_embedder(text, d_, seed_);
    }
    std::size_t dimension() const override { return d_; }

  private:
    std::size_t d_;
    std::uint64_t seed_;
};

struct RetrievalHit {
    std::uint64_t principle_id = 0;
    double similarity = 0.0;
    double metric = 0.0;  // live metric score at retrieval time
    PrincipleKind kind = PrincipleKind::Guiding;
    std::string description;
    std::vector<Triple> triples;
    std::vector<std::string> linked_trajectory_ids;
};

// Brute-force scan, sorted by similarity descending with ties broken by id
// ascending. Never mutates the base.
inline std::vector<RetrievalHit> top_k_principles(const ExperienceBase& base,
                                                  std::string_view query_text, std::size_t k,
                                                  EmbedderProvider& embedder) {
    if (k < 1) throw Error("top_k_principles: k must be >= 1");
    std::vector<RetrievalHit> hits;
    if (base.principles.empty()) return hits;
    const std::vector<double> q = embedder.embed(query_text);
    hits.reserve(base.principles.size());
    for (const auto& [id, p] : base.principles) {
        RetrievalHit h;
        h.principle_id = id;
        h.similarity = cosine_similarity(q, p.embedding);
        h.metric = metric_score(p);
        h.kind = p.kind;
        h.description = p.description;
        h.triples = p.triples;
        h.linked_trajectory_ids = p.source_trajectories;
        hits.push_back(std::move(h));
    }
    std::stable_sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.principle_id < b.principle_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

// -- mock document corpus --------------------------------------------------

struct CorpusDoc {
    std::uint64_t doc_id = 0;
    std::string title;
    std::string text;
};

struct DocumentHit {
    std::uint64_t doc_id = 0;
    std::string title;
    std::string snippet;
    double score = 0.0;
};

namespace detail {

inline std::set<std::string> fold_tokens(std::string_view s) {
    std::set<std::string> out;
    std::string cur;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

}  // namespace detail

// Case-folded unique-token overlap; ties resolved by doc_id ascending.
// Zero-score documents still fill the result up to k.
inline std::vector<DocumentHit> top_k_documents(std::span<const CorpusDoc> corpus,
                                                std::string_view query_text, std::size_t k) {
    const std::set<std::string> q = detail::fold_tokens(query_text);
    std::vector<DocumentHit> hits;
    hits.reserve(corpus.size());
    for (const CorpusDoc& doc : corpus) {
        const std::set<std::string> toks = detail::fold_tokens(doc.title + " " + doc.text);
        std::size_t shared = 0;
        for (const std::string& t : q) shared += toks.count(t);
        DocumentHit h;
        h.doc_id = doc.doc_id;
        h.title = doc.title;
        h.snippet = doc.text.size() > 220 ? doc.text.substr(0, 220) + "..." : doc.text;
        h.score = static_cast<double>(shared);
        hits.push_back(std::move(h));
    }
    std::stable_sort(hits.begin(), hits.end(), [](const DocumentHit& a, const DocumentHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

inline std::vector<CorpusDoc> load_corpus(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open corpus " + path.string());
    std::vector<CorpusDoc> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            docs.push_back({j.at("doc_id").get<std::uint64_t>(), j.at("title").get<std::string>(),
                            j.at("text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw CorruptRecord(std::string("bad corpus record: ") + e.what(), line_no);
        }
    }
    return docs;
}

// Small built-in corpus so the demo and tests run with no external files.
inline const std::vector<CorpusDoc>& bundled_corpus() {
    static const std::vector<CorpusDoc> docs = {
        {1, "Kate Warne",
         "Kate Warne joined the Pinkerton National Detective Agency in 1856 and is regarded as "
         "the first female detective hired by the agency, working undercover on fraud and "
         "conspiracy cases."},
        {2, "Private investigator",
         "A private investigator undertakes investigatory work for clients; detective agencies "
         "in the nineteenth century employed operatives for surveillance and security."},
        {3, "Pinkerton National Detective Agency",
         "The Pinkerton National Detective Agency was founded by Allan Pinkerton in 1850 and "
         "became famous for security contracting, train robbery cases, and undercover work."},
        {4, "Allan Pinkerton",
         "Allan Pinkerton, a Scottish-born detective, led the agency that bears his name and "
         "hired operatives of varied backgrounds, including the detective Kate Warne."},
        {5, "Exposition Universelle (1900)",
         "The Exposition Universelle of 1900 was a world fair held in Paris, France, "
         "celebrating the achievements of the past century."},
        {6, "Paris",
         "Paris is the capital of France and hosted several world fairs, including the "
         "Exposition Universelle in 1889 and 1900."},
        {7, "Lyon",
         "Lyon is a major city in France known for its historical and architectural "
         "landmarks and its gastronomy."},
        {8, "Beijing",
         "Beijing is the capital of the People's Republic of China and one of the world's "
         "most populous capital cities."},
        {9, "World's fair",
         "A world's fair or international exposition is a large global exhibition designed "
         "to showcase the achievements of nations."},
    };
    return docs;
}

// -- observation rendering ---------------------------------------------------

namespace detail {

inline std::string format_score_2dp(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace detail

// Experience observations quote each hit on its own line:
//   [Principle 0], type: guiding, metric score: 0.67, description: ...
inline std::string render_observation(std::span<const RetrievalHit> hits) {
    std::string out = "<experience>";
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (i > 0) out += '\n';
        out += "[Principle " + std::to_string(i) + "], type: ";
        out += kind_name(hits[i].kind);
        out += ", metric score: " + detail::format_score_2dp(hits[i].metric);
        out += ", description: " + hits[i].description;
    }
    out += "</experience>";
    return out;
}

// Information observations follow the Doc i(Title: "...") layout, 1-based.
inline std::string render_observation(std::span<const DocumentHit> docs) {
    std::string out = "<information>";
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += '\n';
        out += "Doc " + std::to_string(i + 1) + "(Title: \"" + docs[i].title + "\") " +
               docs[i].snippet;
    }
    out += "</information>";
    return out;
}

}  // namespace exloop

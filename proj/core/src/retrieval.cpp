#include <algorithm>

#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::retrieval {

bool ranks_before(double score_a, const Chunk& a, double score_b, const Chunk& b) {
    if (score_a != score_b) return score_a > score_b;
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.chunk_id < b.chunk_id;
}

bool is_ancestor(const Chunk& a, const Chunk& b) {
    if (!a.hierarchical() || !b.hierarchical() || a.doc_id != b.doc_id) return false;
    if (a.node_path.size() >= b.node_path.size()) return false;
    return std::equal(a.node_path.begin(), a.node_path.end(), b.node_path.begin());
}

std::vector<ScoredChunk> score_chunks(const ChunkIndex& index, std::string_view query, double alpha,
                                      const DenseScorer& dense) {
    const Bm25Scores lexical = bm25_scores(index, query);
    std::vector<ScoredChunk> out;
    out.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        ScoredChunk s;
        s.chunk = index.chunks()[i];
        s.bm25_raw = lexical.raw[i];
        s.bm25_norm = lexical.norm[i];
        s.dense = dense_score(dense, query, s.chunk);
        s.hybrid = hybrid_combine(alpha, s.bm25_norm, s.dense);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoredChunk> top_k(std::vector<ScoredChunk> scored, std::size_t k) {
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        return ranks_before(a.hybrid, a.chunk, b.hybrid, b.chunk);
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<ScoredChunk> apply_reranker(std::vector<ScoredChunk> candidates, std::string_view query,
                                        const Reranker& reranker) {
    std::vector<double> scores;
    try {
        scores = reranker.score(query, candidates);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ScorerUnavailable(std::string("re-ranker failed: ") + e.what());
    }
    if (scores.size() != candidates.size())
        throw ScorerUnavailable("re-ranker returned " + std::to_string(scores.size()) + " scores for " +
                                std::to_string(candidates.size()) + " candidates");
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].rerank = scores[i];
    std::stable_sort(candidates.begin(), candidates.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
        return ranks_before(*a.rerank, a.chunk, *b.rerank, b.chunk);
    });
    return candidates;
}

std::vector<ScoredChunk> branch_dedup(const std::vector<ScoredChunk>& candidates) {
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = candidates[x];
        const auto& b = candidates[y];
        return ranks_before(a.effective_score(), a.chunk, b.effective_score(), b.chunk);
    });

    std::vector<bool> keep(candidates.size(), false);
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const Chunk& c = candidates[idx].chunk;
        const bool related = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            const Chunk& other = candidates[k].chunk;
            return is_ancestor(other, c) || is_ancestor(c, other);
        });
        if (!related) {
            keep[idx] = true;
            kept.push_back(idx);
        }
    }
    std::vector<ScoredChunk> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (keep[i]) out.push_back(candidates[i]);
    return out;
}

std::vector<ScoredChunk> retrieve(const ChunkIndex& index, std::string_view query,
                                  const RetrievalConfig& config, const Ports& ports) {
    config.validate();
    static const HashedTrigramScorer default_dense;
    static const PassthroughReranker default_reranker;
    const DenseScorer& dense = ports.dense ? *ports.dense : default_dense;
    const Reranker& reranker = ports.reranker ? *ports.reranker : default_reranker;

    auto candidates = top_k(score_chunks(index, query, config.alpha, dense),
                            static_cast<std::size_t>(config.k));
    if (config.use_reranker) candidates = apply_reranker(std::move(candidates), query, reranker);
    auto survivors = branch_dedup(candidates);
    if (survivors.size() > static_cast<std::size_t>(config.k_final))
        survivors.resize(static_cast<std::size_t>(config.k_final));
    return survivors;
}

std::vector<ScoredChunk> retrieve(const doctree::OpportunityDoc& doc, std::string_view query,
                                  const RetrievalConfig& config, const Ports& ports) {
    config.validate();
    const ChunkIndex index(make_chunks(doc, config));
    return retrieve(index, query, config, ports);
}

std::string concatenate_context(const std::vector<ScoredChunk>& results) {
    std::string out;
    for (const auto& r : results) {
        if (!out.empty()) out += "\n\n";
        out += r.chunk.text;
    }
    return out;
}

std::string trace_record(std::string_view doc_id, std::string_view query,
                         const std::vector<ScoredChunk>& results) {
    nlohmann::ordered_json chunks = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json j{{"chunk_id", r.chunk.chunk_id},
                                 {"bm25_raw", r.bm25_raw},
                                 {"bm25_norm", r.bm25_norm},
                                 {"dense", r.dense},
                                 {"hybrid", r.hybrid}};
        j["rerank"] = r.rerank ? nlohmann::ordered_json(*r.rerank) : nlohmann::ordered_json(nullptr);
        chunks.push_back(std::move(j));
    }
    nlohmann::ordered_json rec{{"doc_id", doc_id}, {"query", query}, {"chunks", std::move(chunks)}};
    return rec.dump();
}

}  // namespace gtrx::retrieval

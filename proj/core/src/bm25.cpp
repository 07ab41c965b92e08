#include <algorithm>
#include <cmath>
#include <set>

#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::retrieval {

ChunkIndex::ChunkIndex(std::vector<Chunk> chunks, Bm25Params params)
    : chunks_(std::move(chunks)), params_(params) {
    lengths_.reserve(chunks_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        const auto tokens = text::lexical_tokens(chunks_[i].text);
        lengths_.push_back(tokens.size());
        total += static_cast<double>(tokens.size());
        std::unordered_map<std::string, std::size_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (auto& [term, count] : tf) postings_[term].push_back({i, count});
    }
    avg_length_ = chunks_.empty() ? 0.0 : total / static_cast<double>(chunks_.size());
}

const std::vector<ChunkIndex::Posting>* ChunkIndex::postings(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t ChunkIndex::document_frequency(std::string_view term) const {
    const auto* p = postings(term);
    return p ? p->size() : 0;
}

std::size_t ChunkIndex::term_frequency(std::size_t chunk, std::string_view term) const {
    const auto* p = postings(term);
    if (!p) return 0;
    // postings are appended in chunk order
    const auto it = std::lower_bound(p->begin(), p->end(), chunk,
                                     [](const Posting& post, std::size_t c) { return post.chunk < c; });
    return (it != p->end() && it->chunk == chunk) ? it->tf : 0;
}

Bm25Scores bm25_scores(const ChunkIndex& index, std::string_view query) {
    if (index.empty()) throw EmptyIndex("BM25 index has no chunks");

    const auto n = static_cast<double>(index.size());
    const double k1 = index.params().k1;
    const double b = index.params().b;
    const double avgdl = index.average_length();

    Bm25Scores out;
    out.raw.assign(index.size(), 0.0);
    const auto tokens = text::lexical_tokens(query);
    const std::set<std::string> terms(tokens.begin(), tokens.end());
    for (const auto& term : terms) {
        const auto* postings = index.postings(term);
        if (!postings) continue;
        const auto df = static_cast<double>(postings->size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& [chunk, tf_count] : *postings) {
            const auto tf = static_cast<double>(tf_count);
            const double len_ratio = avgdl > 0.0 ? static_cast<double>(index.length(chunk)) / avgdl : 0.0;
            out.raw[chunk] += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len_ratio));
        }
    }
    const double max_raw = *std::max_element(out.raw.begin(), out.raw.end());
    out.norm.resize(out.raw.size(), 0.0);
    if (max_raw > 0.0) {
        for (std::size_t i = 0; i < out.raw.size(); ++i)
            out.norm[i] = std::clamp(out.raw[i] / max_raw, 0.0, 1.0);
    }
    return out;
}

}  // namespace gtrx::retrieval

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>

#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::retrieval {

std::size_t HashedTrigramScorer::bucket(std::string_view trigram) {
    std::uint32_t h = 2166136261u;
    for (char c : trigram) {
        h ^= static_cast<unsigned char>(c);
        h *= 16777619u;
    }
    return h % kDimension;
}

std::vector<double> HashedTrigramScorer::embed(std::string_view raw) {
    const std::string s = text::to_lower_ascii(raw);
    std::vector<double> v(kDimension, 0.0);
    for (std::size_t i = 0; i + 3 <= s.size(); ++i) v[bucket(std::string_view(s).substr(i, 3))] += 1.0;
    return v;
}

double HashedTrigramScorer::score(std::string_view query, std::string_view text) const {
    const auto a = embed(query);
    const auto b = embed(text);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < kDimension; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    // counts are integral, so na * nb is exact and a perfect square when a == b
    return std::min(1.0, dot / std::sqrt(na * nb));
}

std::vector<double> PassthroughReranker::score(std::string_view /*query*/,
                                               std::span<const ScoredChunk> candidates) const {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(c.hybrid);
    return out;
}

double dense_score(const DenseScorer& scorer, std::string_view query, const Chunk& chunk) {
    double s = 0.0;
    try {
        s = scorer.score(query, chunk.text);
    } catch (const ScorerUnavailable&) {
        throw;
    } catch (const std::exception& e) {
        throw ScorerUnavailable(std::string("dense scorer failed: ") + e.what());
    }
    if (!(s >= 0.0 && s <= 1.0))
        throw ScorerUnavailable("dense scorer returned " + std::to_string(s) + " outside [0,1]");
    return s;
}

double hybrid_combine(double alpha, double bm25_norm, double dense) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(alpha) || !in_unit(bm25_norm) || !in_unit(dense))
        throw DomainError("hybrid_combine inputs must lie in [0,1]");
    return std::min(1.0, alpha * bm25_norm + (1.0 - alpha) * dense);
}

}  // namespace gtrx::retrieval

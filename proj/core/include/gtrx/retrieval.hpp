#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gtrx/doctree.hpp"

namespace gtrx::retrieval {

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    doctree::NodePath node_path;  // empty for sliding-window chunks (and the root)
    int depth = 0;                // node level for hierarchical chunks, 0 for sliding
    std::string text;
    std::size_t word_count = 0;
    std::size_t word_offset = 0;  // sliding-window start, 0 for hierarchical

    bool hierarchical() const { return depth > 0; }
};

enum class ChunkerKind { Hierarchical, Sliding };

std::string_view to_string(ChunkerKind kind);
std::optional<ChunkerKind> chunker_from_string(std::string_view s);

struct RetrievalConfig {
    double alpha = 0.25;
    int k = 10;
    int k_final = 5;
    bool use_reranker = false;
    ChunkerKind chunker = ChunkerKind::Hierarchical;
    int window_words = 200;
    int overlap_words = 50;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    /// Compact label such as "hierarchical|0.25|rr".
    std::string label() const;
};

/// Merges keys present in `json` over `base`. Unknown keys are rejected.
RetrievalConfig config_from_json(std::string_view json, RetrievalConfig base = {});
std::string config_to_json(const RetrievalConfig& config);

struct ScoredChunk {
    Chunk chunk;
    double bm25_raw = 0.0;
    double bm25_norm = 0.0;
    double dense = 0.0;
    double hybrid = 0.0;
    std::optional<double> rerank;

    /// Re-rank score when present, otherwise the hybrid score.
    double effective_score() const { return rerank.value_or(hybrid); }
};

// --- chunking -------------------------------------------------------------

/// One chunk per tree node, depth-first pre-order; text = node_text(node).
std::vector<Chunk> chunk_hierarchical(const doctree::OpportunityDoc& doc);

/// Fixed windows over the whitespace tokens of serialize_markdown(root).
/// Throws ConfigError unless window_words > overlap_words >= 0.
std::vector<Chunk> chunk_sliding(const doctree::OpportunityDoc& doc, int window_words,
                                 int overlap_words);

std::vector<Chunk> make_chunks(const doctree::OpportunityDoc& doc, const RetrievalConfig& config);

// --- lexical scoring --------------------------------------------------------

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Immutable BM25 corpus statistics over a chunk set. Safe to share across
/// threads once built.
class ChunkIndex {
public:
    explicit ChunkIndex(std::vector<Chunk> chunks, Bm25Params params = {});

    const std::vector<Chunk>& chunks() const { return chunks_; }
    std::size_t size() const { return chunks_.size(); }
    bool empty() const { return chunks_.empty(); }
    const Bm25Params& params() const { return params_; }

    std::size_t document_frequency(std::string_view term) const;
    std::size_t term_frequency(std::size_t chunk, std::string_view term) const;
    std::size_t length(std::size_t chunk) const { return lengths_[chunk]; }
    double average_length() const { return avg_length_; }

    struct Posting {
        std::size_t chunk;
        std::size_t tf;
    };
    const std::vector<Posting>* postings(std::string_view term) const;

private:
    std::vector<Chunk> chunks_;
    Bm25Params params_;
    std::vector<std::size_t> lengths_;
    double avg_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

struct Bm25Scores {
    std::vector<double> raw;
    std::vector<double> norm;
};

/// Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)) summed over the
/// distinct query terms; norm = raw / max(raw). Throws EmptyIndex.
Bm25Scores bm25_scores(const ChunkIndex& index, std::string_view query);

// --- dense scoring and re-ranking ports ------------------------------------

class DenseScorer {
public:
    virtual ~DenseScorer() = default;
    /// Similarity in [0,1]. Implementations signal failure by throwing.
    virtual double score(std::string_view query, std::string_view text) const = 0;
};

/// Cosine similarity of hashed character-3-gram count vectors (256 buckets,
/// FNV-1a over lowercased bytes).
class HashedTrigramScorer final : public DenseScorer {
public:
    static constexpr std::size_t kDimension = 256;

    double score(std::string_view query, std::string_view text) const override;

    static std::size_t bucket(std::string_view trigram);
    static std::vector<double> embed(std::string_view text);
};

class Reranker {
public:
    virtual ~Reranker() = default;
    /// One score per candidate, in candidate order.
    virtual std::vector<double> score(std::string_view query,
                                      std::span<const ScoredChunk> candidates) const = 0;
};

/// Returns each candidate's hybrid score, leaving the order untouched.
class PassthroughReranker final : public Reranker {
public:
    std::vector<double> score(std::string_view query,
                              std::span<const ScoredChunk> candidates) const override;
};

struct Ports {
    const DenseScorer* dense = nullptr;   // defaults to HashedTrigramScorer
    const Reranker* reranker = nullptr;  // defaults to PassthroughReranker
};

/// Calls the scorer and checks the [0,1] contract. Any scorer failure surfaces
/// as ScorerUnavailable.
double dense_score(const DenseScorer& scorer, std::string_view query, const Chunk& chunk);

/// alpha * bm25_norm + (1 - alpha) * dense. Throws DomainError outside [0,1].
double hybrid_combine(double alpha, double bm25_norm, double dense);

// --- ranking ----------------------------------------------------------------

/// Strict ordering by (score desc, depth desc, chunk_id asc).
bool ranks_before(double score_a, const Chunk& a, double score_b, const Chunk& b);

/// True when `a` is a proper ancestor of `b` in the same tree.
bool is_ancestor(const Chunk& a, const Chunk& b);

/// Scores every chunk in the index with the hybrid formula.
std::vector<ScoredChunk> score_chunks(const ChunkIndex& index, std::string_view query, double alpha,
                                      const DenseScorer& dense);

/// Sorts by hybrid score (with tie-break) and keeps the first k.
std::vector<ScoredChunk> top_k(std::vector<ScoredChunk> scored, std::size_t k);

/// Fills `rerank` on every candidate and re-sorts by it.
std::vector<ScoredChunk> apply_reranker(std::vector<ScoredChunk> candidates, std::string_view query,
                                        const Reranker& reranker);

/// Drops the lower-ranked member of every ancestor/descendant pair. Survivors
/// keep their input order.
std::vector<ScoredChunk> branch_dedup(const std::vector<ScoredChunk>& candidates);

/// Full pipeline over a prebuilt index: score, top-k, optional re-rank,
/// branch-dedup, top-k_final.
std::vector<ScoredChunk> retrieve(const ChunkIndex& index, std::string_view query,
                                  const RetrievalConfig& config, const Ports& ports = {});

std::vector<ScoredChunk> retrieve(const doctree::OpportunityDoc& doc, std::string_view query,
                                  const RetrievalConfig& config, const Ports& ports = {});

/// Final chunk texts joined by blank lines.
std::string concatenate_context(const std::vector<ScoredChunk>& results);

/// One JSON-lines record describing a retrieval call.
std::string trace_record(std::string_view doc_id, std::string_view query,
                         const std::vector<ScoredChunk>& results);

}  // namespace gtrx::retrieval

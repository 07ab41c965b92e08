#include <cstdio>

#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::retrieval {

namespace {

std::string path_id(const std::string& doc_id, const doctree::NodePath& path) {
    std::string id = doc_id + "#h";
    for (std::size_t i : path) id += "/" + std::to_string(i);
    return id;
}

}  // namespace

std::vector<Chunk> chunk_hierarchical(const doctree::OpportunityDoc& doc) {
    std::vector<Chunk> out;
    doctree::visit(doc.root, [&](const doctree::DocNode& node, const doctree::NodePath& path) {
        Chunk c;
        c.chunk_id = path_id(doc.opportunity_id, path);
        c.doc_id = doc.opportunity_id;
        c.node_path = path;
        c.depth = node.level;
        c.text = doctree::node_text(node);
        c.word_count = text::split_words(c.text).size();
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<Chunk> chunk_sliding(const doctree::OpportunityDoc& doc, int window_words,
                                 int overlap_words) {
    if (overlap_words < 0 || window_words <= overlap_words)
        throw ConfigError("sliding window requires window_words > overlap_words >= 0");
    const auto words = text::split_words(doctree::serialize_markdown(doc.root));
    const auto window = static_cast<std::size_t>(window_words);
    const auto stride = static_cast<std::size_t>(window_words - overlap_words);

    std::vector<Chunk> out;
    for (std::size_t start = 0; start < words.size(); start += stride) {
        const std::size_t end = std::min(start + window, words.size());
        Chunk c;
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "#s%04zu", out.size());
        c.chunk_id = doc.opportunity_id + suffix;
        c.doc_id = doc.opportunity_id;
        c.depth = 0;
        c.word_offset = start;
        c.word_count = end - start;
        c.text = text::join({words.begin() + static_cast<std::ptrdiff_t>(start),
                             words.begin() + static_cast<std::ptrdiff_t>(end)},
                            " ");
        out.push_back(std::move(c));
        if (end == words.size()) break;
    }
    return out;
}

std::vector<Chunk> make_chunks(const doctree::OpportunityDoc& doc, const RetrievalConfig& config) {
    if (config.chunker == ChunkerKind::Hierarchical) return chunk_hierarchical(doc);
    return chunk_sliding(doc, config.window_words, config.overlap_words);
}

}  // namespace gtrx::retrieval

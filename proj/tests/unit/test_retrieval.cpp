#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"
#include "oracles.hpp"

using namespace gtrx;
using namespace gtrx::retrieval;

namespace {

doctree::OpportunityDoc words_doc(std::size_t n) {
    doctree::OpportunityDoc doc;
    doc.opportunity_id = "opp-w";
    doc.title = "W";
    doc.root.heading = "W";  // contributes "#" and "W"
    std::string body;
    for (std::size_t i = 2; i < n; ++i) body += (body.empty() ? "w" : " w") + std::to_string(i);
    doc.root.blocks.push_back(doctree::Block::paragraph(body));
    return doc;
}

/// Root "Funding" with two sections; the first has a nested subsection.
doctree::OpportunityDoc small_tree() {
    using doctree::Block;
    using doctree::DocNode;
    doctree::OpportunityDoc doc;
    doc.opportunity_id = "opp-t";
    doc.title = "Funding call";
    doc.root.heading = "Funding call";
    doc.root.blocks.push_back(Block::paragraph("General introduction to the call."));
    DocNode award{"Award size", 2, {Block::paragraph("The maximum award is 50000 pounds.")}, {}};
    award.children.push_back(DocNode{"Eligible costs", 3, {Block::paragraph("Costs are funded at 80 percent.")}, {}});
    DocNode apply{"How to apply", 2, {Block::paragraph("Submit through the funding service.")}, {}};
    doc.root.children = {award, apply};
    return doc;
}

ScoredChunk scored(std::string id, doctree::NodePath path, int depth, double hybrid) {
    ScoredChunk s;
    s.chunk.chunk_id = std::move(id);
    s.chunk.doc_id = "d";
    s.chunk.node_path = std::move(path);
    s.chunk.depth = depth;
    s.hybrid = hybrid;
    return s;
}

std::vector<std::string> ids(const std::vector<ScoredChunk>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(s.chunk.chunk_id);
    return out;
}

class ReversingReranker final : public Reranker {
public:
    std::vector<double> score(std::string_view, std::span<const ScoredChunk> c) const override {
        std::vector<double> out(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) out[i] = static_cast<double>(i + 1) / static_cast<double>(c.size());
        return out;
    }
};

class FailingScorer final : public DenseScorer {
public:
    double score(std::string_view, std::string_view) const override { throw std::runtime_error("offline"); }
};

class OutOfRangeScorer final : public DenseScorer {
public:
    double score(std::string_view, std::string_view) const override { return 1.5; }
};

}  // namespace

TEST_CASE("hierarchical chunker emits one chunk per node in pre-order") {
    const auto chunks = chunk_hierarchical(small_tree());
    REQUIRE(chunks.size() == 4);
    CHECK(chunks[0].chunk_id == "opp-t#h");
    CHECK(chunks[1].chunk_id == "opp-t#h/0");
    CHECK(chunks[2].chunk_id == "opp-t#h/0/0");
    CHECK(chunks[3].chunk_id == "opp-t#h/1");
    CHECK(chunks[2].depth == 3);
    CHECK(chunks[1].text.find(chunks[2].text) != std::string::npos);
}

TEST_CASE("sliding windows over 500 words start at 0, 150, 300") {
    const auto chunks = chunk_sliding(words_doc(500), 200, 50);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].word_offset == 0);
    CHECK(chunks[1].word_offset == 150);
    CHECK(chunks[2].word_offset == 300);
    CHECK(chunks[2].word_count == 200);
    CHECK(chunks[0].depth == 0);
}

TEST_CASE("short documents give a single sliding window") {
    const auto chunks = chunk_sliding(words_doc(120), 200, 50);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].word_count == 120);
    CHECK_THROWS_AS(chunk_sliding(words_doc(10), 50, 50), ConfigError);
}

TEST_CASE("BM25 matches the reference implementation") {
    const std::vector<std::string> docs = {
        "The maximum award is 50000 pounds for this grant",
        "Funding covers 80 percent of full economic costs",
        "Awards last up to 36 months and the maximum award is fixed",
        "Submit your application through the funding service",
        "",
    };
    std::vector<Chunk> chunks;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        Chunk c;
        c.chunk_id = "c" + std::to_string(i);
        c.text = docs[i];
        chunks.push_back(c);
    }
    const ChunkIndex index(chunks);
    for (const std::string q : {"maximum award", "funding costs percent", "nothing matches", "award award"}) {
        const auto got = bm25_scores(index, q);
        const auto want = oracle::bm25(docs, q);
        const double max = *std::max_element(want.begin(), want.end());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            CAPTURE(q);
            CHECK(got.raw[i] == doctest::Approx(want[i]).epsilon(1e-12));
            CHECK(got.norm[i] == doctest::Approx(max > 0 ? want[i] / max : 0.0).epsilon(1e-12));
        }
        if (max > 0) CHECK(*std::max_element(got.norm.begin(), got.norm.end()) == 1.0);
    }
    CHECK_THROWS_AS(bm25_scores(ChunkIndex({}), "x"), EmptyIndex);
}

TEST_CASE("hashed trigram scorer") {
    const HashedTrigramScorer s;
    CHECK(s.score("maximum award", "maximum award") == doctest::Approx(1.0));
    CHECK(s.score("aaaa", "zzzz") == 0.0);
    CHECK(s.score("", "anything") == 0.0);
    const std::string a = "The maximum award is £50,000";
    const std::string b = "Maximum awards are capped at fifty thousand";
    CHECK(s.score(a, b) == doctest::Approx(oracle::trigram_cosine(a, b)).epsilon(1e-12));
    CHECK(HashedTrigramScorer::bucket("abc") == oracle::fnv1a("abc") % 256);
}

TEST_CASE("hybrid combination") {
    CHECK(hybrid_combine(1.0, 0.8, 0.1) == doctest::Approx(0.8));
    CHECK(hybrid_combine(0.0, 0.8, 0.3) == doctest::Approx(0.3));
    CHECK(hybrid_combine(0.5, 0.9, 0.5) == doctest::Approx(0.7));
    CHECK_THROWS_AS(hybrid_combine(1.5, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(hybrid_combine(0.5, -0.1, 0.5), DomainError);
}

TEST_CASE("ranking tie-break prefers deeper then smaller id") {
    Chunk shallow, deep, other;
    shallow.chunk_id = "b";
    shallow.depth = 2;
    deep.chunk_id = "c";
    deep.depth = 3;
    other.chunk_id = "a";
    other.depth = 2;
    CHECK(ranks_before(0.5, deep, 0.5, shallow));
    CHECK(ranks_before(0.5, other, 0.5, shallow));
    CHECK(ranks_before(0.6, shallow, 0.5, deep));
}

TEST_CASE("branch deduplication") {
    SUBCASE("child beats parent when it scores higher") {
        const auto out = branch_dedup({scored("p", {0}, 2, 0.5), scored("c", {0, 1}, 3, 0.9), scored("s", {1}, 2, 0.4)});
        CHECK(ids(out) == std::vector<std::string>{"c", "s"});
    }
    SUBCASE("parent beats child when it scores higher") {
        const auto out = branch_dedup({scored("p", {0}, 2, 0.9), scored("c", {0, 1}, 3, 0.5)});
        CHECK(ids(out) == std::vector<std::string>{"p"});
    }
    SUBCASE("equal scores keep the deeper chunk") {
        const auto out = branch_dedup({scored("p", {0}, 2, 0.7), scored("c", {0, 1}, 3, 0.7)});
        CHECK(ids(out) == std::vector<std::string>{"c"});
    }
    SUBCASE("root conflicts with everything") {
        const auto out = branch_dedup({scored("r", {}, 1, 0.95), scored("a", {0}, 2, 0.9), scored("b", {1}, 2, 0.8)});
        CHECK(ids(out) == std::vector<std::string>{"r"});
    }
    SUBCASE("sliding windows never conflict") {
        auto a = scored("w0", {}, 0, 0.3);
        auto b = scored("w1", {}, 0, 0.9);
        CHECK(branch_dedup({a, b}).size() == 2);
    }
    SUBCASE("survivors keep input order") {
        const auto out = branch_dedup({scored("low", {1}, 2, 0.2), scored("high", {0}, 2, 0.8)});
        CHECK(ids(out) == std::vector<std::string>{"low", "high"});
    }
}

TEST_CASE("branch dedup output is an antichain for random inputs") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ScoredChunk> in;
        for (int i = 0; i < 12; ++i) {
            doctree::NodePath path;
            const int depth = static_cast<int>(rng() % 4);
            for (int d = 0; d < depth; ++d) path.push_back(rng() % 2);
            in.push_back(scored("c" + std::to_string(i), path, depth + 1, u(rng)));
        }
        const auto out = branch_dedup(in);
        for (const auto& a : out)
            for (const auto& b : out) CHECK_FALSE(is_ancestor(a.chunk, b.chunk));
        // every dropped chunk is related to a survivor that outranks it
        for (const auto& c : in) {
            if (std::any_of(out.begin(), out.end(), [&](const auto& s) { return s.chunk.chunk_id == c.chunk.chunk_id; }))
                continue;
            CHECK(std::any_of(out.begin(), out.end(), [&](const auto& s) {
                return (is_ancestor(s.chunk, c.chunk) || is_ancestor(c.chunk, s.chunk)) &&
                       ranks_before(s.effective_score(), s.chunk, c.effective_score(), c.chunk);
            }));
        }
    }
}

TEST_CASE("re-ranker order replaces hybrid order") {
    const ReversingReranker rr;
    const auto out = apply_reranker({scored("a", {0}, 2, 0.9), scored("b", {1}, 2, 0.5), scored("c", {2}, 2, 0.1)},
                                    "q", rr);
    CHECK(ids(out) == std::vector<std::string>{"c", "b", "a"});
    REQUIRE(out[0].rerank.has_value());
    CHECK(out[0].effective_score() == doctest::Approx(1.0));

    const PassthroughReranker pass;
    const auto same = apply_reranker({scored("a", {0}, 2, 0.9), scored("b", {1}, 2, 0.5)}, "q", pass);
    CHECK(ids(same) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("scorer failures surface as ScorerUnavailable") {
    const ChunkIndex index(chunk_hierarchical(small_tree()));
    RetrievalConfig cfg;
    const FailingScorer failing;
    CHECK_THROWS_AS(retrieve(index, "award", cfg, Ports{&failing, nullptr}), ScorerUnavailable);
    const OutOfRangeScorer bad;
    CHECK_THROWS_AS(retrieve(index, "award", cfg, Ports{&bad, nullptr}), ScorerUnavailable);
}

TEST_CASE("pipeline on a hand-traced tree") {
    // alpha = 1 makes ranking purely lexical. "maximum award" occurs only in the
    // award section, so it ranks first; the root contains the same text and is
    // its ancestor, so dedup removes the root.
    RetrievalConfig cfg;
    cfg.alpha = 1.0;
    cfg.k = 4;
    cfg.k_final = 2;
    const auto out = retrieve(small_tree(), "maximum award", cfg);
    REQUIRE(!out.empty());
    CHECK(out.size() <= 2);
    CHECK(out[0].chunk.chunk_id == "opp-t#h/0");
    CHECK(out[0].bm25_norm == 1.0);
    for (const auto& a : out)
        for (const auto& b : out) CHECK_FALSE(is_ancestor(a.chunk, b.chunk));
    CHECK(concatenate_context(out).find("50000 pounds") != std::string::npos);
}

TEST_CASE("alpha endpoints select pure lexical or pure dense ranking") {
    const auto doc = doctree::parse_opportunity_html(fixtures::read("corpus/docs/opp-0001.html"), "opp-0001");
    const ChunkIndex index(chunk_hierarchical(doc));
    const HashedTrigramScorer dense;
    const std::string q = "What is the total funding available?";
    const auto s1 = score_chunks(index, q, 1.0, dense);
    const auto s0 = score_chunks(index, q, 0.0, dense);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].hybrid == s1[i].bm25_norm);
        CHECK(s0[i].hybrid == s0[i].dense);
    }
}

TEST_CASE("retrieval config labels, JSON and validation") {
    RetrievalConfig c;
    CHECK(c.label() == "hierarchical|0.25|norr");
    c.chunker = ChunkerKind::Sliding;
    c.alpha = 0.5;
    c.use_reranker = true;
    CHECK(c.label() == "sliding|0.50|rr");
    const auto back = config_from_json(config_to_json(c));
    CHECK(back.label() == c.label());
    CHECK(back.window_words == c.window_words);
    CHECK_THROWS_AS(config_from_json("{\"bogus\":1}"), ConfigError);
    RetrievalConfig bad;
    bad.k_final = bad.k + 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.alpha = 1.01;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("trace records are single JSON lines") {
    RetrievalConfig cfg;
    const auto out = retrieve(small_tree(), "award", cfg);
    const auto line = trace_record("opp-t", "award", out);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(line.find("\"chunk_id\"") != std::string::npos);
}

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gtrx/doctree.hpp"
#include "gtrx/fuzzy.hpp"
#include "gtrx/retrieval.hpp"

using namespace gtrx;

namespace {

std::string read_fixture(const std::string& rel) {
    std::ifstream in(std::string(GTRX_FIXTURE_DIR) + "/" + rel, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const doctree::OpportunityDoc& long_doc() {
    static const auto doc = doctree::parse_opportunity_html(read_fixture("corpus/docs/opp-0010.html"), "opp-0010");
    return doc;
}

std::string random_words(std::mt19937& rng, std::size_t n) {
    static const char* vocab[] = {"award", "funding", "grant", "maximum", "minimum", "total", "months", "research"};
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += vocab[rng() % 8];
    }
    return s;
}

}  // namespace

static void BM_ParseLongDocument(benchmark::State& state) {
    const std::string html = read_fixture("corpus/docs/opp-0010.html");
    for (auto _ : state) benchmark::DoNotOptimize(doctree::parse_opportunity_html(html, "opp-0010"));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_ParseLongDocument);

static void BM_Bm25Scores(benchmark::State& state) {
    std::mt19937 rng(1);
    std::vector<retrieval::Chunk> chunks(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        chunks[i].chunk_id = std::to_string(i);
        chunks[i].text = random_words(rng, 150);
    }
    const retrieval::ChunkIndex index(chunks);
    for (auto _ : state) benchmark::DoNotOptimize(retrieval::bm25_scores(index, "maximum award funding"));
}
BENCHMARK(BM_Bm25Scores)->Arg(16)->Arg(256)->Arg(4096);

static void BM_FuzzyRatio(benchmark::State& state) {
    std::mt19937 rng(2);
    const std::string a = random_words(rng, static_cast<std::size_t>(state.range(0)));
    const std::string b = random_words(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(linking::fuzzy_ratio(a, b));
}
BENCHMARK(BM_FuzzyRatio)->Arg(4)->Arg(16)->Arg(128);

static void BM_RetrieveHierarchical(benchmark::State& state) {
    const retrieval::ChunkIndex index(retrieval::chunk_hierarchical(long_doc()));
    retrieval::RetrievalConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(retrieval::retrieve(index, "What is the maximum award?", cfg));
}
BENCHMARK(BM_RetrieveHierarchical);

static void BM_RetrieveSliding(benchmark::State& state) {
    retrieval::RetrievalConfig cfg;
    cfg.chunker = retrieval::ChunkerKind::Sliding;
    const retrieval::ChunkIndex index(retrieval::make_chunks(long_doc(), cfg));
    for (auto _ : state) benchmark::DoNotOptimize(retrieval::retrieve(index, "What is the maximum award?", cfg));
}
BENCHMARK(BM_RetrieveSliding);
BENCHMARK_MAIN();

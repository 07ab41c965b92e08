#include <cstdio>

#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::retrieval {

std::string_view to_string(ChunkerKind kind) {
    return kind == ChunkerKind::Hierarchical ? "hierarchical" : "sliding";
}

std::optional<ChunkerKind> chunker_from_string(std::string_view s) {
    if (s == "hierarchical") return ChunkerKind::Hierarchical;
    if (s == "sliding" || s == "simple") return ChunkerKind::Sliding;
    return std::nullopt;
}

void RetrievalConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (k_final < 1) throw ConfigError("k_final must be >= 1");
    if (k_final > k) throw ConfigError("k_final must not exceed k");
    if (window_words < 1) throw ConfigError("window_words must be >= 1");
    if (overlap_words < 0 || overlap_words >= window_words)
        throw ConfigError("overlap_words must satisfy 0 <= overlap_words < window_words");
}

std::string RetrievalConfig::label() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s|%.2f|%s", std::string(to_string(chunker)).c_str(), alpha,
                  use_reranker ? "rr" : "norr");
    return buf;
}

RetrievalConfig config_from_json(std::string_view json, RetrievalConfig base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("retrieval config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("retrieval config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "alpha")
                base.alpha = value.get<double>();
            else if (key == "k")
                base.k = value.get<int>();
            else if (key == "k_final")
                base.k_final = value.get<int>();
            else if (key == "use_reranker")
                base.use_reranker = value.get<bool>();
            else if (key == "chunker") {
                auto kind = chunker_from_string(value.get<std::string>());
                if (!kind) throw ConfigError("unknown chunker '" + value.get<std::string>() + "'");
                base.chunker = *kind;
            } else if (key == "window_words")
                base.window_words = value.get<int>();
            else if (key == "overlap_words")
                base.overlap_words = value.get<int>();
            else
                throw ConfigError("unknown retrieval config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("retrieval config: ") + e.what());
    }
    base.validate();
    return base;
}

std::string config_to_json(const RetrievalConfig& c) {
    nlohmann::ordered_json j{{"alpha", c.alpha},
                             {"k", c.k},
                             {"k_final", c.k_final},
                             {"use_reranker", c.use_reranker},
                             {"chunker", to_string(c.chunker)},
                             {"window_words", c.window_words},
                             {"overlap_words", c.overlap_words}};
    return j.dump();
}

}  // namespace gtrx::retrieval

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/extraction.hpp"

namespace gtrx::extraction {

ReplayClient ReplayClient::from_jsonl(std::string_view content) {
    ReplayClient client;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        const std::string line = text::trim(content.substr(pos, eol - pos));
        ++line_no;
        pos = eol + 1;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto key = j.at("field").get<std::string>();
            const auto field = field_from_key(key);
            if (!field) throw InvalidInput("unknown field '" + key + "'");
            client.add(j.at("doc_id").get<std::string>(), *field, j.at("response_text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput("replay fixture line " + std::to_string(line_no) + ": " + e.what());
        } catch (const InvalidInput& e) {
            throw InvalidInput("replay fixture line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return client;
}

void ReplayClient::add(std::string doc_id, MetadataField field, std::string response_text) {
    responses_[{std::move(doc_id), field}] = std::move(response_text);
}

std::string ReplayClient::complete(const CompletionRequest& request) const {
    const auto it = responses_.find({request.doc_id, request.field});
    if (it == responses_.end())
        throw CompletionFailure("no replay response for (" + request.doc_id + ", " +
                                std::string(field_key(request.field)) + ")");
    return it->second;
}

HttpCompletionClient::HttpCompletionClient(HttpCompletionConfig config) : config_(std::move(config)) {}

std::string HttpCompletionClient::complete(const CompletionRequest& request) const {
    httplib::Client cli(config_.base_url);
    cli.set_connection_timeout(config_.timeout_seconds, 0);
    cli.set_read_timeout(config_.timeout_seconds, 0);
    cli.set_write_timeout(config_.timeout_seconds, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    const nlohmann::json body{
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"messages",
         nlohmann::json::array({{{"role", "system"}, {"content", request.prompt.system}},
                                {{"role", "user"}, {"content", request.prompt.user}}})}};

    auto res = cli.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) throw TransportError("completion endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransportError("completion endpoint returned HTTP " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300)
        throw CompletionFailure("completion endpoint returned HTTP " + std::to_string(res->status));

    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw CompletionFailure("completion endpoint returned non-JSON body");
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw CompletionFailure("completion reply lacks choices[0].message.content");
    }
}

std::string complete_with_retry(const CompletionClient& client, const CompletionRequest& request,
                                const RetryPolicy& policy) {
    auto delay = policy.base_delay;
    for (int attempt = 0;; ++attempt) {
        try {
            return client.complete(request);
        } catch (const TransportError& e) {
            if (attempt >= policy.retries)
                throw CompletionFailure("completion failed after " + std::to_string(attempt + 1) +
                                        " attempts: " + e.what());
        }
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

}  // namespace gtrx::extraction

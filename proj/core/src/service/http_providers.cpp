#include "ideation/service/http_providers.hpp"

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "ideation/error.hpp"

namespace ideation::service {

using nlohmann::json;

Endpoint parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorCode::Config, "endpoint '" + url + "' lacks a scheme");
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        fail(ErrorCode::Config, "endpoint '" + url + "' must use http or https");
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (e.origin.size() <= scheme_end + 3) fail(ErrorCode::Config, "endpoint '" + url + "' lacks a host");
    return e;
}

namespace {

std::unique_ptr<httplib::Client> client_for(const Endpoint& e, std::chrono::milliseconds timeout) {
    auto c = std::make_unique<httplib::Client>(e.origin);
    auto secs = static_cast<time_t>(timeout.count() / 1000);
    auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    c->set_connection_timeout(secs, usecs);
    c->set_read_timeout(secs, usecs);
    c->set_write_timeout(secs, usecs);
    return c;
}

[[noreturn]] void transport_failure(httplib::Error err, const std::string& what) {
    auto msg = what + ": " + httplib::to_string(err);
    switch (err) {
        case httplib::Error::Read:
        case httplib::Error::ConnectionTimeout:
            fail(ErrorCode::Timeout, msg);
        case httplib::Error::Connection:
        case httplib::Error::Write:
        case httplib::Error::SSLConnection:
        case httplib::Error::ProxyConnection:
            fail(ErrorCode::ProviderUnreachable, msg);
        default:
            fail(ErrorCode::ProviderRejected, msg);
    }
}

[[noreturn]] void status_failure(int status, const std::string& body, const std::string& what) {
    auto msg = what + ": HTTP " + std::to_string(status) + " " + body.substr(0, 200);
    if (status == 429 || status >= 500) fail(ErrorCode::ProviderUnreachable, msg);
    fail(ErrorCode::ProviderRejected, msg);
}

httplib::Headers auth_headers(const std::string& token) {
    httplib::Headers h;
    if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
    return h;
}

std::string join_path(const std::string& base, const std::string& suffix) {
    if (base.size() >= suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
        return base;
    std::string b = base;
    while (!b.empty() && b.back() == '/') b.pop_back();
    return b + suffix;
}

const char* openai_role(agents::Role r) {
    switch (r) {
        case agents::Role::System: return "system";
        case agents::Role::Human: return "user";
        case agents::Role::Ai: return "assistant";
    }
    return "user";
}

}  // namespace

OpenAiChatProvider::OpenAiChatProvider(std::string id, const std::string& endpoint, std::string token,
                                       std::chrono::milliseconds timeout)
    : id_(std::move(id)), endpoint_(parse_endpoint(endpoint)), token_(std::move(token)), timeout_(timeout) {
    endpoint_.path = join_path(endpoint_.path, "/v1/chat/completions");
}

agents::ChatResponse OpenAiChatProvider::chat(const agents::ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", openai_role(m.role)}, {"content", m.text}});
    json body = {{"model", request.model},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_output_tokens},
                 {"messages", std::move(messages)}};
    auto client = client_for(endpoint_, timeout_);
    auto res = client->Post(endpoint_.path, auth_headers(token_), body.dump(), "application/json");
    const std::string what = id_ + " " + request.template_id;
    if (!res) transport_failure(res.error(), what);
    if (res->status != 200) status_failure(res->status, res->body, what);
    try {
        auto j = json::parse(res->body);
        agents::ChatResponse out;
        const auto& content = j.at("choices").at(0).at("message").at("content");
        out.text = content.is_null() ? std::string() : content.get<std::string>();
        if (j.contains("usage") && j.at("usage").is_object()) {
            out.usage.prompt_tokens = j.at("usage").value("prompt_tokens", std::size_t{0});
            out.usage.completion_tokens = j.at("usage").value("completion_tokens", std::size_t{0});
        }
        return out;
    } catch (const json::exception& e) {
        fail(ErrorCode::ProviderRejected, what + ": malformed response: " + e.what());
    }
}

bool OpenAiChatProvider::reachable() {
    auto client = client_for(endpoint_, std::chrono::milliseconds(2000));
    auto res = client->Get("/");
    return static_cast<bool>(res);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(const std::string& endpoint, std::string model, std::string token,
                                             std::size_t dimension, std::chrono::milliseconds timeout)
    : endpoint_(parse_endpoint(endpoint)),
      model_(std::move(model)),
      token_(std::move(token)),
      dimension_(dimension),
      timeout_(timeout) {}

std::vector<std::vector<float>> HttpEmbeddingProvider::embed(std::span<const corpus::EmbeddingInput> inputs) {
    json arr = json::array();
    for (const auto& in : inputs) arr.push_back({{"title", in.title}, {"abstract", in.abstract}});
    json body = {{"model", model_}, {"inputs", std::move(arr)}};
    auto client = client_for(endpoint_, timeout_);
    auto res = client->Post(endpoint_.path, auth_headers(token_), body.dump(), "application/json");
    if (!res) transport_failure(res.error(), "embedding endpoint");
    if (res->status != 200) status_failure(res->status, res->body, "embedding endpoint");
    try {
        return json::parse(res->body).at("vectors").get<std::vector<std::vector<float>>>();
    } catch (const json::exception& e) {
        fail(ErrorCode::ProviderRejected, std::string("embedding endpoint: malformed response: ") + e.what());
    }
}

bool HttpEmbeddingProvider::reachable() {
    auto client = client_for(endpoint_, std::chrono::milliseconds(2000));
    return static_cast<bool>(client->Get("/"));
}

}  // namespace ideation::service

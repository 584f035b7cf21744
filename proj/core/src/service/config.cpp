#include "ideation/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "ideation/error.hpp"
#include "ideation/docproc/tokenizer.hpp"
#include "ideation/text.hpp"

namespace ideation::service {

using nlohmann::json;

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

    const json* object(const json& j, const std::string& key, const std::string& path) {
        if (!j.contains(key)) return nullptr;
        if (!j.at(key).is_object()) {
            problems_.push_back(path + ": expected an object");
            return nullptr;
        }
        return &j.at(key);
    }

    void string(const json& j, const std::string& key, const std::string& path, std::string& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string())
            problems_.push_back(path + ": expected a string");
        else
            out = j.at(key).get<std::string>();
    }

    template <typename Int>
    void integer(const json& j, const std::string& key, const std::string& path, Int& out, long long min,
                 long long max) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > max) {
            problems_.push_back(path + ": expected an integer in [" + std::to_string(min) + ", " +
                                std::to_string(max) + "]");
            return;
        }
        out = static_cast<Int>(v.get<long long>());
    }

    void number(const json& j, const std::string& key, const std::string& path, double& out, double min,
                double max) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number() || v.get<double>() < min || v.get<double>() > max) {
            problems_.push_back(path + ": expected a number in [" + std::to_string(min) + ", " +
                                std::to_string(max) + "]");
            return;
        }
        out = v.get<double>();
    }

    void add(std::string problem) { problems_.push_back(std::move(problem)); }

private:
    std::vector<std::string>& problems_;
};

constexpr long long kBig = 1'000'000'000;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
}

void read_persona(Reader& r, const json& j, const std::string& path, agents::PersonaConfig& out) {
    r.string(j, "provider", path + ".provider", out.provider_id);
    r.string(j, "model", path + ".model", out.model_name);
    r.number(j, "temperature", path + ".temperature", out.temperature, 0.0, 2.0);
    r.integer(j, "max_output_tokens", path + ".max_output_tokens", out.max_output_tokens, 1, 1'000'000);
}

}  // namespace

ServiceConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    std::vector<std::string> problems;
    Reader r(problems);
    ServiceConfig c;
    if (!j.is_object()) fail(ErrorCode::Config, "config: expected a JSON object");

    std::string s;
    r.string(j, "corpus", "corpus", s);
    if (!s.empty()) c.corpus = resolve(base_dir, s);
    s.clear();
    r.string(j, "session_dir", "session_dir", s);
    if (!s.empty()) c.session_dir = resolve(base_dir, s);
    if (j.contains("durable")) {
        if (!j.at("durable").is_boolean())
            r.add("durable: expected a boolean");
        else
            c.durable = j.at("durable").get<bool>();
    }

    auto& e = c.engine;
    if (auto* rt = r.object(j, "retrieval", "retrieval")) {
        r.integer(*rt, "k_papers", "retrieval.k_papers", e.k_papers, 1, kBig);
        r.integer(*rt, "k_per_problem", "retrieval.k_per_problem", e.k_per_problem, 1, kBig);
        r.integer(*rt, "k_small", "retrieval.k_small", e.k_small, 1, kBig);
    }
    if (auto* dp = r.object(j, "docproc", "docproc")) {
        r.integer(*dp, "max_tokens", "docproc.max_tokens", e.max_tokens, 1, kBig);
        r.string(*dp, "tokenizer", "docproc.tokenizer", e.tokenizer);
        try {
            docproc::make_tokenizer(e.tokenizer);
        } catch (const Error& err) {
            r.add(std::string("docproc.tokenizer: ") + err.what());
        }
    }
    if (auto* wf = r.object(j, "workflow", "workflow")) {
        r.integer(*wf, "loop_cap", "workflow.loop_cap", e.loop_cap, 0, 1000);
        r.integer(*wf, "n_methods", "workflow.n_methods", e.n_methods, 1, 1000);
        r.integer(*wf, "max_fanout", "workflow.max_fanout", e.max_fanout, 1, 1024);
    }

    if (auto* em = r.object(j, "embedding", "embedding")) {
        r.string(*em, "kind", "embedding.kind", c.embedding.kind);
        r.integer(*em, "dimension", "embedding.dimension", c.embedding.dimension, 1, 1'000'000);
        r.string(*em, "endpoint", "embedding.endpoint", c.embedding.endpoint);
        r.string(*em, "model", "embedding.model", c.embedding.model);
        r.string(*em, "token_env", "embedding.token_env", c.embedding.token_env);
        r.integer(*em, "timeout_ms", "embedding.timeout_ms", c.embedding.timeout_ms, 1, 3'600'000);
        if (c.embedding.kind != "hash" && c.embedding.kind != "http")
            r.add("embedding.kind: expected \"hash\" or \"http\"");
        if (c.embedding.kind == "http" && c.embedding.endpoint.empty())
            r.add("embedding.endpoint: required for kind \"http\"");
    }

    if (j.contains("providers")) {
        if (!j.at("providers").is_array()) {
            r.add("providers: expected an array");
        } else {
            std::size_t i = 0;
            for (const auto& pj : j.at("providers")) {
                const std::string path = "providers[" + std::to_string(i++) + "]";
                if (!pj.is_object()) {
                    r.add(path + ": expected an object");
                    continue;
                }
                ProviderConfig p;
                r.string(pj, "id", path + ".id", p.id);
                r.string(pj, "kind", path + ".kind", p.kind);
                r.string(pj, "endpoint", path + ".endpoint", p.endpoint);
                r.string(pj, "token_env", path + ".token_env", p.token_env);
                r.integer(pj, "timeout_ms", path + ".timeout_ms", p.timeout_ms, 1, 3'600'000);
                r.integer(pj, "max_concurrency", path + ".max_concurrency", p.max_concurrency, 1, 1024);
                std::string fx;
                r.string(pj, "fixtures", path + ".fixtures", fx);
                if (!fx.empty()) p.fixtures = resolve(base_dir, fx);
                if (p.id.empty()) r.add(path + ".id: required");
                if (p.kind == "openai-chat") {
                    if (p.endpoint.empty()) r.add(path + ".endpoint: required for kind \"openai-chat\"");
                } else if (p.kind == "scripted") {
                    if (p.fixtures.empty()) r.add(path + ".fixtures: required for kind \"scripted\"");
                } else {
                    r.add(path + ".kind: expected \"openai-chat\" or \"scripted\"");
                }
                for (const auto& other : c.providers)
                    if (other.id == p.id && !p.id.empty()) r.add(path + ".id: duplicate provider id '" + p.id + "'");
                c.providers.push_back(std::move(p));
            }
        }
    }

    if (auto* ps = r.object(j, "personas", "personas")) {
        if (auto* col = r.object(*ps, "colleague", "personas.colleague"))
            read_persona(r, *col, "personas.colleague", c.colleague);
        if (auto* men = r.object(*ps, "mentor", "personas.mentor")) read_persona(r, *men, "personas.mentor", c.mentor);
    }
    for (auto* pc : {&c.colleague, &c.mentor}) {
        if (pc->provider_id.empty()) continue;
        bool known = false;
        for (const auto& p : c.providers) known = known || p.id == pc->provider_id;
        if (!known)
            r.add(std::string("personas.") + std::string(agents::to_string(pc->persona)) +
                  ".provider: unknown provider '" + pc->provider_id + "'");
    }

    if (auto* rt = r.object(j, "retry", "retry")) {
        r.integer(*rt, "call_budget", "retry.call_budget", c.retry.call_budget, 1, 100);
        long long base = c.retry.base_backoff.count(), max = c.retry.max_backoff.count();
        r.integer(*rt, "base_backoff_ms", "retry.base_backoff_ms", base, 0, 600'000);
        r.integer(*rt, "max_backoff_ms", "retry.max_backoff_ms", max, 0, 600'000);
        c.retry.base_backoff = std::chrono::milliseconds(base);
        c.retry.max_backoff = std::chrono::milliseconds(max);
    }
    e.call_budget = c.retry.call_budget;

    if (auto* sv = r.object(j, "server", "server")) {
        r.string(*sv, "host", "server.host", c.server.host);
        r.integer(*sv, "port", "server.port", c.server.port, 0, 65535);
        r.string(*sv, "token_env", "server.token_env", c.server.token_env);
    }

    if (!problems.empty()) fail(ErrorCode::Config, "invalid config:\n  " + text::join(problems, "\n  "));
    return c;
}

ServiceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

std::string require_env(const std::string& variable, const std::string& purpose) {
    const char* v = std::getenv(variable.c_str());
    if (v == nullptr || *v == '\0')
        fail(ErrorCode::Config, "environment variable " + variable + " (" + purpose + ") is not set");
    return v;
}

}  // namespace ideation::service

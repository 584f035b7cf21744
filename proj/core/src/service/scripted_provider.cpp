#include "ideation/service/scripted_provider.hpp"

#include <fstream>

#include "ideation/text.hpp"

namespace ideation::service {

using nlohmann::json;

namespace {

ErrorCode error_from_string(const std::string& s) {
    if (s == "timeout") return ErrorCode::Timeout;
    if (s == "unreachable") return ErrorCode::ProviderUnreachable;
    if (s == "provider" || s == "rejected") return ErrorCode::ProviderRejected;
    fail(ErrorCode::Config, "fixture error must be \"timeout\", \"unreachable\" or \"rejected\", got '" + s + "'");
}

std::string joined(const agents::ChatRequest& r) {
    std::string out;
    for (const auto& m : r.messages) {
        if (!out.empty()) out += "\n\n";
        out += m.text;
    }
    return out;
}

}  // namespace

Fixture fixture_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::Config, "fixture must be an object");
    Fixture f;
    try {
        if (j.contains("template")) f.template_id = j.at("template").get<std::string>();
        if (j.contains("contains")) {
            if (j.at("contains").is_string())
                f.contains.push_back(j.at("contains").get<std::string>());
            else
                f.contains = j.at("contains").get<std::vector<std::string>>();
        }
        if (j.contains("match")) f.match = j.at("match").get<std::string>();
        if (j.contains("response")) f.responses.push_back(j.at("response").get<std::string>());
        if (j.contains("responses")) f.responses = j.at("responses").get<std::vector<std::string>>();
        if (j.contains("error")) f.error = error_from_string(j.at("error").get<std::string>());
        if (j.contains("fail_first")) f.fail_first = j.at("fail_first").get<std::size_t>();
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, std::string("bad fixture: ") + e.what());
    }
    if (f.responses.empty() && !f.error) fail(ErrorCode::Config, "fixture has neither responses nor an error");
    if (f.fail_first > 0 && !f.error) f.error = ErrorCode::Timeout;
    return f;
}

std::vector<Fixture> fixtures_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("fixtures") ? j.at("fixtures") : j;
    if (!arr.is_array()) fail(ErrorCode::Config, "fixtures must be an array");
    std::vector<Fixture> out;
    for (const auto& f : arr) out.push_back(fixture_from_json(f));
    return out;
}

std::vector<Fixture> load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot read fixtures " + path.string());
    try {
        return fixtures_from_json(json::parse(in));
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, path.string() + ": " + e.what());
    }
}

ScriptedProvider::ScriptedProvider(std::string id, std::vector<Fixture> fixtures) : id_(std::move(id)) {
    for (auto& f : fixtures) {
        Entry e{std::move(f), std::nullopt, 0};
        if (e.fixture.match) {
            try {
                e.regex.emplace(*e.fixture.match, std::regex::ECMAScript);
            } catch (const std::regex_error& ex) {
                fail(ErrorCode::Config, "bad fixture regex '" + *e.fixture.match + "': " + ex.what());
            }
        }
        entries_.push_back(std::move(e));
    }
}

agents::ChatResponse ScriptedProvider::chat(const agents::ChatRequest& request) {
    const std::string text = joined(request);
    std::lock_guard lock(mutex_);
    ++calls_;
    for (auto& e : entries_) {
        const auto& f = e.fixture;
        if (f.template_id && *f.template_id != request.template_id) continue;
        bool ok = true;
        for (const auto& c : f.contains) ok = ok && text.find(c) != std::string::npos;
        if (!ok) continue;
        if (e.regex && !std::regex_search(text, *e.regex)) continue;
        const std::size_t n = e.served++;
        if (f.error && (f.responses.empty() || n < f.fail_first))
            fail(*f.error, "scripted " + std::string(to_string(*f.error)) + " for " + request.template_id);
        const auto& resp = f.responses[std::min(n - f.fail_first, f.responses.size() - 1)];
        agents::ChatResponse r;
        r.text = resp;
        r.usage.prompt_tokens = text::split_whitespace(text).size();
        r.usage.completion_tokens = text::split_whitespace(resp).size();
        return r;
    }
    ++misses_;
    std::string excerpt = text.substr(0, 160);
    fail(ErrorCode::FixtureMiss, "no fixture for " + request.template_id + " call: " + text::collapse_whitespace(excerpt));
}

std::size_t ScriptedProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t ScriptedProvider::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

std::vector<std::size_t> ScriptedProvider::hits() const {
    std::lock_guard lock(mutex_);
    std::vector<std::size_t> out;
    for (const auto& e : entries_) out.push_back(e.served);
    return out;
}

}  // namespace ideation::service

#include <gtest/gtest.h>

#include "ideation/error.hpp"
#include "ideation/service/hash_embedding.hpp"
#include "ideation/service/scripted_provider.hpp"

using namespace ideation;
using namespace ideation::service;
using nlohmann::json;

namespace {

agents::ChatRequest request(std::string template_id, std::string text) {
    agents::ChatRequest r;
    r.template_id = std::move(template_id);
    r.messages = {{agents::Role::Human, std::move(text)}};
    return r;
}

ErrorCode code_of(ScriptedProvider& p, const agents::ChatRequest& r) {
    try {
        p.chat(r);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "call succeeded";
    return ErrorCode::Io;
}

}  // namespace

TEST(HashEmbedding, DeterministicAndNormalized) {
    HashEmbeddingProvider a(64), b(64);
    auto va = a.embed_text("Graph neural networks for molecules");
    EXPECT_EQ(va, b.embed_text("graph  NEURAL networks, for molecules!"));
    EXPECT_NEAR(corpus::l2_norm(va), 1.0, 1e-6);
    EXPECT_EQ(va.size(), 64u);
    EXPECT_EQ(a.model_id(), b.model_id());
    EXPECT_NE(a.model_id(), HashEmbeddingProvider(128).model_id());

    std::vector<corpus::EmbeddingInput> in = {{"graph networks", "molecules"}, {"", ""}};
    auto out = a.embed(in);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_GT(corpus::cosine(out[0], va), 0.5);
    EXPECT_EQ(content_words("The model of the world"), (std::vector<std::string>{"model", "world"}));
}

TEST(HashEmbedding, UnrelatedTextIsFarther) {
    HashEmbeddingProvider e(256);
    auto q = e.embed_text("protein folding structure prediction");
    auto near = e.embed_text("predicting protein structure with folding models");
    auto far = e.embed_text("stock market volatility forecasting");
    EXPECT_GT(corpus::cosine(q, near), corpus::cosine(q, far));
}

TEST(Scripted, FixturesInOrderLastRepeats) {
    ScriptedProvider p("fx", fixtures_from_json(json::parse(R"([
        {"template": "P3", "contains": ["alpha", "beta"], "responses": ["one", "two"]},
        {"template": "P3", "match": "gam+a", "response": "regex"},
        {"template": "P3", "response": "default"}
    ])")));
    EXPECT_EQ(p.chat(request("P3", "alpha and beta")).text, "one");
    EXPECT_EQ(p.chat(request("P3", "beta alpha")).text, "two");
    EXPECT_EQ(p.chat(request("P3", "alpha beta")).text, "two");
    EXPECT_EQ(p.chat(request("P3", "gammma")).text, "regex");
    EXPECT_EQ(p.chat(request("P3", "alpha only")).text, "default");
    EXPECT_EQ(code_of(p, request("P4", "alpha beta")), ErrorCode::FixtureMiss);
    EXPECT_EQ(p.calls(), 6u);
    EXPECT_EQ(p.misses(), 1u);
    EXPECT_EQ(p.hits(), (std::vector<std::size_t>{3, 1, 1}));
}

TEST(Scripted, FailFirstThenServe) {
    ScriptedProvider p("fx", fixtures_from_json(json::parse(R"({"fixtures": [
        {"fail_first": 2, "error": "unreachable", "response": "ok"},
        {"template": "never", "error": "rejected"}
    ]})")));
    EXPECT_EQ(code_of(p, request("P1", "x")), ErrorCode::ProviderUnreachable);
    EXPECT_EQ(code_of(p, request("P1", "x")), ErrorCode::ProviderUnreachable);
    EXPECT_EQ(p.chat(request("P1", "x")).text, "ok");

    ScriptedProvider always("fx", fixtures_from_json(json::parse(R"([{"error": "timeout"}])")));
    EXPECT_EQ(code_of(always, request("P1", "x")), ErrorCode::Timeout);
    EXPECT_EQ(code_of(always, request("P1", "x")), ErrorCode::Timeout);
}

TEST(Scripted, BadFixtures) {
    EXPECT_THROW(fixture_from_json(json::parse(R"({"template": "P1"})")), Error);
    EXPECT_THROW(fixture_from_json(json::parse(R"({"error": "weird"})")), Error);
    EXPECT_THROW(fixture_from_json(json::parse(R"({"contains": 3, "response": "x"})")), Error);
    EXPECT_THROW(ScriptedProvider("fx", {fixture_from_json(json::parse(R"({"match": "(", "response": "x"})"))}),
                 Error);
}

#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "ideation/agents/prompt_template.hpp"
#include "ideation/agents/runtime.hpp"
#include "ideation/error.hpp"

using namespace ideation;
using namespace ideation::agents;
using std::chrono::milliseconds;

namespace {

class FlakyProvider : public LlmProvider {
public:
    FlakyProvider(std::string id, int failures, ErrorCode code) : id_(std::move(id)), failures_(failures), code_(code) {}
    std::string id() const override { return id_; }
    ChatResponse chat(const ChatRequest& r) override {
        std::lock_guard lock(mutex_);
        last_ = r;
        if (++calls_ <= failures_) fail(code_, "transient failure " + std::to_string(calls_));
        return {"ok from " + id_, {3, 2}};
    }
    int calls() const { return calls_; }
    ChatRequest last() const { return last_; }

private:
    std::string id_;
    int failures_;
    ErrorCode code_;
    int calls_ = 0;
    ChatRequest last_;
    mutable std::mutex mutex_;
};

class SlowProvider : public LlmProvider {
public:
    std::string id() const override { return "slow"; }
    ChatResponse chat(const ChatRequest&) override {
        int now = ++in_flight;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {}
        std::this_thread::sleep_for(milliseconds(10));
        --in_flight;
        return {"done", {}};
    }
    std::atomic<int> in_flight{0}, peak{0};
};

struct Fixture {
    AgentRuntime rt;
    std::vector<milliseconds> sleeps;
    std::shared_ptr<FlakyProvider> a, b;

    Fixture(int failures, ErrorCode code) {
        a = std::make_shared<FlakyProvider>("a", failures, code);
        b = std::make_shared<FlakyProvider>("b", 0, code);
        rt.register_provider(a);
        rt.register_provider(b);
        rt.configure({Persona::Colleague, "a", "small-model", 0.0, 256});
        rt.configure({Persona::Mentor, "b", "large-model", 0.2, 512});
        rt.retry_policy() = {3, milliseconds(100), milliseconds(150)};
        rt.set_sleeper([this](milliseconds d) { sleeps.push_back(d); });
    }
};

std::vector<Message> msgs() { return {{Role::Human, "hello"}}; }

}  // namespace

TEST(Runtime, RoutesPersonasToTheirProviders) {
    Fixture f(0, ErrorCode::Timeout);
    ASSERT_TRUE(f.rt.ready());
    auto r = f.rt.complete(Persona::Mentor, "P4", msgs(), 3);
    EXPECT_EQ(r.text, "ok from b");
    EXPECT_EQ(r.provider_id, "b");
    EXPECT_EQ(r.attempts, 1);
    EXPECT_EQ(f.b->last().model, "large-model");
    EXPECT_EQ(f.b->last().max_output_tokens, 512);
    EXPECT_EQ(f.b->last().template_id, "P4");
    auto c = f.rt.complete(TemplateId::P3, msgs());
    EXPECT_EQ(c.provider_id, "a");
    EXPECT_EQ(c.usage.prompt_tokens, 3u);
}

TEST(Runtime, RetriesTransientFailuresWithBackoff) {
    Fixture f(2, ErrorCode::Timeout);
    auto r = f.rt.complete(Persona::Colleague, "P3", msgs(), 3);
    EXPECT_EQ(r.attempts, 3);
    EXPECT_EQ(f.a->calls(), 3);
    ASSERT_EQ(f.sleeps.size(), 2u);
    EXPECT_EQ(f.sleeps[0], milliseconds(100));
    EXPECT_EQ(f.sleeps[1], milliseconds(150));  // capped
}

TEST(Runtime, BudgetExhaustion) {
    Fixture f(10, ErrorCode::ProviderUnreachable);
    try {
        f.rt.complete(Persona::Colleague, "P3", msgs(), 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BudgetExhausted);
        EXPECT_NE(std::string(e.what()).find("transient failure 3"), std::string::npos);
    }
    EXPECT_EQ(f.a->calls(), 3);
}

TEST(Runtime, NonRetryableFailuresSurfaceImmediately) {
    Fixture f(10, ErrorCode::ProviderRejected);
    try {
        f.rt.complete(Persona::Colleague, "P3", msgs(), 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProviderRejected);
    }
    EXPECT_EQ(f.a->calls(), 1);
    EXPECT_TRUE(f.sleeps.empty());
}

TEST(Runtime, UnconfiguredPersona) {
    AgentRuntime rt;
    EXPECT_FALSE(rt.ready());
    try {
        rt.complete(Persona::Mentor, "P4", msgs(), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionFailed);
    }
    rt.configure({Persona::Mentor, "missing", "m", 0.0, 10});
    EXPECT_THROW(rt.complete(Persona::Mentor, "P4", msgs(), 1), Error);
    EXPECT_THROW(rt.configure({Persona::Mentor, "x", "m", -1.0, 10}), Error);
}

TEST(Runtime, ConcurrencyIsBoundedPerProvider) {
    AgentRuntime rt;
    auto slow = std::make_shared<SlowProvider>();
    rt.register_provider(slow, 2);
    rt.configure({Persona::Colleague, "slow", "m", 0.0, 10});
    rt.configure({Persona::Mentor, "slow", "m", 0.0, 10});
    {
        std::vector<std::jthread> callers;
        for (int i = 0; i < 8; ++i) callers.emplace_back([&] { rt.complete(Persona::Colleague, "P3", msgs(), 1); });
    }
    EXPECT_LE(slow->peak.load(), 2);
    EXPECT_GE(slow->peak.load(), 1);
}

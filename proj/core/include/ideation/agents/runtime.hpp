#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "ideation/agents/message.hpp"
#include "ideation/agents/prompt_template.hpp"

namespace ideation::agents {

struct PersonaConfig {
    Persona persona = Persona::Colleague;
    std::string provider_id;
    std::string model_name;
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

struct ChatRequest {
    std::string template_id;
    Persona persona = Persona::Colleague;
    std::string model;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::vector<Message> messages;
};

struct Usage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    Usage usage;
};

/// Chat-style model endpoint. Implementations signal failures with
/// ideation::Error: Timeout / ProviderUnreachable are retried by the
/// runtime, anything else is surfaced immediately. Must be thread-safe.
class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string id() const = 0;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
    virtual bool reachable() { return true; }
};

struct RetryPolicy {
    int call_budget = 3;  // attempts per logical call, including the first
    std::chrono::milliseconds base_backoff{200};
    std::chrono::milliseconds max_backoff{5000};
};

struct CompletionResult {
    std::string text;
    Usage usage;
    Persona persona = Persona::Colleague;
    std::string template_id;
    std::string provider_id;
    std::chrono::milliseconds latency{0};
    int attempts = 0;
};

/// Routes rendered prompts to the provider configured for each persona.
///
/// `complete` may be called concurrently; each provider admits at most its
/// registered concurrency limit of in-flight calls.
class AgentRuntime {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;
    using Timer = std::function<std::chrono::steady_clock::time_point()>;

    AgentRuntime();
    ~AgentRuntime();
    AgentRuntime(const AgentRuntime&) = delete;
    AgentRuntime& operator=(const AgentRuntime&) = delete;

    void register_provider(std::shared_ptr<LlmProvider> provider, std::size_t max_concurrency = 4);
    void configure(PersonaConfig config);

    /// Both personas configured with registered providers.
    bool ready() const noexcept;
    const PersonaConfig& persona(Persona p) const;
    std::shared_ptr<LlmProvider> provider(std::string_view id) const;
    std::vector<std::string> provider_ids() const;

    RetryPolicy& retry_policy() noexcept { return retry_; }
    const RetryPolicy& retry_policy() const noexcept { return retry_; }

    /// Test hook: replaces the backoff sleep.
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
    /// Clock for reported latencies; a constant one makes logs reproducible.
    void set_timer(Timer timer) { timer_ = std::move(timer); }

    /// Retries retryable failures up to `call_budget` attempts with
    /// exponential backoff, then throws BudgetExhausted. Throws
    /// PreconditionFailed if the persona is not configured.
    CompletionResult complete(Persona persona, std::string_view template_id,
                              std::vector<Message> messages, int call_budget) const;

    /// Uses the template's persona and the default budget.
    CompletionResult complete(TemplateId id, std::vector<Message> messages) const;

private:
    struct Slot {
        std::shared_ptr<LlmProvider> provider;
        std::unique_ptr<std::counting_semaphore<1024>> gate;
    };

    std::map<std::string, Slot, std::less<>> providers_;
    std::optional<PersonaConfig> colleague_;
    std::optional<PersonaConfig> mentor_;
    RetryPolicy retry_;
    Sleeper sleeper_;
    Timer timer_ = [] { return std::chrono::steady_clock::now(); };
};

}  // namespace ideation::agents

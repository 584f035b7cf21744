#include "ideation/agents/runtime.hpp"

#include <algorithm>
#include <thread>

#include "ideation/error.hpp"

namespace ideation::agents {

AgentRuntime::AgentRuntime()
    : sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

AgentRuntime::~AgentRuntime() = default;

void AgentRuntime::register_provider(std::shared_ptr<LlmProvider> provider, std::size_t max_concurrency) {
    if (!provider) fail(ErrorCode::InvalidArgument, "null provider");
    const auto limit = static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_concurrency, 1, 1024));
    auto id = provider->id();
    providers_[id] = Slot{std::move(provider), std::make_unique<std::counting_semaphore<1024>>(limit)};
}

void AgentRuntime::configure(PersonaConfig config) {
    if (config.temperature < 0.0) fail(ErrorCode::InvalidArgument, "temperature must be >= 0");
    if (config.persona == Persona::Colleague)
        colleague_ = std::move(config);
    else
        mentor_ = std::move(config);
}

bool AgentRuntime::ready() const noexcept {
    return colleague_ && mentor_ && providers_.contains(colleague_->provider_id) &&
           providers_.contains(mentor_->provider_id);
}

const PersonaConfig& AgentRuntime::persona(Persona p) const {
    const auto& cfg = p == Persona::Colleague ? colleague_ : mentor_;
    if (!cfg) fail(ErrorCode::PreconditionFailed, std::string(to_string(p)) + " persona is not configured");
    return *cfg;
}

std::shared_ptr<LlmProvider> AgentRuntime::provider(std::string_view id) const {
    auto it = providers_.find(id);
    return it == providers_.end() ? nullptr : it->second.provider;
}

std::vector<std::string> AgentRuntime::provider_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : providers_) ids.push_back(id);
    return ids;
}

CompletionResult AgentRuntime::complete(Persona persona, std::string_view template_id,
                                        std::vector<Message> messages, int call_budget) const {
    const auto& cfg = this->persona(persona);
    auto it = providers_.find(cfg.provider_id);
    if (it == providers_.end())
        fail(ErrorCode::PreconditionFailed, "provider '" + cfg.provider_id + "' for the " +
                                                std::string(to_string(persona)) + " is not registered");
    auto& slot = it->second;

    ChatRequest request{std::string(template_id), persona, cfg.model_name, cfg.temperature,
                        cfg.max_output_tokens, std::move(messages)};
    const auto budget = std::max(call_budget, 1);
    const auto started = timer_();
    std::string last_error;
    for (int attempt = 1; attempt <= budget; ++attempt) {
        try {
            slot.gate->acquire();
            struct Release {
                std::counting_semaphore<1024>& s;
                ~Release() { s.release(); }
            } release{*slot.gate};
            auto response = slot.provider->chat(request);
            return CompletionResult{
                std::move(response.text), response.usage, persona, request.template_id, cfg.provider_id,
                std::chrono::duration_cast<std::chrono::milliseconds>(timer_() - started),
                attempt};
        } catch (const Error& e) {
            if (!e.retryable()) throw;
            last_error = e.what();
        }
        if (attempt < budget) {
            auto delay = retry_.base_backoff * (1LL << std::min(attempt - 1, 20));
            sleeper_(std::min<std::chrono::milliseconds>(delay, retry_.max_backoff));
        }
    }
    fail(ErrorCode::BudgetExhausted, "call budget of " + std::to_string(budget) + " exhausted for " +
                                         request.template_id + ": " + last_error);
}

CompletionResult AgentRuntime::complete(TemplateId id, std::vector<Message> messages) const {
    return complete(persona_for(id), to_string(id), std::move(messages), retry_.call_budget);
}

}  // namespace ideation::agents

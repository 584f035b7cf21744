#include "ideation/agents/message.hpp"

#include "ideation/error.hpp"

namespace ideation::agents {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::System: return "system";
        case Role::Human: return "human";
        case Role::Ai: return "ai";
    }
    return "human";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::System;
    if (s == "human" || s == "user") return Role::Human;
    if (s == "ai" || s == "assistant") return Role::Ai;
    fail(ErrorCode::ParseError, "unknown message role '" + std::string(s) + "'");
}

std::string_view to_string(Persona persona) noexcept {
    return persona == Persona::Colleague ? "colleague" : "mentor";
}

Persona persona_from_string(std::string_view s) {
    if (s == "colleague") return Persona::Colleague;
    if (s == "mentor") return Persona::Mentor;
    fail(ErrorCode::ParseError, "unknown persona '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const Message& m) {
    j = nlohmann::json{{"role", to_string(m.role)}, {"text", m.text}};
}

void from_json(const nlohmann::json& j, Message& m) {
    m.role = role_from_string(j.at("role").get<std::string>());
    m.text = j.at("text").get<std::string>();
}

std::string format_transcript(const std::vector<Message>& messages) {
    std::string out;
    for (const auto& m : messages) {
        if (!out.empty()) out += "\n\n";
        switch (m.role) {
            case Role::System: out += "System Message:\n"; break;
            case Role::Human: out += "Human Message:\n"; break;
            case Role::Ai: out += "AI Message:\n"; break;
        }
        out += m.text;
    }
    return out;
}

}  // namespace ideation::agents

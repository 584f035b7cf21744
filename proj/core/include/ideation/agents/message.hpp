#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ideation::agents {

enum class Role { System, Human, Ai };

struct Message {
    Role role = Role::Human;
    std::string text;

    bool operator==(const Message&) const = default;
};

/// Agent tier. The colleague handles extraction and grounded QA; the mentor
/// handles reasoning-heavy generation and rewriting.
enum class Persona { Colleague, Mentor };

std::string_view to_string(Role role) noexcept;
Role role_from_string(std::string_view s);
std::string_view to_string(Persona persona) noexcept;
Persona persona_from_string(std::string_view s);

void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);

/// "System Message:\n<text>" blocks joined by blank lines: the layout the
/// golden prompt files use.
std::string format_transcript(const std::vector<Message>& messages);

}  // namespace ideation::agents

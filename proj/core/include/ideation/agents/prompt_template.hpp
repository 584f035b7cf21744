#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ideation/agents/message.hpp"

namespace ideation::agents {

enum class TemplateId {
    P1,   // motivation extraction
    P2,   // motivation question generation
    P3,   // motivation validation QA
    P4,   // limitation extraction
    P5,   // proposal rewrite from gaps
    P6,   // research problem extraction
    P7,   // similar problem generation
    P8,   // sub-problem generation
    P9,   // approach question from a problem statement
    P10,  // methodology extraction QA
    P11,  // method synthesis
    Relevance,      // "PX-relevance", not verbatim
    MethodRewrite,  // "PX-method-rewrite", not verbatim
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::P1, TemplateId::P2, TemplateId::P3,  TemplateId::P4,  TemplateId::P5,
    TemplateId::P6, TemplateId::P7, TemplateId::P8,  TemplateId::P9,  TemplateId::P10,
    TemplateId::P11, TemplateId::Relevance, TemplateId::MethodRewrite};

std::string_view to_string(TemplateId id) noexcept;
std::optional<TemplateId> template_from_string(std::string_view s) noexcept;

struct TemplateSegment {
    Role role;
    std::string_view text;  // with {slot} placeholders
};

struct PromptTemplate {
    TemplateId id;
    std::vector<TemplateSegment> segments;
    bool verbatim = true;

    /// Distinct slot names in order of first appearance.
    std::vector<std::string> placeholders() const;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

const PromptTemplate& get_template(TemplateId id);

/// Substitutes every {slot} in every segment. Slot values are inserted as-is
/// and never rescanned. Throws UnboundSlot naming the first missing slot.
std::vector<Message> render_prompt(TemplateId id, const Bindings& bindings);

/// As above; throws UnknownTemplate for an unrecognised id.
std::vector<Message> render_prompt(std::string_view template_id, const Bindings& bindings);

/// Which agent tier runs a template.
Persona persona_for(TemplateId id) noexcept;

}  // namespace ideation::agents

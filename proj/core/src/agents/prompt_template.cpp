#include "ideation/agents/prompt_template.hpp"

#include <algorithm>
#include <cctype>

#include "ideation/error.hpp"

namespace ideation::agents {

namespace {

// P1-P11 wording is fixed and pinned by tests/golden/prompts. P11's method
// count is the {n_methods} slot; binding "3" yields the canonical text.
const std::vector<PromptTemplate>& registry() {
    static const std::vector<PromptTemplate> templates = {
        {TemplateId::P1,
         {
             {Role::System, R"(You are a researcher and trying to understand the following proposal written by another researcher:{proposal})"},
             {Role::Human, R"(Describe in a bulleted list what is not addressed in the current literature which serves as the Motivation behind solving the above research problem proposed in the Proposal. Answer without a heading line and just the bullet points. Each bullet should mention one gap in the literature as a bullet point and not a sentence.)"},
         }},
        {TemplateId::P2,
         {
             {Role::System, R"(You are a researcher and trying to understand the following proposal written by another researcher:{proposal})"},
             {Role::Human, R"(Describe in a bulleted list what is not addressed in the current literature which serves as the Motivation behind solving the above research problem proposed in the Proposal. Answer without a heading line and just the bullet points. Each bullet should mention one gap in the literature as a bullet point and not a sentence.)"},
             {Role::Ai, R"({motivation})"},
             {Role::Human, R"(Convert each of the above bullets in to a binary question. The question should begin with 'Is the research paper'.)"},
         }},
        {TemplateId::P3,
         {
             {Role::System, R"(You are a researcher. You have been given a context, which are paragraphs from a research paper. You have been given a question. Answer the given Question in 'Yes' OR 'No' OR 'Unanswerable'. Answer solely based on the provided context of the research paper. If the question can not be answered with the facts mentioned in the available context or there is any ambiguity in answering the question answer as 'Unanswerable'.
Answer as 'Yes' only when the question can be very clearly answered considering the facts in the research paper provided in the context. Do not repeat the question as the part of the answer.
Provide a concise explanation about how the answer to the question is 'Yes' mentioning the paragraphs used in the context to answer it as ‘Yes’. If the answer is 'No' or 'Unanswerable' only output that with NO description or elaboration.)"},
             {Role::Human, R"(Question: {question}
Research Paper Context: {paper_chunks})"},
         }},
        {TemplateId::P4,
         {
             {Role::System, R"(You are a researcher. You have been given the following proposal: {proposal}

A different research paper provided in the context already addresses the gap mentioned as the motivation behind the proposal.
{descriptions})"},
             {Role::Human, R"(Research Paper: {paper_chunks}

Identify the limitations or gaps of this research paper which can serve as the new motivation for the proposal. Provide a bulleted list of limitations, where each bullet is concise. Answer WITHOUT a heading line and just the bullet points.)"},
         }},
        {TemplateId::P5,
         {
             {Role::System, R"(You are a researcher and have written a proposal: {proposal})"},
             {Role::Human, R"(Re-write the proposal by taking into consideration the mentioned gaps in the current literature as the new motivation behind of the problem defined in the proposal.
Answer in a Single detailed paragraph WITHOUT any bullet points or list.
Gaps in the current literature: {limitations})"},
         }},
        {TemplateId::P6,
         {
             {Role::System, R"(You are a researcher and trying to understand the following proposal written by another researcher:
{proposal})"},
             {Role::Human, R"(What is the problem solved in the proposal?)"},
         }},
        {TemplateId::P7,
         {
             {Role::System, R"(You are a researcher and trying to understand the following proposal written by another researcher:
{proposal})"},
             {Role::Human, R"(What is the problem solved in the proposal?)"},
             {Role::Ai, R"({problem_statement})"},
             {Role::Human, R"(Give me a bulleted list of a more generalised or similar problems to the problem defined in the proposal. Don't give a heading just the answer in a bulleted list.)"},
         }},
        {TemplateId::P8,
         {
             {Role::System, R"(You are a researcher and trying to understand the following proposal written by another researcher:
{proposal})"},
             {Role::Human, R"(What is the problem solved in the proposal?)"},
             {Role::Ai, R"({problem_statement})"},
             {Role::Human, R"(Provide a bulleted list of sub-problems or sub-tasks involved to solve the problem. Don't give a heading just the answer in a bulleted list.)"},
         }},
        {TemplateId::P9,
         {
             {Role::Human, R"({statement}
For the statement given above generate a question to be posed on a research paper to find out if the paper is proposing an approach or method to perform the task defined by the statement. Start the question with: 'Is the research paper proposing an approach or method to'.)"},
         }},
        {TemplateId::P10,
         {
             {Role::System, R"(You are a researcher and trying to answer the question posed on a research paper provided as the context.
Research Paper: {paper_chunks})"},
             {Role::Human, R"(Answer the given Question in 'Yes' OR 'No' OR 'Unanswerable'. Answer solely based on the provided context of the research paper. If the question can not be answered with the facts mentioned in the available context or there is any ambiguity in answering the question, answer as 'Unanswerable'. Answer as 'Yes' only when the question can be very clearly answered considering the facts in the research paper provided in the context. Do not repeat the question as the part of the answer. If the answer to the question is 'Yes', provide detailed  approach or methodology to perform the task. If the answer is 'No' or 'Unanswerable' only output that with NO description.

Question: {question})"},
         }},
        {TemplateId::P11,
         {
             {Role::System, R"(You are a researcher and have been given a proposal and the research problem the proposal is trying to solve. You have been given the approaches in the literature trying to solve, similar problems and sub problems or sub tasks of the problem defined in the proposal. Your task is to synthesize and propose a possible set of methods or approaches to solve the problem defined in the proposal.
Proposal: {proposal}
Research Problem in the Proposal: {problem})"},
             {Role::Human, R"({method_context}

Based on the above information suggest the top {n_methods} possible methods or approaches to solve the problem defined in the proposal.)"},
         }},
        {TemplateId::Relevance,
         {
             {Role::System, R"(You are a researcher and have written a proposal: {proposal})"},
             {Role::Human, R"(Research Paper: {paper}

Describe how the above research paper relates to the proposal. Answer in a Single short paragraph WITHOUT any bullet points or list.)"},
         },
         false},
        {TemplateId::MethodRewrite,
         {
             {Role::System, R"(You are a researcher and have written a proposal: {proposal})"},
             {Role::Human, R"(Re-write the proposal by including the following methods as the proposed approach to solve the problem defined in the proposal.
Answer in a Single detailed paragraph WITHOUT any bullet points or list.
Methods: {methods})"},
         },
         false},
    };
    return templates;
}

bool is_slot_char(char c) noexcept {
    return std::islower(static_cast<unsigned char>(c)) || c == '_';
}

// Calls on_text for literal runs and on_slot for each {name}.
template <typename OnText, typename OnSlot>
void scan_placeholders(std::string_view text, OnText on_text, OnSlot on_slot) {
    std::size_t i = 0;
    std::size_t literal_start = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t j = i + 1;
            while (j < text.size() && is_slot_char(text[j])) ++j;
            if (j > i + 1 && j < text.size() && text[j] == '}') {
                on_text(text.substr(literal_start, i - literal_start));
                on_slot(text.substr(i + 1, j - i - 1));
                i = j + 1;
                literal_start = i;
                continue;
            }
        }
        ++i;
    }
    on_text(text.substr(literal_start));
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::P1: return "P1";
        case TemplateId::P2: return "P2";
        case TemplateId::P3: return "P3";
        case TemplateId::P4: return "P4";
        case TemplateId::P5: return "P5";
        case TemplateId::P6: return "P6";
        case TemplateId::P7: return "P7";
        case TemplateId::P8: return "P8";
        case TemplateId::P9: return "P9";
        case TemplateId::P10: return "P10";
        case TemplateId::P11: return "P11";
        case TemplateId::Relevance: return "PX-relevance";
        case TemplateId::MethodRewrite: return "PX-method-rewrite";
    }
    return "P1";
}

std::optional<TemplateId> template_from_string(std::string_view s) noexcept {
    for (auto id : kAllTemplates)
        if (to_string(id) == s) return id;
    return std::nullopt;
}

std::vector<std::string> PromptTemplate::placeholders() const {
    std::vector<std::string> names;
    for (const auto& seg : segments)
        scan_placeholders(
            seg.text, [](std::string_view) {},
            [&](std::string_view name) {
                if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
            });
    return names;
}

const PromptTemplate& get_template(TemplateId id) {
    for (const auto& t : registry())
        if (t.id == id) return t;
    fail(ErrorCode::UnknownTemplate, "template not registered: " + std::string(to_string(id)));
}

std::vector<Message> render_prompt(TemplateId id, const Bindings& bindings) {
    const auto& tmpl = get_template(id);
    std::vector<Message> messages;
    messages.reserve(tmpl.segments.size());
    for (const auto& seg : tmpl.segments) {
        std::string out;
        scan_placeholders(
            seg.text, [&](std::string_view lit) { out += lit; },
            [&](std::string_view name) {
                auto it = bindings.find(name);
                if (it == bindings.end())
                    fail(ErrorCode::UnboundSlot, "template " + std::string(to_string(id)) +
                                                     ": unbound slot '" + std::string(name) + "'");
                out += it->second;
            });
        messages.push_back({seg.role, std::move(out)});
    }
    return messages;
}

std::vector<Message> render_prompt(std::string_view template_id, const Bindings& bindings) {
    auto id = template_from_string(template_id);
    if (!id) fail(ErrorCode::UnknownTemplate, "unknown template id '" + std::string(template_id) + "'");
    return render_prompt(*id, bindings);
}

Persona persona_for(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::P4:
        case TemplateId::P5:
        case TemplateId::P7:
        case TemplateId::P8:
        case TemplateId::P11:
        case TemplateId::MethodRewrite:
            return Persona::Mentor;
        default:
            return Persona::Colleague;
    }
}

}  // namespace ideation::agents

#include "ideation/workflow/types.hpp"

#include <array>
#include <cctype>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::workflow {

namespace {
constexpr std::array<std::pair<StateTag, std::string_view>, 22> kTags = {{
    {StateTag::MvStart, "MV-Start"},
    {StateTag::MvRetrieved, "MV-Retrieved"},
    {StateTag::GateAPapers, "GateA-Papers"},
    {StateTag::MvChunked, "MV-Chunked"},
    {StateTag::MvMotivationExtracted, "MV-MotivationExtracted"},
    {StateTag::GateBQuestions, "GateB-Questions"},
    {StateTag::MvValidated, "MV-Validated"},
    {StateTag::GateCVerdicts, "GateC-Verdicts"},
    {StateTag::MvGapsExtracted, "MV-GapsExtracted"},
    {StateTag::GateDGaps, "GateD-Gaps"},
    {StateTag::MvRewritten, "MV-Rewritten"},
    {StateTag::GateEProposal, "GateE-Proposal"},
    {StateTag::MsProblemExtracted, "MS-ProblemExtracted"},
    {StateTag::MsRelatedGenerated, "MS-RelatedGenerated"},
    {StateTag::GateFProblems, "GateF-Problems"},
    {StateTag::MsEvidenceGathered, "MS-EvidenceGathered"},
    {StateTag::GateGEvidence, "GateG-Evidence"},
    {StateTag::MsSynthesized, "MS-Synthesized"},
    {StateTag::GateHMethods, "GateH-Methods"},
    {StateTag::MsRewritten, "MS-Rewritten"},
    {StateTag::GateIFinal, "GateI-Final"},
    {StateTag::Done, "Done"},
}};
}  // namespace

std::string_view to_string(StateTag tag) noexcept {
    for (auto [t, s] : kTags)
        if (t == tag) return s;
    return "MV-Start";
}

StateTag state_tag_from_string(std::string_view s) {
    for (auto [t, name] : kTags)
        if (name == s) return t;
    fail(ErrorCode::ParseError, "unknown workflow state '" + std::string(s) + "'");
}

bool is_gate(StateTag tag) noexcept {
    switch (tag) {
        case StateTag::GateAPapers:
        case StateTag::GateBQuestions:
        case StateTag::GateCVerdicts:
        case StateTag::GateDGaps:
        case StateTag::GateEProposal:
        case StateTag::GateFProblems:
        case StateTag::GateGEvidence:
        case StateTag::GateHMethods:
        case StateTag::GateIFinal:
            return true;
        default:
            return false;
    }
}

bool is_terminal(StateTag tag) noexcept { return tag == StateTag::MvValidated || tag == StateTag::Done; }

void to_json(nlohmann::json& j, StateTag t) { j = std::string(to_string(t)); }

void from_json(const nlohmann::json& j, StateTag& t) { t = state_tag_from_string(j.get<std::string>()); }

std::string format_proposal(const Proposal& p) {
    return "Title: " + p.title + "\nAbstract: " + p.abstract;
}

std::string with_question_prefix(std::string_view raw, std::string_view connective) {
    auto t = text::trim(raw);
    if (t.starts_with(kQuestionPrefix)) return std::string(t);
    std::string body(t);
    if (!body.empty()) body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
    while (!body.empty() && (body.back() == '.' || body.back() == '?')) body.pop_back();
    std::string out(kQuestionPrefix);
    out += ' ';
    out += connective;
    if (!connective.empty()) out += ' ';
    out += body;
    out += '?';
    return out;
}

}  // namespace ideation::workflow

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/agents/parsers.hpp"
#include "ideation/json_optional.hpp"

namespace ideation::workflow {

enum class StateTag {
    MvStart,
    MvRetrieved,
    GateAPapers,
    MvChunked,
    MvMotivationExtracted,
    GateBQuestions,
    MvValidated,
    GateCVerdicts,
    MvGapsExtracted,
    GateDGaps,
    MvRewritten,
    GateEProposal,
    MsProblemExtracted,
    MsRelatedGenerated,
    GateFProblems,
    MsEvidenceGathered,
    GateGEvidence,
    MsSynthesized,
    GateHMethods,
    MsRewritten,
    GateIFinal,
    Done,
};

std::string_view to_string(StateTag tag) noexcept;
StateTag state_tag_from_string(std::string_view s);
bool is_gate(StateTag tag) noexcept;
bool is_terminal(StateTag tag) noexcept;

enum class Provenance { Original, AgentRewritten, ResearcherEdited };
enum class ItemStatus { Generated, Edited, Added, Deleted };
enum class ProblemKind { Similar, Subtask };

NLOHMANN_JSON_SERIALIZE_ENUM(Provenance, {{Provenance::Original, "original"},
                                          {Provenance::AgentRewritten, "agent-rewritten"},
                                          {Provenance::ResearcherEdited, "researcher-edited"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ItemStatus, {{ItemStatus::Generated, "generated"},
                                          {ItemStatus::Edited, "edited"},
                                          {ItemStatus::Added, "added"},
                                          {ItemStatus::Deleted, "deleted"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ProblemKind, {{ProblemKind::Similar, "similar"},
                                           {ProblemKind::Subtask, "subtask"}})

void to_json(nlohmann::json& j, StateTag t);
void from_json(const nlohmann::json& j, StateTag& t);

inline bool active(ItemStatus s) noexcept { return s != ItemStatus::Deleted; }

struct Proposal {
    std::string title;
    std::string abstract;
    int version = 0;
    Provenance provenance = Provenance::Original;

    bool operator==(const Proposal&) const = default;
};

/// A stage-1 hit (or researcher-added paper) under review at Gate A.
struct CandidatePaper {
    std::string paper_id;
    std::string title;
    double score = 0.0;
    std::size_t rank = 0;  // 0 for researcher-added papers
    std::string relevance;
    std::string origin = "retrieval";  // or "researcher"
    bool previously_seen = false;
    ItemStatus status = ItemStatus::Generated;
    std::size_t chunk_count = 0;
};

inline constexpr std::string_view kQuestionPrefix = "Is the research paper";

struct ValidationQuestion {
    std::string question_id;
    std::string text;
    std::string agent_text;  // as generated; empty for researcher-added
    std::string source_motivation_bullet;
    ItemStatus status = ItemStatus::Generated;
    bool auto_prefixed = false;
};

struct ValidationVerdict {
    std::string question_id;
    std::string paper_id;
    agents::BinaryAnswer answer;
    std::vector<std::string> supporting_chunk_ids;  // non-empty iff Yes
    std::optional<std::string> error;               // provider failure note
    ItemStatus status = ItemStatus::Generated;      // Deleted when rejected at Gate C

    std::string item_id() const { return question_id + "@" + paper_id; }
};

struct ResearchGap {
    std::string gap_id;
    std::string paper_id;  // empty for researcher-added gaps
    std::string text;
    std::string agent_text;
    std::string origin = "agent";  // or "researcher"
    bool selected = false;
    ItemStatus status = ItemStatus::Generated;
};

struct RelatedProblem {
    std::string problem_id;
    ProblemKind kind = ProblemKind::Similar;
    std::string text;
    std::string agent_text;
    ItemStatus status = ItemStatus::Generated;
};

/// One deduplicated stage-1 hit of method synthesis.
struct MethodPaper {
    std::string paper_id;
    std::string title;
    double score = 0.0;  // max over the problems that retrieved it
    std::vector<std::string> problem_ids;
};

struct MethodVerdict {
    std::string problem_id;
    std::string paper_id;
    std::string question;
    agents::BinaryAnswer answer;
    std::optional<std::string> error;
    std::vector<std::string> chunk_ids;
};

struct MethodEvidence {
    std::string evidence_id;
    std::string problem_id;
    std::string paper_id;
    std::string title;
    std::string methodology_text;
    std::string agent_text;
    bool accepted = false;
    ItemStatus status = ItemStatus::Generated;
};

struct SynthesizedMethod {
    std::string method_id;
    std::string text;
    std::string agent_text;
    std::vector<std::string> evidence_ids;
    bool accepted = false;
    ItemStatus status = ItemStatus::Generated;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Proposal, title, abstract, version, provenance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CandidatePaper, paper_id, title, score, rank, relevance, origin,
                                   previously_seen, status, chunk_count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ValidationQuestion, question_id, text, agent_text,
                                   source_motivation_bullet, status, auto_prefixed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ValidationVerdict, question_id, paper_id, answer,
                                   supporting_chunk_ids, error, status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ResearchGap, gap_id, paper_id, text, agent_text, origin, selected, status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RelatedProblem, problem_id, kind, text, agent_text, status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MethodPaper, paper_id, title, score, problem_ids)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MethodVerdict, problem_id, paper_id, question, answer, error, chunk_ids)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MethodEvidence, evidence_id, problem_id, paper_id, title,
                                   methodology_text, agent_text, accepted, status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SynthesizedMethod, method_id, text, agent_text, evidence_ids, accepted,
                                   status)

/// "Title: ...\nAbstract: ..." as bound into {proposal} slots.
std::string format_proposal(const Proposal& p);

/// Ensures the question starts with kQuestionPrefix. Returns the text
/// unchanged when it already does.
std::string with_question_prefix(std::string_view text, std::string_view connective);

}  // namespace ideation::workflow

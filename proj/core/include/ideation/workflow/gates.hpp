#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ideation/workflow/state.hpp"

namespace ideation::workflow {

/// What the researcher sends back for the pending gate.
///
/// `edits` is an array of {"op": "add"|"update"|"delete", "id": ..., fields}.
/// `decision` is "accept", or "reject" at the proposal gates; `iterate`
/// asks Gate E for another validation pass.
struct GateSubmission {
    std::string gate_id;
    nlohmann::json edits = nlohmann::json::array();
    std::string decision = "accept";
    bool iterate = false;
};

GateSubmission submission_from_json(const nlohmann::json& j);
nlohmann::json edit_payload(const GateSubmission& sub, StateTag kind);

/// Id for the next gate opened in this state.
std::string next_gate_id(const SessionState& s, StateTag kind);

/// Envelope shown to the researcher for the pending gate. Throws
/// PreconditionFailed when no gate is open.
nlohmann::json gate_envelope(const SessionState& s);

/// Validates and applies a gate-edit payload. Strong guarantee: on any
/// throw `s` is unchanged. StaleGate when the gate id is not the pending
/// one; InvalidArgument for malformed or unknown edits; PreconditionFailed
/// when accepting would leave the gate without required items.
void apply_gate_edit(SessionState& s, const nlohmann::json& payload);

}  // namespace ideation::workflow

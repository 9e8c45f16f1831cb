#pragma once

#include <string>
#include <string_view>

#include "palms/session.hpp"

namespace palms {

struct ApiResponse {
  int status = 200;
  std::string body;  ///< JSON
};

/// Routes one HTTP request against the store:
///
///   POST /sessions                    201 {session_id, status}
///   GET  /sessions/{id}               200 status, progress, phase
///   GET  /sessions/{id}/query         200 pending query (404 once finalized)
///   POST /sessions/{id}/label         200 progress (409 on id mismatch)
///   POST /sessions/{id}/finalize      200 outcome
///   GET  /sessions/{id}/outcome       200 cached outcome (404 before finalize)
///   POST /sessions/{id}/abort         200 status
///
/// Errors are {"code": ..., "message": ...}.
ApiResponse handle_request(SessionStore& store, std::string_view method, std::string_view path,
                           std::string_view body);

/// JSON helpers shared by the service and its persistence layer.
std::string outcome_to_json(const SelectionOutcome& outcome);
std::string config_to_json(const SessionConfig& config);
SessionConfig config_from_json(std::string_view text);

}  // namespace palms

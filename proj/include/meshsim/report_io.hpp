#pragma once

#include <string>

#include "meshsim/engine.hpp"

namespace meshsim {

/// Summary document: scenario echo, metrics, per-session rows. Stable key
/// order and formatting — identical runs serialize to identical bytes.
std::string render_report_json(const Report& report);

/// Full event trace, one CSV row per logged event, with the header
/// `slot,event,session_id,sender,receiver,outcome,detail`.
std::string render_trace_csv(const Report& report);

/// Side-by-side metrics of a protocol run and a flooding run of the same
/// scenario, under top-level keys "protocol" and "flooding".
std::string render_comparison_json(const Report& protocol, const Report& flooding);

/// Writes via a temp file in the target directory plus an atomic rename, so
/// an interrupted write never leaves a partial file at `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace meshsim

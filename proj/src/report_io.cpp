#include "meshsim/report_io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "scenario_json.hpp"

namespace meshsim {

namespace {

using nlohmann::ordered_json;

std::string status_string(const SessionStatus& s) {
    switch (s.state) {
        case SessionState::Delivered:
            return "delivered";
        case SessionState::InProgress:
            return "in_flight";
        case SessionState::Failed:
            return s.reason == FailureReason::NoRoute ? "failed:no_route"
                                                      : "failed:transfer_error";
    }
    return "unknown";
}

std::string transfer_outcome_string(const TransferOutcome& o) {
    if (o.success) return "success";
    return o.failure == TransferFailure::OutOfRange ? "out_of_range" : "link_loss";
}

ordered_json metrics_to_json(const Metrics& m) {
    return {{"sessions_total", m.sessions_total},
            {"delivered", m.delivered},
            {"failed", m.failed},
            {"in_flight_at_end", m.in_flight_at_end},
            {"total_transmissions", m.total_transmissions},
            {"total_collisions_detected", m.total_collisions_detected},
            {"total_deferrals", m.total_deferrals},
            {"total_recoveries", m.total_recoveries},
            {"hop_counts", m.hop_counts},
            {"delivery_ratio", m.delivery_ratio}};
}

ordered_json sessions_to_json(const std::vector<SessionSummary>& sessions) {
    auto rows = ordered_json::array();
    for (const auto& s : sessions) {
        ordered_json row = {{"id", s.id},
                            {"source", s.source},
                            {"destination", s.destination},
                            {"start_slot", s.start_slot},
                            {"status", status_string(s.status)},
                            {"hop_count", s.hop_count}};
        row["end_slot"] = s.end_slot ? ordered_json(*s.end_slot) : ordered_json(nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// One CSV row; absent cells stay empty. No quoting needed — no field ever
/// contains a comma or newline.
void csv_row(std::string& out, std::uint32_t slot, const char* event, const std::string& session,
             const std::string& sender, const std::string& receiver, const std::string& outcome,
             const std::string& detail) {
    out += std::to_string(slot);
    out += ',';
    out += event;
    out += ',';
    out += session;
    out += ',';
    out += sender;
    out += ',';
    out += receiver;
    out += ',';
    out += outcome;
    out += ',';
    out += detail;
    out += '\n';
}

std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string render_report_json(const Report& report) {
    ordered_json doc;
    doc["scenario"] = scenario_to_json(report.scenario);
    doc["metrics"] = metrics_to_json(report.metrics);
    doc["sessions"] = sessions_to_json(report.sessions);
    return doc.dump(2) + "\n";
}

std::string render_comparison_json(const Report& protocol, const Report& flooding) {
    const auto per_delivered = [](const Metrics& m) -> ordered_json {
        if (m.delivered == 0) return nullptr;
        return static_cast<double>(m.total_transmissions) / static_cast<double>(m.delivered);
    };

    ordered_json doc;
    doc["scenario"] = scenario_to_json(protocol.scenario);
    doc["protocol"] = metrics_to_json(protocol.metrics);
    doc["protocol"]["transmissions_per_delivered"] = per_delivered(protocol.metrics);
    doc["flooding"] = metrics_to_json(flooding.metrics);
    doc["flooding"]["transmissions_per_delivered"] = per_delivered(flooding.metrics);
    return doc.dump(2) + "\n";
}

std::string render_trace_csv(const Report& report) {
    std::string out = "slot,event,session_id,sender,receiver,outcome,detail\n";

    for (const auto& log : report.slots) {
        for (const auto& r : log.recoveries) {
            const std::string outcome =
                r.exhausted ? "exhausted" : (r.candidate ? "found" : "none");
            const std::string detail =
                "candidate=" + (r.candidate ? num(*r.candidate) : std::string("none"));
            csv_row(out, log.slot, "recover", num(r.session_id), num(r.holder_before),
                    num(r.holder_after), outcome, detail);
        }
        for (const auto& i : log.intents) {
            csv_row(out, log.slot, "intent", num(i.session_id), num(i.sender), num(i.receiver),
                    "", "");
        }
        for (const auto& r : log.resolutions) {
            std::string winner_session;
            for (const auto& t : log.transfers) {
                if (t.contended && t.sender == r.winner && t.receiver == r.receiver) {
                    winner_session = num(t.session_id);
                }
            }
            csv_row(out, log.slot, "resolve", winner_session, num(r.winner), num(r.receiver),
                    "win", "contenders=" + num(r.deferred.size() + 1));
            for (const auto& d : r.deferred) {
                csv_row(out, log.slot, "defer", num(d.session_id), num(d.sender),
                        num(d.receiver), "deferred", "");
            }
        }
        for (const auto& t : log.transfers) {
            csv_row(out, log.slot, "transfer", num(t.session_id), num(t.sender),
                    num(t.receiver), transfer_outcome_string(t.outcome),
                    t.contended ? "contended" : "uncontended");
        }
        for (const auto& s : log.status_changes) {
            csv_row(out, log.slot, "status", num(s.session_id), "", "",
                    status_string(s.status), "");
        }
        for (const auto& b : log.flood_broadcasts) {
            csv_row(out, log.slot, "broadcast", num(b.session_id), num(b.sender), "", "", "");
        }
        for (const auto& c : log.flood_collisions) {
            csv_row(out, log.slot, "collision", num(c.session_id), "", num(c.receiver), "", "");
        }
        for (const auto sid : log.injections) {
            csv_row(out, log.slot, "inject", num(sid), "", "", "", "");
        }
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    const fs::path tmp =
        dir / (target.filename().string() + ".tmp." + std::to_string(::getpid()));

    {
        std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
        if (!stream) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        stream.write(content.data(), static_cast<std::streamsize>(content.size()));
        stream.flush();
        if (!stream) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }

    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code cleanup;
        fs::remove(tmp, cleanup);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path + ": " +
                                 ec.message());
    }
}

}  // namespace meshsim

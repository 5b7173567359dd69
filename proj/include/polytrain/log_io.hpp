#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polytrain/config.hpp"
#include "polytrain/session.hpp"
#include "polytrain/summary.hpp"

namespace polytrain {

inline constexpr int kLogVersion = 1;

// JSON-Lines session log. Line 1 is the header:
//   {"type":"header","format":"polytrain-log","version":1,"metadata":{...},"config":{...}}
// followed, in time order, by frame objects
//   {"t","mode","nd":{"y","z","vy","vz"},"dom":{...},
//    "forces":{"nd":{"fy","fz"},"dom":{...}},
//    "scores":{"pos","vel","total","current"}[,"client_t"]}
// and event objects
//   {"t","event"[,"block_mean","best","decision"]}.
// An event line precedes the frame it happened before.
Json header_json(const SessionLog& log);
Json frame_json(const Frame& frame);
Json event_json(const SessionEvent& event);

void write_log(std::ostream& out, const SessionLog& log);
std::string log_to_string(const SessionLog& log);
void save_log(const std::string& path, const SessionLog& log);

// Throws LogError(kMalformedLog) with the offending line number.
SessionLog parse_log(std::istream& in);
SessionLog parse_log_string(const std::string& text);
SessionLog load_log(const std::string& path);

// 1-based line on which frame `index` is written.
std::size_t frame_line(const SessionLog& log, std::size_t index);

// Replays the logged kinematics through a fresh session and checks every
// logged score, force, mode and event against the recomputation (1e-9).
// Throws LogError(kValidation) at the first disagreement, or for Test frames
// that carry a nonzero force.
SessionSummary rescore(const SessionLog& log);

// Flat per-frame CSV (RFC 4180): log,t,mode,pos,vel,total,current
void write_scores_csv(std::ostream& out, const std::vector<std::pair<std::string, const SessionLog*>>& logs);
std::string csv_escape(const std::string& field);
std::string format_number(double v);

}  // namespace polytrain

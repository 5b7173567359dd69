#include "polytrain/log_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

constexpr double kRescoreTolerance = 1e-9;

Json hand_json(const HandSample& h) {
  return Json{{"y", h.pos.y}, {"z", h.pos.z}, {"vy", h.vel.vy}, {"vz", h.vel.vz}};
}

Json force_json(const GuidanceForce& f) { return Json{{"fy", f.fy}, {"fz", f.fz}}; }

double number_at(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw LogError(ErrorCode::kMalformedLog, line, std::string("missing number '") + key + "'");
  }
  return it->get<double>();
}

const Json& object_at(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_object()) {
    throw LogError(ErrorCode::kMalformedLog, line, std::string("missing object '") + key + "'");
  }
  return *it;
}

HandSample parse_hand(const Json& j, std::size_t line) {
  return {{number_at(j, "y", line), number_at(j, "z", line)},
          {number_at(j, "vy", line), number_at(j, "vz", line)}};
}

GuidanceForce parse_force(const Json& j, std::size_t line) {
  return {number_at(j, "fy", line), number_at(j, "fz", line)};
}

Frame parse_frame(const Json& j, std::size_t line) {
  Frame f;
  f.t = number_at(j, "t", line);
  auto mode_it = j.find("mode");
  if (mode_it == j.end() || !mode_it->is_string()) {
    throw LogError(ErrorCode::kMalformedLog, line, "missing 'mode'");
  }
  const auto mode = training_mode_from_string(mode_it->get<std::string>());
  if (!mode) throw LogError(ErrorCode::kMalformedLog, line, "unknown mode");
  f.mode = *mode;
  f.sensed.nd = parse_hand(object_at(j, "nd", line), line);
  f.sensed.dom = parse_hand(object_at(j, "dom", line), line);
  const Json& forces = object_at(j, "forces", line);
  f.nd_force = parse_force(object_at(forces, "nd", line), line);
  f.dom_force = parse_force(object_at(forces, "dom", line), line);
  const Json& scores = object_at(j, "scores", line);
  f.scores.position = number_at(scores, "pos", line);
  f.scores.velocity = number_at(scores, "vel", line);
  f.scores.total = number_at(scores, "total", line);
  f.scores.current = number_at(scores, "current", line);
  if (j.contains("client_t")) f.client_t = number_at(j, "client_t", line);
  return f;
}

SessionEvent parse_event(const Json& j, std::size_t line, std::size_t frame_index) {
  SessionEvent e;
  e.t = number_at(j, "t", line);
  const auto& name = j.at("event");
  if (!name.is_string()) throw LogError(ErrorCode::kMalformedLog, line, "event name must be a string");
  const auto kind = event_kind_from_string(name.get<std::string>());
  if (!kind) throw LogError(ErrorCode::kMalformedLog, line, "unknown event");
  e.kind = *kind;
  e.frame_index = frame_index;
  if (j.contains("block_mean")) e.block_mean = number_at(j, "block_mean", line);
  if (j.contains("best")) e.best = number_at(j, "best", line);
  if (j.contains("decision")) {
    const auto& d = j.at("decision");
    const auto decision = d.is_string() ? block_decision_from_string(d.get<std::string>()) : std::nullopt;
    if (!decision) throw LogError(ErrorCode::kMalformedLog, line, "unknown block decision");
    e.decision = decision;
  }
  return e;
}

bool close(double a, double b) {
  return std::abs(a - b) <= kRescoreTolerance * std::max(1.0, std::abs(b));
}

bool close(const GuidanceForce& a, const GuidanceForce& b) {
  return close(a.fy, b.fy) && close(a.fz, b.fz);
}

bool close(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b);
}

std::size_t event_line(const SessionLog& log, std::size_t event_index) {
  // Events before frame k and the k frames themselves precede it.
  return 2 + event_index + log.events[event_index].frame_index;
}

}  // namespace

Json header_json(const SessionLog& log) {
  Json j = Json::object();
  j["type"] = "header";
  j["format"] = "polytrain-log";
  j["version"] = kLogVersion;
  j["metadata"] = log.metadata;
  j["config"] = to_json(log.config);
  return j;
}

Json frame_json(const Frame& f) {
  Json j = Json::object();
  j["t"] = f.t;
  j["mode"] = std::string(to_string(f.mode));
  j["nd"] = hand_json(f.sensed.nd);
  j["dom"] = hand_json(f.sensed.dom);
  j["forces"] = Json{{"nd", force_json(f.nd_force)}, {"dom", force_json(f.dom_force)}};
  j["scores"] = Json{{"pos", f.scores.position},
                     {"vel", f.scores.velocity},
                     {"total", f.scores.total},
                     {"current", f.scores.current}};
  if (f.client_t) j["client_t"] = *f.client_t;
  return j;
}

Json event_json(const SessionEvent& e) {
  Json j = Json::object();
  j["t"] = e.t;
  j["event"] = std::string(to_string(e.kind));
  if (e.block_mean) j["block_mean"] = *e.block_mean;
  if (e.best) j["best"] = *e.best;
  if (e.decision) j["decision"] = std::string(to_string(*e.decision));
  return j;
}

void write_log(std::ostream& out, const SessionLog& log) {
  out << header_json(log).dump() << '\n';
  std::size_t ev = 0;
  for (std::size_t i = 0; i <= log.frames.size(); ++i) {
    while (ev < log.events.size() && log.events[ev].frame_index <= i) {
      out << event_json(log.events[ev]).dump() << '\n';
      ++ev;
    }
    if (i < log.frames.size()) out << frame_json(log.frames[i]).dump() << '\n';
  }
}

std::string log_to_string(const SessionLog& log) {
  std::ostringstream ss;
  write_log(ss, log);
  return ss.str();
}

void save_log(const std::string& path, const SessionLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  write_log(out, log);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

SessionLog parse_log(std::istream& in) {
  SessionLog log;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) throw LogError(ErrorCode::kMalformedLog, line, "empty line");
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw LogError(ErrorCode::kMalformedLog, line, "not a JSON object");
    }
    if (!have_header) {
      if (j.value("type", "") != "header" || j.value("format", "") != "polytrain-log") {
        throw LogError(ErrorCode::kMalformedLog, line, "missing log header");
      }
      if (j.value("version", 0) != kLogVersion) {
        throw LogError(ErrorCode::kMalformedLog, line, "unsupported log version");
      }
      try {
        log.config = session_config_from_json(j.at("config"));
      } catch (const std::exception& e) {
        throw LogError(ErrorCode::kMalformedLog, line, std::string("bad config: ") + e.what());
      }
      if (j.contains("metadata")) log.metadata = j.at("metadata");
      have_header = true;
      continue;
    }
    try {
      if (j.contains("event")) {
        log.events.push_back(parse_event(j, line, log.frames.size()));
      } else {
        log.frames.push_back(parse_frame(j, line));
      }
    } catch (const LogError&) {
      throw;
    } catch (const std::exception& e) {
      throw LogError(ErrorCode::kMalformedLog, line, e.what());
    }
  }
  if (!have_header) throw LogError(ErrorCode::kMalformedLog, line + 1, "empty log");
  return log;
}

SessionLog parse_log_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_log(ss);
}

SessionLog load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_log(in);
}

std::size_t frame_line(const SessionLog& log, std::size_t index) {
  std::size_t before = 0;
  for (const auto& e : log.events) {
    if (e.frame_index <= index) ++before;
  }
  return 2 + index + before;
}

SessionSummary rescore(const SessionLog& log) {
  if (log.frames.empty()) throw Error(ErrorCode::kEmptyLog, "session log has no frames");

  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const Frame& f = log.frames[i];
    if (f.mode == TrainingMode::kTest && (f.nd_force != GuidanceForce{} || f.dom_force != GuidanceForce{})) {
      throw LogError(ErrorCode::kValidation, frame_line(log, i), "nonzero force in a Test frame");
    }
  }

  Session session(log.config, log.metadata);
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const Frame& logged = log.frames[i];
    if (session.ended()) {
      throw LogError(ErrorCode::kValidation, frame_line(log, i), "frame after the session ended");
    }
    StepResult r;
    try {
      r = session.step(logged.sensed, logged.client_t);
    } catch (const Error& e) {
      throw LogError(ErrorCode::kValidation, frame_line(log, i), e.what());
    }
    const Frame& live = session.log().frames.back();
    const bool ok = r.mode == logged.mode && close(live.t, logged.t) &&
                    close(live.nd_force, logged.nd_force) &&
                    close(live.dom_force, logged.dom_force) &&
                    close(live.scores.position, logged.scores.position) &&
                    close(live.scores.velocity, logged.scores.velocity) &&
                    close(live.scores.total, logged.scores.total) &&
                    close(live.scores.current, logged.scores.current);
    if (!ok) {
      throw LogError(ErrorCode::kValidation, frame_line(log, i),
                     "frame disagrees with the recomputed session");
    }
  }
  if (!session.ended() && !log.events.empty() && log.events.back().kind == EventKind::kSessionEnd) {
    session.stop();
  }

  const auto& replayed = session.log().events;
  const std::size_t common = std::min(replayed.size(), log.events.size());
  for (std::size_t i = 0; i < common; ++i) {
    const SessionEvent& a = replayed[i];
    const SessionEvent& b = log.events[i];
    const bool ok = a.kind == b.kind && a.frame_index == b.frame_index && close(a.t, b.t) &&
                    close(a.block_mean, b.block_mean) && close(a.best, b.best) &&
                    a.decision == b.decision;
    if (!ok) throw LogError(ErrorCode::kValidation, event_line(log, i), "event disagrees with replay");
  }
  if (log.events.size() > common) {
    throw LogError(ErrorCode::kValidation, event_line(log, common), "unexpected event");
  }
  if (replayed.size() > common) {
    throw LogError(ErrorCode::kValidation, 2 + log.frames.size() + log.events.size(),
                   "log is missing event " + std::string(to_string(replayed[common].kind)));
  }

  // Summaries come from the recomputed log, not the file's score fields.
  return summarize(session.log());
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_scores_csv(std::ostream& out,
                      const std::vector<std::pair<std::string, const SessionLog*>>& logs) {
  out << "log,t,mode,pos,vel,total,current\r\n";
  for (const auto& [name, log] : logs) {
    const std::string label = csv_escape(name);
    for (const Frame& f : log->frames) {
      out << label << ',' << format_number(f.t) << ',' << to_string(f.mode) << ','
          << format_number(f.scores.position) << ',' << format_number(f.scores.velocity) << ','
          << format_number(f.scores.total) << ',' << format_number(f.scores.current) << "\r\n";
    }
  }
}

}  // namespace polytrain

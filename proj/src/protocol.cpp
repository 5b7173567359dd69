#include "polytrain/protocol.hpp"

#include <array>
#include <cstring>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

constexpr std::array<std::pair<MessageKind, std::string_view>, 9> kKindNames{{
    {MessageKind::kHello, "Hello"},
    {MessageKind::kStartSession, "StartSession"},
    {MessageKind::kStopSession, "StopSession"},
    {MessageKind::kInputFrame, "InputFrame"},
    {MessageKind::kGuidance, "Guidance"},
    {MessageKind::kStateUpdate, "StateUpdate"},
    {MessageKind::kEvent, "Event"},
    {MessageKind::kSummary, "Summary"},
    {MessageKind::kError, "Error"},
}};

HandSample hand_from_payload(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("InputFrame is missing '") + key + "'");
  }
  auto num = [&](const char* k) {
    auto v = it->find(k);
    if (v == it->end() || !v->is_number()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("InputFrame '") + key + "' is missing number '" + k + "'");
    }
    return v->get<double>();
  };
  return {{num("y"), num("z")}, {num("vy"), num("vz")}};
}

Json hand_guidance(double power, const std::optional<ReferenceState>& target) {
  Json j = Json::object();
  j["power"] = power;
  if (target) j["target"] = Json{{"y", target->target.y}, {"z", target->target.z}};
  return j;
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<MessageKind> message_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

Json to_json(const Message& msg) {
  return Json{{"kind", std::string(to_string(msg.kind))}, {"seq", msg.seq}, {"payload", msg.payload}};
}

Message message_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "message must be a JSON object");
  auto kind_it = j.find("kind");
  auto seq_it = j.find("seq");
  if (kind_it == j.end() || !kind_it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "message is missing 'kind'");
  }
  if (seq_it == j.end() || !seq_it->is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidArgument, "message is missing an unsigned 'seq'");
  }
  const auto kind = message_kind_from_string(kind_it->get<std::string>());
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown message kind");
  Message m;
  m.kind = *kind;
  m.seq = seq_it->get<std::uint64_t>();
  if (auto p = j.find("payload"); p != j.end()) {
    if (!p->is_object()) throw Error(ErrorCode::kInvalidArgument, "payload must be an object");
    m.payload = *p;
  }
  return m;
}

std::string encode_message(const Message& msg) {
  const std::string body = to_json(msg).dump();
  if (body.size() > kMaxMessageBytes) throw Error(ErrorCode::kInvalidArgument, "message too large");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out += body;
  return out;
}

void MessageDecoder::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<Message> MessageDecoder::next() {
  if (buffer_.size() < 4) return std::nullopt;
  const auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[i])); };
  const std::uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
  if (n > kMaxMessageBytes) throw Error(ErrorCode::kInvalidArgument, "message length exceeds limit");
  if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  const Json j = Json::parse(buffer_.begin() + 4, buffer_.begin() + 4 + n, nullptr, false);
  buffer_.erase(0, 4 + static_cast<std::size_t>(n));
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "message body is not JSON");
  return message_from_json(j);
}

ProtocolSession::ProtocolSession(ConfigFile config, FinishedCallback on_finished)
    : config_(std::move(config)), on_finished_(std::move(on_finished)) {
  config_.session.validate();
}

Message ProtocolSession::make(MessageKind kind, Json payload) {
  return Message{kind, ++out_seq_, std::move(payload)};
}

Message ProtocolSession::error(const std::string& code, const std::string& message) {
  return make(MessageKind::kError, Json{{"code", code}, {"message", message}});
}

void ProtocolSession::finish_session(std::vector<Message>& out) {
  const SessionLog& log = session_->log();
  const SessionSummary summary = summarize(log);
  Json payload = to_json(summary);
  out.push_back(make(MessageKind::kSummary, std::move(payload)));
  if (on_finished_) on_finished_(log, summary);
  finished_ = true;
}

std::vector<Message> ProtocolSession::handle(const Message& in) {
  std::vector<Message> out;
  if (last_in_seq_ && in.seq <= *last_in_seq_) {
    out.push_back(error("BadSequence", "sequence numbers must strictly increase"));
    return out;
  }
  last_in_seq_ = in.seq;

  if (!handshake_done_ && in.kind != MessageKind::kHello) {
    out.push_back(error("HandshakeRequired", "send Hello first"));
    return out;
  }

  switch (in.kind) {
    case MessageKind::kHello: {
      const int version = in.payload.value("version", -1);
      if (version != kProtocolVersion) {
        out.push_back(error("VersionMismatch", "engine speaks protocol version " +
                                                   std::to_string(kProtocolVersion)));
        finished_ = true;
        return out;
      }
      handshake_done_ = true;
      out.push_back(make(MessageKind::kHello, Json{{"version", kProtocolVersion},
                                                   {"frame_rate", config_.session.frame_rate}}));
      return out;
    }
    case MessageKind::kStartSession: {
      if (session_) {
        out.push_back(error("SessionExists", "a session was already started on this connection"));
        return out;
      }
      Json meta = Json::object();
      meta["subject"] = in.payload.value("subject", std::string("live"));
      meta["source"] = "serve";
      session_.emplace(config_.session, std::move(meta));
      out.push_back(make(MessageKind::kStateUpdate,
                         Json{{"mode", std::string(to_string(session_->mode()))},
                              {"elapsed", 0.0},
                              {"phase_elapsed", 0.0}}));
      return out;
    }
    case MessageKind::kStopSession: {
      if (!session_running()) {
        out.push_back(error("NoSession", "no running session"));
        return out;
      }
      for (const auto& e : session_->stop()) {
        out.push_back(make(MessageKind::kEvent, Json{{"t", e.t}, {"event", std::string(to_string(e.kind))}}));
      }
      finish_session(out);
      return out;
    }
    case MessageKind::kInputFrame:
      return on_input_frame(in);
    default:
      out.push_back(error("UnexpectedMessage",
                          std::string(to_string(in.kind)) + " is not accepted from clients"));
      return out;
  }
}

std::vector<Message> ProtocolSession::on_input_frame(const Message& in) {
  std::vector<Message> out;
  if (!session_running()) {
    out.push_back(error("NoSession", "InputFrame without a running session"));
    return out;
  }
  if (paused_) {
    paused_ = false;
    out.push_back(make(MessageKind::kEvent, Json{{"t", session_->time()}, {"event", "Resumed"}}));
  }

  BimanualSample sensed;
  std::optional<double> client_t;
  try {
    sensed.nd = hand_from_payload(in.payload, "nd");
    sensed.dom = hand_from_payload(in.payload, "dom");
    if (auto t = in.payload.find("t"); t != in.payload.end() && t->is_number()) client_t = t->get<double>();
  } catch (const Error& e) {
    out.push_back(error("BadInputFrame", e.what()));
    return out;
  }

  StepResult r;
  try {
    r = session_->step(sensed, client_t);
  } catch (const Error& e) {
    out.push_back(error(to_string(e.code()), e.what()));
    return out;
  }

  for (const auto& e : r.events) {
    out.push_back(make(MessageKind::kEvent, Json{{"t", e.t}, {"event", std::string(to_string(e.kind))}}));
  }

  const double t = session_->log().frames.back().t;
  const bool training = is_training(r.mode);
  Json guidance = Json::object();
  guidance["t"] = t;
  guidance["mode"] = std::string(to_string(r.mode));
  guidance["nd"] = hand_guidance(r.power.nd, training ? r.nd_target : std::nullopt);
  guidance["dom"] = hand_guidance(r.power.dom, training ? r.dom_target : std::nullopt);
  out.push_back(make(MessageKind::kGuidance, std::move(guidance)));

  Json state = Json::object();
  state["t"] = t;
  state["mode"] = std::string(to_string(r.mode));
  state["elapsed"] = session_->time();
  state["phase_elapsed"] = session_->phase_elapsed();
  if (training) state["current_score"] = r.sample.current;
  out.push_back(make(MessageKind::kStateUpdate, std::move(state)));

  if (r.ended) finish_session(out);
  return out;
}

std::vector<Message> ProtocolSession::on_timeout() {
  std::vector<Message> out;
  if (session_running() && !paused_) {
    paused_ = true;
    out.push_back(make(MessageKind::kEvent, Json{{"t", session_->time()}, {"event", "Paused"}}));
  }
  return out;
}

void ProtocolSession::on_disconnect() {
  if (!session_running()) return;
  session_->stop();
  std::vector<Message> discard;
  finish_session(discard);
}

}  // namespace polytrain

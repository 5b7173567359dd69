#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polytrain/config.hpp"
#include "polytrain/session.hpp"
#include "polytrain/summary.hpp"

namespace polytrain {

inline constexpr int kProtocolVersion = 1;
// Upper bound on one encoded message; larger length prefixes are rejected.
inline constexpr std::uint32_t kMaxMessageBytes = 1u << 20;

enum class MessageKind {
  kHello,
  kStartSession,
  kStopSession,
  kInputFrame,
  kGuidance,
  kStateUpdate,
  kEvent,
  kSummary,
  kError,
};

std::string_view to_string(MessageKind kind);
std::optional<MessageKind> message_kind_from_string(std::string_view name);

// Wire object: {"kind": "...", "seq": n, "payload": {...}}.
struct Message {
  MessageKind kind = MessageKind::kHello;
  std::uint64_t seq = 0;
  Json payload = Json::object();
};

Json to_json(const Message& msg);
// Throws Error(kInvalidArgument) for malformed messages.
Message message_from_json(const Json& j);

// Length-delimited framing: 4-byte big-endian byte count, then UTF-8 JSON.
std::string encode_message(const Message& msg);

class MessageDecoder {
 public:
  void feed(std::string_view bytes);
  // Next complete message, if any. Throws Error(kInvalidArgument) for an
  // oversize length prefix or an unparsable body.
  std::optional<Message> next();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

// Engine side of one client connection, independent of the transport. Every
// reply carries a fresh outbound sequence number. While the session is in a
// testing phase no reply carries a score or a reference target.
class ProtocolSession {
 public:
  using FinishedCallback = std::function<void(const SessionLog&, const SessionSummary&)>;

  explicit ProtocolSession(ConfigFile config, FinishedCallback on_finished = {});

  std::vector<Message> handle(const Message& in);

  // Called by the transport when no InputFrame arrived within the client
  // timeout; pauses the session clock.
  std::vector<Message> on_timeout();

  // Client went away: ends a running session so its log is still persisted.
  void on_disconnect();

  bool handshake_done() const { return handshake_done_; }
  bool session_running() const { return session_.has_value() && !session_->ended(); }
  bool paused() const { return paused_; }
  // True once the connection should be closed (session finished or version
  // mismatch).
  bool finished() const { return finished_; }
  const Session* session() const { return session_ ? &*session_ : nullptr; }

 private:
  Message make(MessageKind kind, Json payload);
  Message error(const std::string& code, const std::string& message);
  void finish_session(std::vector<Message>& out);
  std::vector<Message> on_input_frame(const Message& in);

  ConfigFile config_;
  FinishedCallback on_finished_;
  std::optional<Session> session_;
  std::uint64_t out_seq_ = 0;
  std::optional<std::uint64_t> last_in_seq_;
  bool handshake_done_ = false;
  bool paused_ = false;
  bool finished_ = false;
};

}  // namespace polytrain

#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <future>
#include <set>
#include <thread>

#include "polytrain/error.hpp"
#include "polytrain/log_io.hpp"
#include "polytrain/protocol.hpp"
#include "polytrain/server.hpp"
#include "scripted.hpp"

using namespace polytrain;

namespace {

ConfigFile short_config() {
  ConfigFile c;
  c.session.max_duration = 40;
  return c;
}

Message input_frame(std::uint64_t seq, double t, double lag = 0) {
  const auto s = scripted::polyrhythm(t, 30, 180, {}, 1.5, lag);
  auto hand = [](const HandSample& h) {
    return Json{{"y", h.pos.y}, {"z", h.pos.z}, {"vy", h.vel.vy}, {"vz", h.vel.vz}};
  };
  return {MessageKind::kInputFrame, seq, Json{{"t", t}, {"nd", hand(s.nd)}, {"dom", hand(s.dom)}}};
}

bool has_score_field(const Json& j) {
  static const std::set<std::string> banned = {"current_score", "target", "scores", "pos", "vel",
                                               "total", "current", "block_mean", "best", "score"};
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (banned.count(k) || has_score_field(v)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (has_score_field(v)) return true;
    }
  }
  return false;
}

std::vector<Message> handshake(ProtocolSession& p) {
  auto out = p.handle({MessageKind::kHello, 1, Json{{"version", 1}}});
  auto more = p.handle({MessageKind::kStartSession, 2, Json{{"subject", "tester"}}});
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

}  // namespace

TEST_CASE("framing round-trips across arbitrary splits") {
  std::string wire;
  for (std::uint64_t i = 1; i <= 5; ++i) wire += encode_message(input_frame(i, i * 0.01));
  for (std::size_t chunk : {1u, 3u, 17u, 1000u}) {
    MessageDecoder d;
    std::vector<Message> got;
    for (std::size_t off = 0; off < wire.size(); off += chunk) {
      d.feed(std::string_view(wire).substr(off, chunk));
      while (auto m = d.next()) got.push_back(*m);
    }
    REQUIRE(got.size() == 5);
    CHECK(got[4].seq == 5);
    CHECK(got[4].kind == MessageKind::kInputFrame);
    CHECK(d.buffered() == 0);
  }
  const auto enc = encode_message({MessageKind::kHello, 1, Json::object()});
  CHECK(static_cast<unsigned char>(enc[0]) == 0);
  CHECK(static_cast<std::size_t>(static_cast<unsigned char>(enc[3])) == enc.size() - 4);
}

TEST_CASE("decoder rejects garbage") {
  MessageDecoder d;
  d.feed(std::string("\xff\xff\xff\xff", 4));
  CHECK_THROWS_AS(d.next(), Error);
  MessageDecoder d2;
  d2.feed(std::string("\0\0\0\3abc", 7));
  CHECK_THROWS_AS(d2.next(), Error);
  CHECK_THROWS_AS(message_from_json(Json::parse(R"({"kind":"Shout","seq":1})")), Error);
  CHECK_THROWS_AS(message_from_json(Json::parse(R"({"kind":"Hello"})")), Error);
}

TEST_CASE("handshake and version mismatch") {
  ProtocolSession p(short_config());
  auto out = p.handle({MessageKind::kStartSession, 1, {}});
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == MessageKind::kError);

  ProtocolSession bad(short_config());
  out = bad.handle({MessageKind::kHello, 1, Json{{"version", 2}}});
  REQUIRE(out.size() == 1);
  CHECK(out[0].kind == MessageKind::kError);
  CHECK(out[0].payload["code"] == "VersionMismatch");
  CHECK(bad.finished());

  ProtocolSession good(short_config());
  out = good.handle({MessageKind::kHello, 1, Json{{"version", 1}}});
  CHECK(out[0].kind == MessageKind::kHello);
  CHECK(out[0].payload["frame_rate"] == 100.0);
  out = good.handle({MessageKind::kHello, 1, Json{{"version", 1}}});
  CHECK(out[0].payload["code"] == "BadSequence");
}

TEST_CASE("outbound sequence numbers increase") {
  ProtocolSession p(short_config());
  auto out = handshake(p);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = p.handle(input_frame(3 + i, i * 0.01));
    out.insert(out.end(), r.begin(), r.end());
  }
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i].seq == out[i - 1].seq + 1);
}

TEST_CASE("no scores or targets leave the engine during testing") {
  std::optional<SessionLog> persisted;
  std::optional<Json> summary_from_engine;
  ProtocolSession p(short_config(), [&](const SessionLog& log, const SessionSummary&) { persisted = log; });
  handshake(p);
  bool saw_test = false, saw_training_score = false;
  for (std::uint64_t i = 0; !p.finished(); ++i) {
    const double t = static_cast<double>(i) / 100.0;
    const auto out = p.handle(input_frame(3 + i, t, t < 10 ? 90 : 0));
    const auto guidance = std::find_if(out.begin(), out.end(), [](const Message& m) { return m.kind == MessageKind::kGuidance; });
    REQUIRE(guidance != out.end());
    const bool testing = guidance->payload["mode"] == "Test";
    for (const auto& m : out) {
      if (m.kind == MessageKind::kSummary) {
        summary_from_engine = m.payload;
        continue;
      }
      if (testing) {
        saw_test = true;
        INFO("message: " << to_json(m).dump());
        CHECK_FALSE(has_score_field(m.payload));
        if (m.kind == MessageKind::kGuidance) {
          CHECK(m.payload["nd"]["power"] == 0.0);
          CHECK(m.payload["dom"]["power"] == 0.0);
        }
      } else if (m.kind == MessageKind::kStateUpdate) {
        saw_training_score = saw_training_score || m.payload.contains("current_score");
      }
    }
  }
  CHECK(saw_test);
  CHECK(saw_training_score);
  REQUIRE(persisted.has_value());
  REQUIRE(summary_from_engine.has_value());
  CHECK(to_json(rescore(parse_log_string(log_to_string(*persisted)))) == *summary_from_engine);
}

TEST_CASE("timeout pauses and the next frame resumes") {
  ProtocolSession p(short_config());
  CHECK(p.on_timeout().empty());
  handshake(p);
  p.handle(input_frame(3, 0));
  auto out = p.on_timeout();
  REQUIRE(out.size() == 1);
  CHECK(out[0].payload["event"] == "Paused");
  CHECK(p.paused());
  CHECK(p.on_timeout().empty());
  out = p.handle(input_frame(4, 0.01));
  CHECK(out[0].payload["event"] == "Resumed");
  CHECK_FALSE(p.paused());
  CHECK(p.session()->frame_index() == 2);
}

TEST_CASE("bad frames are answered with errors") {
  ProtocolSession p(short_config());
  handshake(p);
  auto out = p.handle({MessageKind::kInputFrame, 3, Json{{"nd", Json::object()}}});
  CHECK(out[0].payload["code"] == "BadInputFrame");
  Message far = input_frame(4, 0);
  far.payload["dom"]["z"] = 900.0;
  out = p.handle(far);
  CHECK(out[0].payload["code"] == "OutOfWorkspace");
  out = p.handle({MessageKind::kGuidance, 5, {}});
  CHECK(out[0].payload["code"] == "UnexpectedMessage");
  CHECK(p.session()->frame_index() == 0);
}

TEST_CASE("stop sends the end event and a summary") {
  bool finished = false;
  ProtocolSession p(short_config(), [&](const SessionLog&, const SessionSummary&) { finished = true; });
  handshake(p);
  for (std::uint64_t i = 0; i < 10; ++i) p.handle(input_frame(3 + i, i * 0.01));
  const auto out = p.handle({MessageKind::kStopSession, 100, {}});
  REQUIRE(out.size() == 2);
  CHECK(out[0].payload["event"] == "SessionEnd");
  CHECK(out[1].kind == MessageKind::kSummary);
  CHECK(finished);
  CHECK(p.finished());
}

TEST_CASE("outbound queue sheds state updates first") {
  OutboundQueue q(3);
  q.push({MessageKind::kStateUpdate, 1, {}});
  q.push({MessageKind::kGuidance, 2, {}});
  q.push({MessageKind::kStateUpdate, 3, {}});
  q.push({MessageKind::kGuidance, 4, {}});  // evicts seq 1
  q.push({MessageKind::kStateUpdate, 5, {}});  // dropped
  q.push({MessageKind::kEvent, 6, {}});  // evicts seq 3
  q.push({MessageKind::kSummary, 7, {}});  // nothing to evict; kept anyway
  CHECK(q.dropped() == 3);
  std::vector<std::uint64_t> seqs;
  q.close();
  while (auto m = q.pop()) seqs.push_back(m->seq);
  CHECK(seqs == std::vector<std::uint64_t>{2, 4, 6, 7});
}

TEST_CASE("listen address parsing") {
  CHECK(parse_listen_address("127.0.0.1:9000").port == 9000);
  CHECK(parse_listen_address(":0").host == "127.0.0.1");
  CHECK_THROWS_AS(parse_listen_address("localhost"), Error);
  CHECK_THROWS_AS(parse_listen_address("h:99999"), Error);
  CHECK_THROWS_AS(parse_listen_address("h:12x"), Error);
}

TEST_CASE("TCP session end to end") {
  const auto dir = std::filesystem::temp_directory_path() / "polytrain_serve_test";
  std::filesystem::remove_all(dir);
  std::promise<int> port_promise;
  ServeOptions opts;
  opts.listen = parse_listen_address("127.0.0.1:0");
  opts.out_dir = dir;
  opts.on_listening = [&](int port) { port_promise.set_value(port); };
  ConfigFile cfg = short_config();
  auto server = std::async(std::launch::async, [&] { return serve(cfg, opts); });
  const int port = port_promise.get_future().get();

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);

  std::string wire = encode_message({MessageKind::kHello, 1, Json{{"version", 1}}}) +
                     encode_message({MessageKind::kStartSession, 2, Json{{"subject", "tcp"}}});
  for (std::uint64_t i = 0; i < 4000; ++i) wire += encode_message(input_frame(3 + i, i / 100.0));
  std::thread writer([&] {
    std::size_t off = 0;
    while (off < wire.size()) {
      const auto n = ::send(fd, wire.data() + off, std::min<std::size_t>(4096, wire.size() - off), MSG_NOSIGNAL);
      if (n <= 0) break;
      off += static_cast<std::size_t>(n);
    }
  });

  MessageDecoder d;
  std::optional<Json> summary;
  char buf[65536];
  while (true) {
    const auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    d.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    while (auto m = d.next()) {
      if (m->kind == MessageKind::kSummary) summary = m->payload;
    }
  }
  writer.join();
  ::close(fd);
  const ServeResult r = server.get();
  REQUIRE(summary.has_value());
  REQUIRE(r.log_path.has_value());
  CHECK(r.log_path->filename() == "tcp.jsonl");
  CHECK(std::filesystem::exists(*r.summary_path));
  CHECK(to_json(rescore(load_log(r.log_path->string()))) == *summary);
  std::filesystem::remove_all(dir);
}

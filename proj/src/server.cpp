#include "polytrain/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <thread>

#include "polytrain/error.hpp"
#include "polytrain/log_io.hpp"
#include "polytrain/summary.hpp"

namespace polytrain {

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

[[noreturn]] void throw_errno(const std::string& what) {
  throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::string safe_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "session" : out;
}

}  // namespace

OutboundQueue::OutboundQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

void OutboundQueue::push(Message msg) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (items_.size() >= capacity_) {
      if (msg.kind == MessageKind::kStateUpdate) {
        ++dropped_;
        return;
      }
      for (auto it = items_.begin(); it != items_.end(); ++it) {
        if (it->kind == MessageKind::kStateUpdate) {
          items_.erase(it);
          ++dropped_;
          break;
        }
      }
    }
    items_.push_back(std::move(msg));
  }
  cv_.notify_one();
}

std::optional<Message> OutboundQueue::pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
  if (items_.empty()) return std::nullopt;
  Message m = std::move(items_.front());
  items_.pop_front();
  return m;
}

void OutboundQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t OutboundQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

std::size_t OutboundQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

ListenAddress parse_listen_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "listen address must be host:port");
  ListenAddress addr;
  if (colon > 0) addr.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    addr.port = std::stoi(port, &used);
    if (used != port.size()) throw std::invalid_argument(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad port '" + port + "'");
  }
  if (addr.port < 0 || addr.port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
  return addr;
}

ServeResult serve(const ConfigFile& config, const ServeOptions& options) {
  ServeResult result;
  std::filesystem::create_directories(options.out_dir);

  Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.get() < 0) throw_errno("socket");
  const int one = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(options.listen.port));
  if (::inet_pton(AF_INET, options.listen.host.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "listen host must be an IPv4 address");
  }
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
  if (::listen(listener.get(), 1) < 0) throw_errno("listen");

  socklen_t len = sizeof addr;
  ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (options.on_listening) options.on_listening(ntohs(addr.sin_port));

  Fd client(::accept(listener.get(), nullptr, nullptr));
  if (client.get() < 0) throw_errno("accept");

  auto on_finished = [&](const SessionLog& log, const SessionSummary& summary) {
    const std::string label = safe_label(log.metadata.value("subject", std::string("session")));
    const auto log_path = options.out_dir / (label + ".jsonl");
    const auto summary_path = options.out_dir / (label + ".summary.json");
    save_log(log_path.string(), log);
    std::ofstream out(summary_path);
    out << to_json(summary).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + summary_path.string());
    result.log_path = log_path;
    result.summary_path = summary_path;
  };
  ProtocolSession proto(config, on_finished);

  OutboundQueue queue(options.outbound_capacity);
  std::atomic<bool> write_failed{false};
  std::thread writer([&] {
    while (auto msg = queue.pop()) {
      if (write_failed) continue;
      if (!send_all(client.get(), encode_message(*msg))) write_failed = true;
    }
  });

  MessageDecoder decoder;
  char buf[8192];
  bool connected = true;
  try {
    while (connected && !proto.finished() && !write_failed) {
      pollfd pfd{client.get(), POLLIN, 0};
      const int timeout = proto.session_running() ? static_cast<int>(options.client_timeout.count()) : -1;
      const int rc = ::poll(&pfd, 1, timeout);
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw_errno("poll");
      }
      if (rc == 0) {
        for (auto& m : proto.on_timeout()) queue.push(std::move(m));
        continue;
      }
      const ssize_t n = ::recv(client.get(), buf, sizeof buf, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("recv");
      }
      if (n == 0) {
        connected = false;
        break;
      }
      decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      while (!proto.finished()) {
        std::optional<Message> msg;
        try {
          msg = decoder.next();
        } catch (const Error& e) {
          // Framing is lost; report and drop the connection.
          queue.push(Message{MessageKind::kError, 0, Json{{"code", "BadMessage"}, {"message", e.what()}}});
          connected = false;
          break;
        }
        if (!msg) break;
        for (auto& m : proto.handle(*msg)) queue.push(std::move(m));
      }
    }
    if (!proto.finished()) proto.on_disconnect();
  } catch (...) {
    queue.close();
    writer.join();
    throw;
  }
  queue.close();
  writer.join();
  ::shutdown(client.get(), SHUT_RDWR);
  result.dropped_updates = queue.dropped();
  return result;
}

}  // namespace polytrain

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "polytrain/config.hpp"
#include "polytrain/protocol.hpp"

namespace polytrain {

// Bounded outbound queue. When full, StateUpdates are shed first (an
// incoming one is dropped, otherwise the oldest queued one is evicted); all
// other messages are always kept.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t capacity);

  void push(Message msg);
  // Blocks until a message is available or the queue is closed and empty.
  std::optional<Message> pop();
  void close();

  std::size_t size() const;
  std::size_t dropped() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> items_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 7878;
};

// Parses "host:port" or ":port". Throws Error(kInvalidArgument).
ListenAddress parse_listen_address(const std::string& text);

struct ServeOptions {
  ListenAddress listen;
  std::filesystem::path out_dir = ".";
  std::chrono::milliseconds client_timeout{1000};
  std::size_t outbound_capacity = 256;
  // Called with the bound port once the socket is listening (port 0 binds
  // an ephemeral port).
  std::function<void(int)> on_listening;
};

struct ServeResult {
  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> summary_path;
  std::size_t dropped_updates = 0;
};

// Accepts a single client, runs it to completion and persists the session
// log and summary into out_dir. Throws Error(kIo) on socket failures.
ServeResult serve(const ConfigFile& config, const ServeOptions& options);

}  // namespace polytrain

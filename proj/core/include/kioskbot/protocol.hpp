#pragma once

// Wire format shared by the bot, the phone and the server: each message is a
// UTF-8 JSON object prefixed by its byte length as a 4-byte big-endian
// integer. The "type" field discriminates.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace kioskbot {

using Json = nlohmann::json;

enum class ReasonCode { UnrecognizedScreen, RelocationRequired, OutOfReach, Internal };

std::string to_string(ReasonCode code);
std::optional<ReasonCode> parse_reason_code(std::string_view text);

inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

std::string encode_frame(const Json& message);

/// The "type" field, or "" when the message is not an object or the field is
/// missing or not a string.
std::string message_type(const Json& message);

/// Incremental decoder for a byte stream of frames. Throws Protocol on an
/// oversized frame or a payload that is not a JSON object.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  std::optional<Json> next();

 private:
  std::string buffer_;
};

namespace msg {
Json hello(std::string_view role, std::optional<std::string> session_id = std::nullopt);
Json error(ReasonCode code, std::string_view detail);
Json select(std::string_view element_id);
Json touch_cmd(double theta_deg, double r_mm);
Json touch_done(const std::optional<std::string>& hit, bool screen_changed);
}  // namespace msg

/// Thread-safe FIFO with a blocking, time-limited pop.
class Mailbox {
 public:
  void push(Json message);
  std::optional<Json> pop(std::chrono::milliseconds timeout);
  void close();
  bool closed() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Json> queue_;
  bool closed_ = false;
};

/// One endpoint of a message channel to the server.
class Link {
 public:
  virtual ~Link() = default;
  virtual void send(const Json& message) = 0;
  /// nullopt on timeout or once the channel is closed and drained.
  virtual std::optional<Json> receive(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

}  // namespace kioskbot

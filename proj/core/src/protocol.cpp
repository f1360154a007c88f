#include "kioskbot/protocol.hpp"

#include <array>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {
constexpr std::array<std::pair<ReasonCode, const char*>, 4> kCodes{{
    {ReasonCode::UnrecognizedScreen, "UNRECOGNIZED_SCREEN"},
    {ReasonCode::RelocationRequired, "RELOCATION_REQUIRED"},
    {ReasonCode::OutOfReach, "OUT_OF_REACH"},
    {ReasonCode::Internal, "INTERNAL"},
}};
}  // namespace

std::string to_string(ReasonCode code) {
  for (const auto& [c, name] : kCodes)
    if (c == code) return name;
  return "INTERNAL";
}

std::optional<ReasonCode> parse_reason_code(std::string_view text) {
  for (const auto& [c, name] : kCodes)
    if (text == name) return c;
  return std::nullopt;
}

std::string encode_frame(const Json& message) {
  const std::string body = message.dump();
  if (body.size() > kMaxFrameBytes) throw Error(ErrorKind::Protocol, "message exceeds frame limit");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xFF));
  out.push_back(static_cast<char>((n >> 16) & 0xFF));
  out.push_back(static_cast<char>((n >> 8) & 0xFF));
  out.push_back(static_cast<char>(n & 0xFF));
  out += body;
  return out;
}

std::string message_type(const Json& message) {
  if (!message.is_object()) return "";
  const auto it = message.find("type");
  return it != message.end() && it->is_string() ? it->get<std::string>() : "";
}

void FrameDecoder::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<Json> FrameDecoder::next() {
  if (buffer_.size() < 4) return std::nullopt;
  const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(buffer_[i])); };
  const std::uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
  if (n > kMaxFrameBytes) throw Error(ErrorKind::Protocol, "frame length " + std::to_string(n) + " exceeds limit");
  if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  Json message = Json::parse(buffer_.begin() + 4, buffer_.begin() + 4 + n, nullptr, false);
  buffer_.erase(0, 4 + static_cast<std::size_t>(n));
  if (message.is_discarded() || !message.is_object()) throw Error(ErrorKind::Protocol, "frame is not a JSON object");
  return message;
}

namespace msg {

Json hello(std::string_view role, std::optional<std::string> session_id) {
  Json m{{"type", "hello"}, {"role", role}};
  if (session_id) m["session_id"] = *session_id;
  return m;
}

Json error(ReasonCode code, std::string_view detail) {
  return {{"type", "error"}, {"code", to_string(code)}, {"detail", detail}};
}

Json select(std::string_view element_id) { return {{"type", "select"}, {"element_id", element_id}}; }

Json touch_cmd(double theta_deg, double r_mm) { return {{"type", "touch_cmd"}, {"theta_deg", theta_deg}, {"r_mm", r_mm}}; }

Json touch_done(const std::optional<std::string>& hit, bool screen_changed) {
  return {{"type", "touch_done"}, {"hit", hit ? Json(*hit) : Json(nullptr)}, {"screen_changed", screen_changed}};
}

}  // namespace msg

void Mailbox::push(Json message) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    queue_.push_back(std::move(message));
  }
  cv_.notify_one();
}

std::optional<Json> Mailbox::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  Json m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

void Mailbox::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Mailbox::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

}  // namespace kioskbot

#pragma once

// The physical side of a session in simulation: a kiosk plus the bot sitting
// on it, speaking the bot half of the protocol.

#include <array>
#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/interface.hpp"
#include "kioskbot/protocol.hpp"

namespace kioskbot {

/// photos {session_id, shots: [{internal_angle_deg, png_base64} x3]}
Json photos_message(const std::string& session_id, std::span<const CameraShot, 3> shots);
/// Inverse of photos_message; shots get `model`. Throws Protocol or ImageFormat.
std::array<CameraShot, 3> decode_photos(const Json& message, const CameraModel& model);

class DeviceTwin {
 public:
  DeviceTwin(std::shared_ptr<const InterfaceRecord> record, ErrorModel errors = {}, CameraModel camera = {},
             PerturbationModel perturb = PerturbationModel::none());

  Kiosk& kiosk() { return kiosk_; }
  const Kiosk& kiosk() const { return kiosk_; }
  BotSim& bot() { return bot_; }
  const BotSim& bot() const { return bot_; }
  const std::vector<TouchReport>& reports() const { return reports_; }

  /// The user's hand: attaches the bot at a new spot. Kiosk state is kept.
  BotPose place(Point2 position, double orientation_deg);
  std::array<CameraShot, 3> capture();
  Json capture_photos(const std::string& session_id);

  /// Replies to one server message. touch_cmd yields touch_done (or an error
  /// if the bot refuses the motion); every other message yields nothing.
  std::vector<Json> respond(const Json& message);

 private:
  Kiosk kiosk_;
  BotSim bot_;
  CameraModel camera_;
  PerturbationModel perturb_;
  std::uint64_t captures_ = 0;
  std::vector<TouchReport> reports_;
};

/// Runs a DeviceTwin behind a Link on a background thread.
class BotAgent {
 public:
  BotAgent(DeviceTwin& twin, Link& link);
  ~BotAgent();
  BotAgent(const BotAgent&) = delete;
  BotAgent& operator=(const BotAgent&) = delete;

  /// Sends hello and waits for the session id (joins an existing session
  /// when one is given). Must precede start(). Throws Protocol on timeout.
  std::string join(std::optional<std::string> session_id = std::nullopt,
                   std::chrono::milliseconds timeout = std::chrono::seconds(10));
  void start();
  void stop();

  /// Re-places the bot and uploads a fresh photo set.
  void place_and_upload(Point2 position, double orientation_deg);

  /// Invoked on the agent thread for every message sent or received.
  void set_observer(std::function<void(std::string_view direction, const Json&)> observer);

  /// Serializes access to the twin's state with the agent thread.
  template <typename F>
  auto with_twin(F&& f) {
    std::lock_guard lock(mutex_);
    return f(twin_);
  }

 private:
  void send(const Json& message);
  void run();

  DeviceTwin& twin_;
  Link& link_;
  std::string session_id_;
  std::mutex mutex_;
  std::function<void(std::string_view, const Json&)> observer_;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace kioskbot

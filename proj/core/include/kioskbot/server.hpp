#pragma once

// Transport-neutral session server. Every link (bot or phone) is an opaque
// id with a sink for outgoing messages; transports feed inbound messages to
// handle(). Sessions join one bot link and one phone link.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/localization.hpp"
#include "kioskbot/protocol.hpp"

namespace kioskbot {

class DeviceTwin;

enum class SessionState { AwaitingPlacement, Localizing, Ready, Executing, RelocationRequired, Failed };
std::string to_string(SessionState state);

struct UIItem {
  std::string element_id;
  std::string role;  // "button" or "text"
  std::string label;
  bool enabled = false;

  bool operator==(const UIItem&) const = default;
};

struct UITree {
  std::string screen_id;
  std::vector<UIItem> items;

  bool operator==(const UITree&) const = default;
};

/// One item per element in database order; clickable elements are enabled
/// buttons, everything else is text. Throws SchemaError for unknown screens.
UITree generate_ui(const InterfaceRecord& record, std::string_view screen_id);
Json ui_message(const UITree& tree);
UITree parse_ui_message(const Json& message);

/// Pose recovery backend. `interface_id`/`screen_id` are set when the session
/// already knows where it is (re-localization after a move).
using Localizer = std::function<LocalizationResult(std::span<const CameraShot, 3> shots,
                                                   const std::optional<std::string>& interface_id,
                                                   const std::optional<std::string>& screen_id)>;

/// Identify over all home screens, then locate; or locate directly against
/// the given screen of a known interface.
Localizer vision_localizer(std::shared_ptr<const InterfaceStore> store);

struct SessionSnapshot {
  std::string session_id;
  SessionState state = SessionState::AwaitingPlacement;
  std::optional<std::string> interface_id;
  std::optional<BotPose> pose;
  std::optional<std::string> active_screen_id;
  double pole_deg = 0.0;
  std::optional<std::string> pending_element;
  double last_activity_s = 0.0;
};

struct ServerOptions {
  CameraModel camera;
  BotGeometry geometry;
  /// Error model and camera degradation for bots the server simulates itself
  /// (see the "simulate" message).
  ErrorModel device_errors;
  PerturbationModel device_perturb = PerturbationModel::none();
  std::uint64_t seed = 0;
  double idle_timeout_s = 600.0;
};

/// Copy of a message safe to log: photo payloads are reduced to a count.
Json summarize_message(const Json& message);

class ServerCore {
 public:
  using LinkId = std::uint64_t;
  using Sink = std::function<void(const Json&)>;

  explicit ServerCore(std::shared_ptr<const InterfaceStore> store, ServerOptions options = {});
  ~ServerCore();
  ServerCore(const ServerCore&) = delete;
  ServerCore& operator=(const ServerCore&) = delete;

  const InterfaceStore& store() const { return *store_; }
  const ServerOptions& options() const { return options_; }

  /// Registers a transport endpoint. The sink is called from whichever
  /// thread handles the triggering message, never under a server lock.
  LinkId connect(Sink sink);
  /// Detaches the link; its session survives until reaped.
  void disconnect(LinkId link);
  /// Processes one inbound message and everything it triggers.
  void handle(LinkId link, const Json& message);

  std::string start_session();
  std::vector<std::string> session_ids() const;
  std::optional<SessionSnapshot> snapshot(std::string_view session_id) const;
  /// Overwrites (or creates) a session's state. Links stay attached. Throws
  /// SchemaError when a localized state lacks its interface, screen or pose.
  void restore(const SessionSnapshot& snapshot);
  /// Drops sessions idle for longer than the timeout; returns how many.
  std::size_t reap_idle();

  void set_localizer(Localizer localizer);
  /// Seconds; defaults to a steady clock started at construction.
  void set_clock(std::function<double()> clock);
  /// One JSON event per protocol message in either direction.
  void set_event_listener(std::function<void(const Json&)> listener);

 private:
  struct Session;
  struct LinkInfo;
  struct Outgoing {
    LinkId link;
    Json message;
    /// Fed back into the server as if sent by `link` (simulated bots).
    bool inbound = false;
  };
  using Outbox = std::vector<Outgoing>;

  void process(LinkId from, const Json& message, Outbox& out);
  void on_hello(LinkId from, const Json& message, Outbox& out);
  void on_photos(LinkId from, Session& session, const Json& message, Outbox& out);
  void on_select(LinkId from, Session& session, const Json& message, Outbox& out);
  void on_touch_done(LinkId from, Session& session, const Json& message, Outbox& out);
  void on_bot_error(Session& session, const Json& message, Outbox& out);
  void on_simulate(LinkId from, Session& session, const Json& message, Outbox& out);
  void deliver(Outbox& out, std::vector<std::pair<LinkId, Json>>& work);
  void emit_event(LinkId link, std::string_view direction, const Json& message);
  std::shared_ptr<Session> session_of(LinkId link) const;
  std::string new_session_locked();

  std::shared_ptr<const InterfaceStore> store_;
  ServerOptions options_;
  Localizer localizer_;
  std::function<double()> clock_;
  std::function<void(const Json&)> listener_;
  mutable std::mutex mutex_;
  std::map<LinkId, std::shared_ptr<LinkInfo>> links_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  LinkId next_link_ = 1;
  std::uint64_t next_session_ = 1;
  std::mutex listener_mutex_;
};

/// In-process link to a ServerCore.
class LocalLink : public Link {
 public:
  explicit LocalLink(ServerCore& core);
  ~LocalLink() override;

  void send(const Json& message) override;
  std::optional<Json> receive(std::chrono::milliseconds timeout) override;
  void close() override;
  ServerCore::LinkId id() const { return id_; }

 private:
  ServerCore& core_;
  std::shared_ptr<Mailbox> inbox_;
  ServerCore::LinkId id_;
  bool open_ = true;
};

}  // namespace kioskbot

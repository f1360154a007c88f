#include "kioskbot/server.hpp"

#include <chrono>
#include <deque>

#include "kioskbot/device.hpp"
#include "kioskbot/error.hpp"

namespace kioskbot {

std::string to_string(SessionState state) {
  switch (state) {
    case SessionState::AwaitingPlacement: return "AwaitingPlacement";
    case SessionState::Localizing: return "Localizing";
    case SessionState::Ready: return "Ready";
    case SessionState::Executing: return "Executing";
    case SessionState::RelocationRequired: return "RelocationRequired";
    case SessionState::Failed: return "Failed";
  }
  return "Failed";
}

UITree generate_ui(const InterfaceRecord& record, std::string_view screen_id) {
  const Screen& screen = record.screen(screen_id);
  UITree tree{screen.screen_id, {}};
  tree.items.reserve(screen.elements.size());
  for (const auto& e : screen.elements) {
    tree.items.push_back({e.element_id, e.clickable ? "button" : "text", e.text, e.clickable});
  }
  return tree;
}

Json ui_message(const UITree& tree) {
  Json items = Json::array();
  for (const auto& it : tree.items) {
    items.push_back({{"element_id", it.element_id}, {"role", it.role}, {"label", it.label}, {"enabled", it.enabled}});
  }
  return {{"type", "ui"}, {"screen_id", tree.screen_id}, {"items", std::move(items)}};
}

UITree parse_ui_message(const Json& message) {
  try {
    UITree tree{message.at("screen_id").get<std::string>(), {}};
    for (const auto& it : message.at("items")) {
      tree.items.push_back({it.at("element_id").get<std::string>(), it.at("role").get<std::string>(),
                            it.at("label").get<std::string>(), it.at("enabled").get<bool>()});
    }
    return tree;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed ui message: ") + e.what());
  }
}

Localizer vision_localizer(std::shared_ptr<const InterfaceStore> store) {
  return [store](std::span<const CameraShot, 3> shots, const std::optional<std::string>& interface_id,
                 const std::optional<std::string>& screen_id) {
    if (interface_id) {
      const StoredInterface& iface = store->get(*interface_id);
      return locate(shots, iface, screen_id ? *screen_id : iface.record->home_screen_id, store->config());
    }
    const IdentificationResult id = identify_interface(std::span<const CameraShot>(shots.data(), 3), *store);
    return locate(shots, store->get(id.interface_id), store->config());
  };
}

Json summarize_message(const Json& message) {
  if (!message.is_object()) return message;
  Json out = message;
  const auto it = out.find("shots");
  if (it != out.end()) *it = it->is_array() ? Json(it->size()) : Json(nullptr);
  return out;
}

struct ServerCore::Session {
  std::mutex mutex;
  SessionSnapshot s;
  std::optional<LinkId> bot_link;
  std::optional<LinkId> phone_link;
  std::unique_ptr<DeviceTwin> twin;
  std::optional<LinkId> twin_link;
  std::mutex twin_mutex;
};

struct ServerCore::LinkInfo {
  Sink sink;
  std::string role;
  std::string session_id;
  /// Set for bots the server simulates: deliveries go straight to the twin.
  std::weak_ptr<Session> hosted;
};

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Json location_message(const LocalizationResult& r) {
  return {{"type", "location"},        {"x_mm", r.pose.position.x},       {"y_mm", r.pose.position.y},
          {"orientation_deg", r.pose.orientation_deg}, {"residual_mm", r.residual_mm},
          {"interface_id", r.interface_id}, {"screen_id", r.screen_id}};
}

}  // namespace

ServerCore::ServerCore(std::shared_ptr<const InterfaceStore> store, ServerOptions options)
    : store_(std::move(store)), options_(options), localizer_(vision_localizer(store_)) {
  const auto start = std::chrono::steady_clock::now();
  clock_ = [start] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
}

ServerCore::~ServerCore() = default;

void ServerCore::set_localizer(Localizer localizer) { localizer_ = std::move(localizer); }
void ServerCore::set_clock(std::function<double()> clock) { clock_ = std::move(clock); }
void ServerCore::set_event_listener(std::function<void(const Json&)> listener) {
  std::lock_guard lock(listener_mutex_);
  listener_ = std::move(listener);
}

ServerCore::LinkId ServerCore::connect(Sink sink) {
  std::lock_guard lock(mutex_);
  const LinkId id = next_link_++;
  auto info = std::make_shared<LinkInfo>();
  info->sink = std::move(sink);
  links_[id] = std::move(info);
  return id;
}

void ServerCore::disconnect(LinkId link) {
  std::lock_guard lock(mutex_);
  const auto it = links_.find(link);
  if (it == links_.end()) return;
  const auto s = sessions_.find(it->second->session_id);
  if (s != sessions_.end()) {
    std::lock_guard slock(s->second->mutex);
    if (s->second->bot_link == link) s->second->bot_link.reset();
    if (s->second->phone_link == link) s->second->phone_link.reset();
  }
  links_.erase(it);
}

std::string ServerCore::new_session_locked() {
  std::string id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s-%04llx-%012llx", static_cast<unsigned long long>(next_session_ & 0xFFFF),
                  static_cast<unsigned long long>(splitmix(options_.seed ^ next_session_) & 0xFFFFFFFFFFFFull));
    ++next_session_;
    id = buf;
  } while (sessions_.count(id));
  auto session = std::make_shared<Session>();
  session->s.session_id = id;
  session->s.last_activity_s = clock_();
  sessions_.emplace(id, std::move(session));
  return id;
}

std::string ServerCore::start_session() {
  std::lock_guard lock(mutex_);
  return new_session_locked();
}

std::vector<std::string> ServerCore::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

std::optional<SessionSnapshot> ServerCore::snapshot(std::string_view session_id) const {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    s = it->second;
  }
  std::lock_guard slock(s->mutex);
  return s->s;
}

void ServerCore::restore(const SessionSnapshot& snapshot) {
  if (snapshot.session_id.empty()) throw Error(ErrorKind::SchemaError, "snapshot needs a session_id");
  const SessionState st = snapshot.state;
  if (st == SessionState::Ready || st == SessionState::Executing || st == SessionState::RelocationRequired) {
    if (!snapshot.interface_id || !snapshot.pose || !snapshot.active_screen_id)
      throw Error(ErrorKind::SchemaError, "a localized snapshot needs interface_id, pose and active_screen_id");
    const StoredInterface* iface = store_->find(*snapshot.interface_id);
    if (!iface || !iface->record->find_screen(*snapshot.active_screen_id))
      throw Error(ErrorKind::SchemaError, "snapshot names an unknown interface or screen");
  }
  if (st == SessionState::Executing && !snapshot.pending_element)
    throw Error(ErrorKind::SchemaError, "an executing snapshot needs pending_element");
  std::lock_guard lock(mutex_);
  auto& slot = sessions_[snapshot.session_id];
  if (!slot) slot = std::make_shared<Session>();
  std::lock_guard slock(slot->mutex);
  slot->s = snapshot;
}

std::size_t ServerCore::reap_idle() {
  std::lock_guard lock(mutex_);
  const double now = clock_();
  std::size_t reaped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard slock(it->second->mutex);
      idle = now - it->second->s.last_activity_s > options_.idle_timeout_s;
      if (idle && it->second->twin_link) links_.erase(*it->second->twin_link);
    }
    if (idle) {
      for (auto& [id, info] : links_)
        if (info->session_id == it->first) info->session_id.clear();
      it = sessions_.erase(it);
      ++reaped;
    } else {
      ++it;
    }
  }
  return reaped;
}

std::shared_ptr<ServerCore::Session> ServerCore::session_of(LinkId link) const {
  std::lock_guard lock(mutex_);
  const auto it = links_.find(link);
  if (it == links_.end() || it->second->session_id.empty()) return nullptr;
  const auto s = sessions_.find(it->second->session_id);
  return s == sessions_.end() ? nullptr : s->second;
}

void ServerCore::emit_event(LinkId link, std::string_view direction, const Json& message) {
  {
    std::lock_guard lock(listener_mutex_);
    if (!listener_) return;
  }
  std::string role, session_id;
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(mutex_);
    const auto it = links_.find(link);
    if (it != links_.end()) {
      role = it->second->role;
      session_id = it->second->session_id;
      const auto s = sessions_.find(session_id);
      if (s != sessions_.end()) session = s->second;
    }
  }
  Json event{{"t", clock_()},
             {"session_id", session_id},
             {"link", link},
             {"role", role},
             {"dir", direction},
             {"type", message_type(message)},
             {"message", summarize_message(message)}};
  if (session) {
    std::lock_guard slock(session->mutex);
    event["state"] = to_string(session->s.state);
  }
  std::lock_guard lock(listener_mutex_);
  if (listener_) listener_(event);
}

void ServerCore::handle(LinkId link, const Json& message) {
  std::deque<std::pair<LinkId, Json>> work;
  work.emplace_back(link, message);
  // Each round trip with a simulated bot adds a bounded number of messages.
  for (int guard = 0; !work.empty() && guard < 64; ++guard) {
    auto [from, m] = std::move(work.front());
    work.pop_front();
    Outbox out;
    process(from, m, out);
    std::vector<std::pair<LinkId, Json>> more;
    deliver(out, more);
    for (auto& w : more) work.push_back(std::move(w));
  }
}

void ServerCore::deliver(Outbox& out, std::vector<std::pair<LinkId, Json>>& work) {
  for (auto& [link, m, inbound] : out) {
    if (inbound) {
      work.emplace_back(link, std::move(m));
      continue;
    }
    std::shared_ptr<LinkInfo> info;
    {
      std::lock_guard lock(mutex_);
      const auto it = links_.find(link);
      if (it != links_.end()) info = it->second;
    }
    if (!info) continue;
    emit_event(link, "out", m);
    if (auto hosted = info->hosted.lock()) {
      std::vector<Json> replies;
      {
        std::lock_guard tlock(hosted->twin_mutex);
        if (hosted->twin) replies = hosted->twin->respond(m);
      }
      for (auto& r : replies) work.emplace_back(link, std::move(r));
    } else if (info->sink) {
      info->sink(m);
    }
  }
}

void ServerCore::process(LinkId from, const Json& message, Outbox& out) {
  emit_event(from, "in", message);
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string()) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "message needs a string \"type\""));
    return;
  }
  const std::string type = message["type"].get<std::string>();
  if (type == "hello") {
    on_hello(from, message, out);
    return;
  }
  const auto session = session_of(from);
  if (!session) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "send hello before " + type));
    return;
  }
  std::string role;
  {
    std::lock_guard lock(mutex_);
    role = links_.at(from)->role;
  }
  {
    std::lock_guard slock(session->mutex);
    session->s.last_activity_s = clock_();
  }
  const auto require = [&](std::string_view expected) {
    if (role == expected) return true;
    out.emplace_back(from, msg::error(ReasonCode::Internal, type + " is only accepted from the " + std::string(expected)));
    return false;
  };
  try {
    if (type == "photos") {
      if (require("bot")) on_photos(from, *session, message, out);
    } else if (type == "select") {
      if (require("phone")) on_select(from, *session, message, out);
    } else if (type == "touch_done") {
      if (require("bot")) on_touch_done(from, *session, message, out);
    } else if (type == "error") {
      if (role == "bot") on_bot_error(*session, message, out);
    } else if (type == "simulate") {
      if (require("phone")) on_simulate(from, *session, message, out);
    } else {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "unexpected message type " + type));
    }
  } catch (const std::exception& e) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, e.what()));
  }
}

void ServerCore::on_hello(LinkId from, const Json& message, Outbox& out) {
  const std::string role = message.contains("role") && message["role"].is_string() ? message["role"].get<std::string>() : "";
  if (role != "bot" && role != "phone") {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "hello role must be bot or phone"));
    return;
  }
  std::lock_guard lock(mutex_);
  const auto info_it = links_.find(from);
  if (info_it == links_.end()) return;
  LinkInfo& info = *info_it->second;
  std::string sid;
  if (message.contains("session_id") && !message["session_id"].is_null()) {
    if (!message["session_id"].is_string() || !sessions_.count(message["session_id"].get<std::string>())) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "unknown session"));
      return;
    }
    sid = message["session_id"].get<std::string>();
  } else {
    sid = new_session_locked();
  }
  Session& session = *sessions_.at(sid);
  std::lock_guard slock(session.mutex);
  if (role == "bot" && session.twin) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "session is driven by a simulated bot"));
    return;
  }
  if (!info.session_id.empty() && info.session_id != sid) {
    const auto old = sessions_.find(info.session_id);
    if (old != sessions_.end()) {
      std::lock_guard olock(old->second->mutex);
      if (old->second->bot_link == from) old->second->bot_link.reset();
      if (old->second->phone_link == from) old->second->phone_link.reset();
    }
  }
  auto& slot = role == "bot" ? session.bot_link : session.phone_link;
  if (slot && *slot != from) {
    const auto prev = links_.find(*slot);
    if (prev != links_.end()) prev->second->session_id.clear();
  }
  slot = from;
  info.role = role;
  info.session_id = sid;
  session.s.last_activity_s = clock_();
  out.emplace_back(from, msg::hello(role, sid));
  if (role == "phone" && session.s.interface_id && session.s.active_screen_id &&
      (session.s.state == SessionState::Ready || session.s.state == SessionState::Executing)) {
    out.emplace_back(from, ui_message(generate_ui(*store_->get(*session.s.interface_id).record, *session.s.active_screen_id)));
  }
}

void ServerCore::on_photos(LinkId from, Session& session, const Json& message, Outbox& out) {
  std::array<CameraShot, 3> shots;
  std::optional<std::string> interface_id, screen_id;
  {
    std::lock_guard lock(session.mutex);
    const SessionState st = session.s.state;
    if (st == SessionState::Localizing || st == SessionState::Executing) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "photos rejected while " + to_string(st)));
      return;
    }
    if (message.contains("session_id") &&
        (!message["session_id"].is_string() || message["session_id"].get<std::string>() != session.s.session_id)) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "photos name a different session"));
      return;
    }
    try {
      shots = decode_photos(message, options_.camera);
    } catch (const Error& e) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, e.what()));
      return;
    }
    interface_id = session.s.interface_id;
    if (interface_id) screen_id = session.s.active_screen_id;
    session.s.state = SessionState::Localizing;
  }

  std::optional<LocalizationResult> result;
  std::optional<ReasonCode> code;
  std::string detail;
  try {
    result = localizer_(shots, interface_id, screen_id);
  } catch (const Error& e) {
    code = e.kind() == ErrorKind::InsufficientFeatures ? ReasonCode::UnrecognizedScreen : ReasonCode::Internal;
    detail = e.what();
  } catch (const std::exception& e) {
    code = ReasonCode::Internal;
    detail = e.what();
  }

  std::lock_guard lock(session.mutex);
  if (session.s.state != SessionState::Localizing) return;
  if (result) {
    session.s.interface_id = result->interface_id;
    session.s.active_screen_id = result->screen_id;
    session.s.pose = result->pose;
    session.s.pole_deg = shots[2].internal_angle_deg;
    session.s.state = SessionState::Ready;
    const Json loc = location_message(*result);
    if (session.bot_link) out.emplace_back(*session.bot_link, loc);
    if (session.phone_link) {
      out.emplace_back(*session.phone_link, loc);
      out.emplace_back(*session.phone_link,
                       ui_message(generate_ui(*store_->get(result->interface_id).record, result->screen_id)));
    }
  } else {
    session.s.state = SessionState::Failed;
    session.s.pose.reset();
    const Json err = msg::error(*code, detail);
    if (session.bot_link) out.emplace_back(*session.bot_link, err);
    if (session.phone_link) out.emplace_back(*session.phone_link, err);
  }
}

void ServerCore::on_select(LinkId from, Session& session, const Json& message, Outbox& out) {
  std::lock_guard lock(session.mutex);
  auto& s = session.s;
  if (s.state != SessionState::Ready) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "selection rejected while " + to_string(s.state)));
    return;
  }
  if (!message.contains("element_id") || !message["element_id"].is_string()) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "select needs a string element_id"));
    return;
  }
  const std::string element_id = message["element_id"].get<std::string>();
  const InterfaceRecord& record = *store_->get(*s.interface_id).record;
  const Element* element = record.screen(*s.active_screen_id).find_element(element_id);
  if (!element || !element->clickable) {
    out.emplace_back(from, msg::error(ReasonCode::Internal,
                                      "unknown element " + element_id + " on screen " + *s.active_screen_id));
    return;
  }
  if (!session.bot_link) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "no bot attached to the session"));
    return;
  }
  if (check_occlusion(*s.pose, *element, options_.geometry)) {
    s.state = SessionState::RelocationRequired;
    out.emplace_back(from, msg::error(ReasonCode::RelocationRequired, element_id + " lies under the bot base"));
    return;
  }
  MotionPlan plan;
  try {
    plan = plan_motion(*s.pose, s.pole_deg, element->bbox_mm.center(), options_.geometry);
  } catch (const Error& e) {
    out.emplace_back(from, msg::error(ReasonCode::OutOfReach, e.what()));
    return;
  }
  s.state = SessionState::Executing;
  s.pending_element = element_id;
  s.pole_deg = plan.target.theta_deg;
  out.emplace_back(*session.bot_link, msg::touch_cmd(plan.target.theta_deg, plan.target.r_mm));
}

void ServerCore::on_touch_done(LinkId from, Session& session, const Json& message, Outbox& out) {
  std::lock_guard lock(session.mutex);
  auto& s = session.s;
  if (s.state != SessionState::Executing) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "touch_done while " + to_string(s.state)));
    return;
  }
  const Json hit_field = message.value("hit", Json(nullptr));
  if (!hit_field.is_null() && !hit_field.is_string()) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "touch_done hit must be an element id or null"));
    return;
  }
  const Json changed_field = message.value("screen_changed", Json(false));
  if (!changed_field.is_boolean()) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "touch_done screen_changed must be boolean"));
    return;
  }
  const std::optional<std::string> hit = hit_field.is_null() ? std::nullopt : std::optional(hit_field.get<std::string>());
  bool changed = false;
  if (changed_field.get<bool>() && hit) {
    const InterfaceRecord& record = *store_->get(*s.interface_id).record;
    const Element* e = record.screen(*s.active_screen_id).find_element(*hit);
    if (e && e->target_screen && record.find_screen(*e->target_screen)) {
      s.active_screen_id = *e->target_screen;
      changed = true;
    }
  }
  s.state = SessionState::Ready;
  const std::string requested = s.pending_element.value_or("");
  s.pending_element.reset();
  if (session.phone_link) {
    Json done = msg::touch_done(hit, changed);
    done["element_id"] = requested;
    done["screen_id"] = *s.active_screen_id;
    out.emplace_back(*session.phone_link, std::move(done));
    if (changed) {
      out.emplace_back(*session.phone_link,
                       ui_message(generate_ui(*store_->get(*s.interface_id).record, *s.active_screen_id)));
    }
  }
}

void ServerCore::on_bot_error(Session& session, const Json& message, Outbox& out) {
  std::lock_guard lock(session.mutex);
  if (session.s.state != SessionState::Executing) return;
  const auto text = [&](const char* key, std::string fallback) {
    const auto it = message.find(key);
    return it != message.end() && it->is_string() ? it->get<std::string>() : fallback;
  };
  const auto code = parse_reason_code(text("code", "")).value_or(ReasonCode::Internal);
  session.s.state = code == ReasonCode::RelocationRequired ? SessionState::RelocationRequired : SessionState::Ready;
  session.s.pending_element.reset();
  if (session.phone_link) out.emplace_back(*session.phone_link, msg::error(code, text("detail", "bot refused the motion")));
}

void ServerCore::on_simulate(LinkId from, Session& session, const Json& message, Outbox& out) {
  std::scoped_lock lock(mutex_, session.mutex);
  auto& s = session.s;
  for (const char* key : {"x_mm", "y_mm", "orientation_deg"}) {
    if (!message.contains(key) || !message[key].is_number()) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, std::string("simulate needs numeric ") + key));
      return;
    }
  }
  if (s.state == SessionState::Localizing || s.state == SessionState::Executing) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "cannot move the bot while " + to_string(s.state)));
    return;
  }
  if (session.bot_link && session.bot_link != session.twin_link) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "session already has a physical bot"));
    return;
  }
  std::lock_guard tlock(session.twin_mutex);
  if (!session.twin) {
    if (!message.contains("interface_id") || !message["interface_id"].is_string()) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "simulate needs an interface_id"));
      return;
    }
    const StoredInterface* iface = store_->find(message["interface_id"].get<std::string>());
    if (!iface) {
      out.emplace_back(from, msg::error(ReasonCode::Internal, "no interface " + message["interface_id"].get<std::string>()));
      return;
    }
    const std::uint64_t salt = splitmix(options_.seed ^ std::hash<std::string>{}(s.session_id));
    ErrorModel errors = options_.device_errors;
    errors.seed ^= salt;
    PerturbationModel perturb = options_.device_perturb;
    perturb.seed ^= splitmix(salt);
    session.twin = std::make_unique<DeviceTwin>(iface->record, errors, options_.camera, perturb);
    const LinkId id = next_link_++;
    auto info = std::make_shared<LinkInfo>();
    info->role = "bot";
    info->session_id = s.session_id;
    info->hosted = sessions_.at(s.session_id);
    links_[id] = std::move(info);
    session.twin_link = id;
    session.bot_link = id;
  } else if (message.contains("interface_id") &&
             message["interface_id"] != Json(session.twin->kiosk().interface().interface_id)) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, "the simulated kiosk runs a different interface"));
    return;
  }
  try {
    session.twin->place({message["x_mm"].get<double>(), message["y_mm"].get<double>()},
                        message["orientation_deg"].get<double>());
  } catch (const Error& e) {
    out.emplace_back(from, msg::error(ReasonCode::Internal, e.what()));
    return;
  }
  Json photos = session.twin->capture_photos(s.session_id);
  out.emplace_back(*session.twin_link, std::move(photos), true);
}

LocalLink::LocalLink(ServerCore& core) : core_(core), inbox_(std::make_shared<Mailbox>()) {
  id_ = core_.connect([inbox = inbox_](const Json& m) { inbox->push(m); });
}

LocalLink::~LocalLink() { close(); }

void LocalLink::send(const Json& message) {
  if (open_) core_.handle(id_, message);
}

std::optional<Json> LocalLink::receive(std::chrono::milliseconds timeout) { return inbox_->pop(timeout); }

void LocalLink::close() {
  if (!open_) return;
  open_ = false;
  core_.disconnect(id_);
  inbox_->close();
}

}  // namespace kioskbot

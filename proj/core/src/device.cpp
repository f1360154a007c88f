#include "kioskbot/device.hpp"

#include "kioskbot/error.hpp"

namespace kioskbot {

Json photos_message(const std::string& session_id, std::span<const CameraShot, 3> shots) {
  Json list = Json::array();
  for (const auto& s : shots) {
    const auto png = encode_png(s.image);
    list.push_back({{"internal_angle_deg", s.internal_angle_deg}, {"png_base64", base64_encode(png)}});
  }
  return {{"type", "photos"}, {"session_id", session_id}, {"shots", std::move(list)}};
}

std::array<CameraShot, 3> decode_photos(const Json& message, const CameraModel& model) {
  const auto it = message.find("shots");
  if (it == message.end() || !it->is_array() || it->size() != 3) {
    throw Error(ErrorKind::Protocol, "photos needs exactly three shots");
  }
  std::array<CameraShot, 3> shots;
  for (std::size_t i = 0; i < 3; ++i) {
    const Json& s = (*it)[i];
    if (!s.is_object() || !s.contains("internal_angle_deg") || !s["internal_angle_deg"].is_number() ||
        !s.contains("png_base64") || !s["png_base64"].is_string()) {
      throw Error(ErrorKind::Protocol, "shot " + std::to_string(i) + " lacks internal_angle_deg or png_base64");
    }
    GrayImage img = decode_png(base64_decode(s["png_base64"].get<std::string>()));
    if (img.width() != model.image_width || img.height() != model.image_height) {
      throw Error(ErrorKind::ImageFormat, "shot " + std::to_string(i) + " has the wrong dimensions");
    }
    shots[i] = {std::move(img), normalize_degrees(s["internal_angle_deg"].get<double>()), model};
  }
  return shots;
}

DeviceTwin::DeviceTwin(std::shared_ptr<const InterfaceRecord> record, ErrorModel errors, CameraModel camera,
                       PerturbationModel perturb)
    : kiosk_(std::move(record)), bot_(errors), camera_(camera), perturb_(perturb) {}

BotPose DeviceTwin::place(Point2 position, double orientation_deg) {
  return bot_.place(kiosk_.interface(), position, orientation_deg);
}

std::array<CameraShot, 3> DeviceTwin::capture() {
  PerturbationModel p = perturb_;
  p.seed = perturb_.seed + 0x100000001B3ull * ++captures_;
  return capture_sequence(kiosk_, bot_, camera_, p);
}

Json DeviceTwin::capture_photos(const std::string& session_id) {
  const auto shots = capture();
  return photos_message(session_id, shots);
}

std::vector<Json> DeviceTwin::respond(const Json& message) {
  if (message_type(message) != "touch_cmd") return {};
  const auto theta = message.find("theta_deg");
  const auto r = message.find("r_mm");
  if (theta == message.end() || r == message.end() || !theta->is_number() || !r->is_number()) {
    return {msg::error(ReasonCode::Internal, "touch_cmd needs numeric theta_deg and r_mm")};
  }
  MotionPlan plan;
  plan.target = {normalize_degrees(theta->get<double>()), r->get<double>()};
  plan.predicted_duration_s =
      motion_duration_s(angle_difference_deg(plan.target.theta_deg, bot_.pole_angle_deg()), plan.target.r_mm,
                        bot_.geometry());
  try {
    plan.contact_point_nominal = polar_to_screen(plan.target, bot_.true_pose());
    TouchReport report = bot_.execute_touch(plan, kiosk_);
    reports_.push_back(report);
    return {msg::touch_done(report.outcome.hit, report.outcome.screen_changed)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfReach) return {msg::error(ReasonCode::OutOfReach, e.what())};
    if (e.kind() == ErrorKind::Occluded) return {msg::error(ReasonCode::RelocationRequired, e.what())};
    return {msg::error(ReasonCode::Internal, e.what())};
  }
}

BotAgent::BotAgent(DeviceTwin& twin, Link& link) : twin_(twin), link_(link) {}

BotAgent::~BotAgent() { stop(); }

std::string BotAgent::join(std::optional<std::string> session_id, std::chrono::milliseconds timeout) {
  send(msg::hello("bot", std::move(session_id)));
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    const auto reply = link_.receive(std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now()));
    if (!reply) break;
    if (observer_) observer_("in", *reply);
    if (message_type(*reply) == "hello" && reply->contains("session_id")) {
      session_id_ = (*reply)["session_id"].get<std::string>();
      return session_id_;
    }
    if (message_type(*reply) == "error") {
      throw Error(ErrorKind::Protocol, "server refused bot hello: " + (reply->contains("detail") ? (*reply)["detail"].dump() : std::string()));
    }
  }
  throw Error(ErrorKind::Protocol, "no hello reply from the server");
}

void BotAgent::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { run(); });
}

void BotAgent::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

void BotAgent::place_and_upload(Point2 position, double orientation_deg) {
  Json photos;
  {
    std::lock_guard lock(mutex_);
    twin_.place(position, orientation_deg);
    photos = twin_.capture_photos(session_id_);
  }
  send(photos);
}

void BotAgent::set_observer(std::function<void(std::string_view, const Json&)> observer) {
  observer_ = std::move(observer);
}

void BotAgent::send(const Json& message) {
  if (observer_) observer_("out", message);
  link_.send(message);
}

void BotAgent::run() {
  while (running_) {
    const auto m = link_.receive(std::chrono::milliseconds(50));
    if (!m) continue;
    if (observer_) observer_("in", *m);
    std::vector<Json> replies;
    {
      std::lock_guard lock(mutex_);
      replies = twin_.respond(*m);
    }
    for (const auto& r : replies) send(r);
  }
}

}  // namespace kioskbot

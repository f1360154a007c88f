#include "kioskbot/scenario.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "kioskbot/device.hpp"
#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

constexpr auto kReplyTimeout = std::chrono::seconds(60);

template <typename T>
T field(const Json& doc, const char* key, const std::string& where) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorKind::SchemaError, where + "/" + key + ": missing");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorKind::SchemaError, where + "/" + key + ": wrong type");
  }
}

}  // namespace

ScenarioSpec parse_scenario(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "scenario must be an object");
  ScenarioSpec s;
  s.name = doc.value("name", "scenario");
  s.interface_id = field<std::string>(doc, "interface_id", "");
  const Json place = field<Json>(doc, "placement", "");
  s.placement = {field<double>(place, "x_mm", "/placement"), field<double>(place, "y_mm", "/placement")};
  s.orientation_deg = place.contains("orientation_deg") ? field<double>(place, "orientation_deg", "/placement") : 0.0;
  s.selections = field<std::vector<std::string>>(doc, "selections", "");
  if (doc.contains("relocation_offset_mm")) {
    const Json off = doc["relocation_offset_mm"];
    s.relocation_offset_mm = Point2{field<double>(off, "dx", "/relocation_offset_mm"),
                                    field<double>(off, "dy", "/relocation_offset_mm")};
  }
  if (doc.contains("expect")) {
    const Json& e = doc["expect"];
    if (e.contains("final_screen")) s.expect_final_screen = field<std::string>(e, "final_screen", "/expect");
    if (e.contains("hits")) s.expect_hits = field<int>(e, "hits", "/expect");
    if (e.contains("relocations")) s.expect_relocations = field<int>(e, "relocations", "/expect");
  }
  if (doc.contains("perturbed")) s.perturbed = field<bool>(doc, "perturbed", "");
  if (doc.contains("seed")) s.seed = field<std::uint64_t>(doc, "seed", "");
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const Json doc = Json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::SchemaError, path.string() + ": not JSON");
  return parse_scenario(doc);
}

ScenarioReport drive_scenario(const ScenarioSpec& spec, std::shared_ptr<const InterfaceRecord> record, Link& phone,
                              Link& bot, const DeviceSettings& devices) {
  ScenarioReport report;
  report.name = spec.name;
  std::mutex transcript_mutex;
  const auto t0 = std::chrono::steady_clock::now();
  std::string session_id;
  const auto log = [&](std::string_view role, std::string_view dir, const Json& m) {
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::lock_guard lock(transcript_mutex);
    report.transcript.push_back({{"t", t},
                                 {"session_id", session_id},
                                 {"role", role},
                                 {"dir", dir},
                                 {"type", message_type(m)},
                                 {"message", summarize_message(m)}});
  };

  ErrorModel errors = devices.errors;
  errors.seed ^= spec.seed;
  PerturbationModel perturb = spec.perturbed ? devices.perturb : PerturbationModel::none();
  perturb.seed ^= spec.seed * 0x9E3779B97F4A7C15ull;
  DeviceTwin twin(record, errors, devices.camera, perturb);
  BotAgent agent(twin, bot);
  agent.set_observer([&](std::string_view dir, const Json& m) { log("bot", dir, m); });

  const auto phone_send = [&](const Json& m) {
    log("phone", "out", m);
    phone.send(m);
  };
  // Reads phone traffic until a message of one of the given types arrives.
  const auto phone_wait = [&](std::initializer_list<std::string_view> types) -> std::optional<Json> {
    const auto deadline = std::chrono::steady_clock::now() + kReplyTimeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto m = phone.receive(std::chrono::milliseconds(200));
      if (!m) {
        if (std::chrono::steady_clock::now() >= deadline) break;
        continue;
      }
      log("phone", "in", *m);
      const std::string type = message_type(*m);
      for (auto t : types)
        if (type == t) return m;
    }
    return std::nullopt;
  };
  const auto fail = [&](std::string why) {
    agent.stop();
    report.failure = std::move(why);
    report.total_sim_time_s = twin.bot().clock_s();
    report.final_screen = twin.kiosk().current_screen_id();
    return report;
  };

  try {
    session_id = agent.join();
  } catch (const Error& e) {
    return fail(e.what());
  }
  phone_send(msg::hello("phone", session_id));
  if (!phone_wait({"hello"})) return fail("no hello reply for the phone");
  agent.start();

  Point2 where = spec.placement;
  const auto localize = [&]() -> std::optional<std::string> {
    try {
      agent.place_and_upload(where, spec.orientation_deg);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    const auto m = phone_wait({"ui", "error"});
    if (!m) return std::string("no localization outcome");
    if ((*m)["type"] == "error") return m->value("code", "") + ": " + m->value("detail", "");
    const std::string screen = m->value("screen_id", "");
    // re-localizing in place pushes the same screen again
    if (report.screens_visited.empty() || report.screens_visited.back() != screen) report.screens_visited.push_back(screen);
    return std::nullopt;
  };
  if (auto err = localize()) return fail("localization failed: " + *err);

  for (const auto& element_id : spec.selections) {
    bool relocated = false;
    for (;;) {
      phone_send(msg::select(element_id));
      const auto m = phone_wait({"touch_done", "error"});
      if (!m) return fail("no reply to select " + element_id);
      if ((*m)["type"] == "error") {
        const std::string code = m->value("code", "");
        if (code == to_string(ReasonCode::RelocationRequired) && spec.relocation_offset_mm && !relocated) {
          relocated = true;
          ++report.relocations;
          where = where + *spec.relocation_offset_mm;
          if (auto err = localize()) return fail("re-localization failed: " + *err);
          continue;
        }
        return fail("select " + element_id + " rejected: " + code + ": " + m->value("detail", ""));
      }
      report.selected.push_back(element_id);
      if (m->value("screen_changed", false)) {
        const auto ui = phone_wait({"ui"});
        if (!ui) return fail("no ui after screen change");
        report.screens_visited.push_back(ui->value("screen_id", ""));
      }
      break;
    }
  }
  agent.stop();

  report.completed = true;
  report.touches = twin.reports();
  report.final_screen = twin.kiosk().current_screen_id();
  report.total_sim_time_s = twin.bot().clock_s();
  const auto& log_events = twin.kiosk().touch_log();
  report.unintended_touches = static_cast<int>(log_events.size()) - static_cast<int>(report.touches.size());
  for (const auto& t : report.touches)
    if (!sweep_safety_check(t, log_events)) ++report.unintended_touches;
  // Screens the touches happened on, replayed from the record.
  std::string screen = record->home_screen_id;
  for (std::size_t i = 0; i < report.touches.size(); ++i) {
    const auto& t = report.touches[i];
    const std::string wanted = i < report.selected.size() ? report.selected[i] : "";
    const Element* target = record->screen(screen).find_element(wanted);
    if (t.outcome.hit && *t.outcome.hit == wanted) ++report.hits;
    if (!target || !target->bbox_mm.contains(t.contact)) report.contacts_inside_targets = false;
    if (t.outcome.screen_changed && t.outcome.hit) {
      const Element* e = record->screen(screen).find_element(*t.outcome.hit);
      if (e && e->target_screen) screen = *e->target_screen;
    }
  }

  std::vector<std::string> problems;
  if (spec.expect_final_screen && report.final_screen != *spec.expect_final_screen) {
    problems.push_back("final screen " + report.final_screen + ", expected " + *spec.expect_final_screen);
  }
  if (spec.expect_hits && report.hits != *spec.expect_hits) {
    problems.push_back(std::to_string(report.hits) + " hits, expected " + std::to_string(*spec.expect_hits));
  }
  if (spec.expect_relocations && report.relocations != *spec.expect_relocations) {
    problems.push_back(std::to_string(report.relocations) + " relocations, expected " +
                       std::to_string(*spec.expect_relocations));
  }
  if (report.unintended_touches != 0) problems.push_back(std::to_string(report.unintended_touches) + " unintended touches");
  if (!report.contacts_inside_targets) problems.push_back("a contact landed outside its target");
  for (const auto& p : problems) report.failure += (report.failure.empty() ? "" : "; ") + p;
  report.success = problems.empty();
  return report;
}

ScenarioReport full_scenario(ServerCore& core, const ScenarioSpec& spec, const DeviceSettings& devices) {
  LocalLink phone(core);
  LocalLink bot(core);
  return drive_scenario(spec, core.store().get(spec.interface_id).record, phone, bot, devices);
}

}  // namespace kioskbot

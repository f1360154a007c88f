#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <thread>

#include "kioskbot/device.hpp"
#include "kioskbot/error.hpp"
#include "kioskbot/fixtures.hpp"
#include "kioskbot/scenario.hpp"
#include "kioskbot/server.hpp"
#include "kioskbot/tcp.hpp"
#include "protocol_fuzz.hpp"
#include "test_support.hpp"

namespace kioskbot {
namespace {

using namespace std::chrono_literals;

std::vector<Json> drain(Link& link) {
  std::vector<Json> out;
  while (auto m = link.receive(0ms)) out.push_back(*m);
  return out;
}

const Json* find_type(const std::vector<Json>& msgs, std::string_view type) {
  for (const auto& m : msgs)
    if (m.value("type", "") == type) return &m;
  return nullptr;
}

std::string join(Link& link, std::string_view role, std::optional<std::string> sid = std::nullopt) {
  link.send(msg::hello(role, std::move(sid)));
  const auto replies = drain(link);
  const Json* h = find_type(replies, "hello");
  if (!h) {
    ADD_FAILURE() << "no hello reply";
    return "";
  }
  return (*h)["session_id"].get<std::string>();
}

// Localizer that trusts a fixed answer; keeps tests off the vision path.
Localizer fixed_localizer(std::string interface_id, BotPose pose) {
  return [=](std::span<const CameraShot, 3>, const std::optional<std::string>&, const std::optional<std::string>&) {
    LocalizationResult r;
    r.interface_id = interface_id;
    r.screen_id = fixtures::build(interface_id).home_screen_id;
    r.pose = pose;
    return r;
  };
}

SessionSnapshot ready_snapshot(const std::string& sid, BotPose pose, std::string screen = "menu") {
  SessionSnapshot s;
  s.session_id = sid;
  s.state = SessionState::Ready;
  s.interface_id = fixtures::kBubbleTea;
  s.pose = pose;
  s.active_screen_id = std::move(screen);
  return s;
}

std::shared_ptr<const InterfaceRecord> bubble_record() {
  return test::fixture_store()->get(fixtures::kBubbleTea).record;
}

TEST(GenerateUi, BubbleTeaMenu) {
  const InterfaceRecord& rec = *bubble_record();
  const UITree tree = generate_ui(rec, "menu");
  EXPECT_EQ(tree.screen_id, "menu");
  ASSERT_EQ(tree.items.size(), rec.home().elements.size());
  bool avocado = false, add = false;
  for (std::size_t i = 0; i < tree.items.size(); ++i) {
    const Element& e = rec.home().elements[i];
    const UIItem& it = tree.items[i];
    EXPECT_EQ(it.element_id, e.element_id);
    EXPECT_EQ(it.label, e.text);
    EXPECT_EQ(it.role, e.clickable ? "button" : "text");
    EXPECT_EQ(it.enabled, e.clickable);
    avocado |= it.role == "button" && it.label == "Avocado Tea";
    add |= it.role == "button" && it.label == "Add";
  }
  EXPECT_TRUE(avocado);
  EXPECT_TRUE(add);
  EXPECT_EQ(ui_message(generate_ui(rec, "menu")).dump(), ui_message(tree).dump());
  EXPECT_EQ(parse_ui_message(ui_message(tree)), tree);
  EXPECT_THROW(generate_ui(rec, "nowhere"), Error);
  EXPECT_THROW(parse_ui_message(Json{{"type", "ui"}}), Error);
}

TEST(GenerateUi, AllTextScreenAndVerbatimLabels) {
  InterfaceRecord rec;
  rec.interface_id = "plain";
  rec.screen_width_mm = 100;
  rec.screen_height_mm = 60;
  rec.home_screen_id = "only";
  Screen s;
  s.screen_id = "only";
  s.image = GrayImage(200, 120);
  const std::string long_label(300, 'x');
  s.elements.push_back({"a", "Ünïcode  label", false, {0, 0, 30, 30}, std::nullopt});
  s.elements.push_back({"b", long_label, false, {40, 0, 30, 30}, std::nullopt});
  rec.screens.push_back(s);
  const UITree tree = generate_ui(rec, "only");
  ASSERT_EQ(tree.items.size(), 2u);
  for (const auto& it : tree.items) {
    EXPECT_EQ(it.role, "text");
    EXPECT_FALSE(it.enabled);
  }
  EXPECT_EQ(tree.items[0].label, "Ünïcode  label");
  EXPECT_EQ(tree.items[1].label, long_label);
}

TEST(Sessions, DistinctIdsAndHelloErrors) {
  ServerCore core(test::fixture_store());
  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.insert(core.start_session());
  EXPECT_EQ(ids.size(), 50u);
  EXPECT_EQ(core.snapshot(*ids.begin())->state, SessionState::AwaitingPlacement);

  LocalLink a(core);
  a.send(msg::hello("kiosk"));
  auto r = drain(a);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
  a.send(msg::hello("phone", std::string("s-nope")));
  r = drain(a);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
  a.send(msg::select("avocado_tea"));
  r = drain(a);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
  a.send(Json::array({1, 2}));
  a.send(Json{{"type", 7}});
  r = drain(a);
  ASSERT_EQ(r.size(), 2u);
  for (const auto& m : r) EXPECT_EQ(m["code"], "INTERNAL");

  const std::string sid = join(a, "phone");
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::AwaitingPlacement);
  a.send(Json{{"type", "teleport"}});
  r = drain(a);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
  // wrong role for the message
  a.send(msg::touch_done(std::nullopt, false));
  r = drain(a);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
}

TEST(Sessions, ReconnectKeepsTheIdAndPushesTheCurrentScreen) {
  ServerCore core(test::fixture_store());
  std::string sid;
  {
    LocalLink phone(core);
    sid = join(phone, "phone");
    core.restore(ready_snapshot(sid, {{60, 60}, 0}, "customize"));
  }
  LocalLink bot(core);
  EXPECT_EQ(join(bot, "bot", sid), sid);
  LocalLink phone2(core);
  phone2.send(msg::hello("phone", sid));
  const auto r = drain(phone2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0]["session_id"], sid);
  EXPECT_EQ(parse_ui_message(r[1]), generate_ui(*bubble_record(), "customize"));
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Ready);
}

TEST(Sessions, IdleReapUsesTheClock) {
  ServerCore core(test::fixture_store());
  double now = 0.0;
  core.set_clock([&] { return now; });
  LocalLink phone(core);
  const std::string active = join(phone, "phone");
  const std::string idle = core.start_session();
  now = 500;
  phone.send(Json{{"type", "noop"}});  // any message counts as activity
  drain(phone);
  now = 601;
  EXPECT_EQ(core.reap_idle(), 1u);
  EXPECT_FALSE(core.snapshot(idle));
  EXPECT_TRUE(core.snapshot(active));
  now = 1101;
  EXPECT_EQ(core.reap_idle(), 1u);
  EXPECT_TRUE(core.session_ids().empty());
  phone.send(msg::select("x"));
  const auto r = drain(phone);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0]["code"], "INTERNAL");
}

TEST(Sessions, RestoreValidates) {
  ServerCore core(test::fixture_store());
  const auto kind = [&](SessionSnapshot s) {
    try {
      core.restore(s);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Protocol;
  };
  SessionSnapshot s = ready_snapshot("s-x", {{60, 60}, 0});
  EXPECT_EQ(kind(s), ErrorKind::Protocol);  // fine
  SessionSnapshot no_id = s;
  no_id.session_id.clear();
  EXPECT_EQ(kind(no_id), ErrorKind::SchemaError);
  SessionSnapshot no_pose = s;
  no_pose.pose.reset();
  EXPECT_EQ(kind(no_pose), ErrorKind::SchemaError);
  SessionSnapshot bad_screen = s;
  bad_screen.active_screen_id = "lobby";
  EXPECT_EQ(kind(bad_screen), ErrorKind::SchemaError);
  SessionSnapshot bad_iface = s;
  bad_iface.interface_id = "nowhere_1";
  EXPECT_EQ(kind(bad_iface), ErrorKind::SchemaError);
  SessionSnapshot exec = s;
  exec.state = SessionState::Executing;
  EXPECT_EQ(kind(exec), ErrorKind::SchemaError);
  SessionSnapshot waiting;
  waiting.session_id = "s-y";
  EXPECT_EQ(kind(waiting), ErrorKind::Protocol);
}

TEST(Sessions, HundredConcurrentSessionsStayIndependent) {
  ServerCore core(test::fixture_store());
  const BotPose pose{{60, 60}, 0};
  core.set_localizer(fixed_localizer(fixtures::kBubbleTea, pose));
  constexpr int kSessions = 100;
  std::vector<std::string> sids(kSessions);
  std::vector<std::string> expected(kSessions);
  std::atomic<int> failures{0};
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < kSessions; i += 4) {
        LocalLink phone(core);
        sids[i] = join(phone, "phone");
        phone.send({{"type", "simulate"}, {"interface_id", fixtures::kBubbleTea}, {"x_mm", pose.position.x},
                    {"y_mm", pose.position.y}, {"orientation_deg", pose.orientation_deg}});
        std::vector<std::string> picks;
        if (i % 3 >= 1) picks.push_back("avocado_tea");
        if (i % 3 == 2) picks.push_back("add_cart");
        for (const auto& p : picks) phone.send(msg::select(p));
        std::string last_ui;
        for (const auto& m : drain(phone)) {
          if (m["type"] == "ui") last_ui = m["screen_id"];
          if (m["type"] == "error") ++failures;
        }
        expected[i] = i % 3 == 0 ? "menu" : i % 3 == 1 ? "customize" : "cart";
        if (last_ui != expected[i]) ++failures;
      }
    });
  }
  for (auto& t : workers) t.join();
  EXPECT_EQ(failures.load(), 0);
  EXPECT_EQ(std::set<std::string>(sids.begin(), sids.end()).size(), static_cast<std::size_t>(kSessions));
  for (int i = 0; i < kSessions; ++i) {
    const auto snap = core.snapshot(sids[i]);
    ASSERT_TRUE(snap);
    EXPECT_EQ(snap->state, SessionState::Ready);
    EXPECT_EQ(snap->active_screen_id, expected[i]) << i;
  }
}

// Real vision, bot driven by hand on the test side of the link.
class ManualBot : public ::testing::Test {
 protected:
  ManualBot() : core(test::fixture_store()), phone(core), bot(core), twin(bubble_record(), ErrorModel::noiseless()) {
    core.set_event_listener([this](const Json& e) { events.push_back(e); });
    sid = join(phone, "phone");
    join(bot, "bot", sid);
  }

  // Forwards touch_cmd to the twin until the bot side is quiet.
  std::vector<Json> pump() {
    std::vector<Json> cmds;
    for (bool busy = true; busy;) {
      busy = false;
      for (const auto& m : drain(bot)) {
        if (m["type"] == "touch_cmd") cmds.push_back(m);
        for (const auto& reply : twin.respond(m)) {
          bot.send(reply);
          busy = true;
        }
      }
    }
    return cmds;
  }

  ServerCore core;
  LocalLink phone;
  LocalLink bot;
  DeviceTwin twin;
  std::string sid;
  std::vector<Json> events;
};

TEST_F(ManualBot, LocalizeSelectAndStayInSync) {
  twin.place({50, 50}, -5);
  bot.send(twin.capture_photos(sid));
  auto ph = drain(phone);
  const Json* loc = find_type(ph, "location");
  ASSERT_NE(loc, nullptr);
  EXPECT_NEAR((*loc)["x_mm"].get<double>(), 50.0, 2.0);
  EXPECT_NEAR((*loc)["y_mm"].get<double>(), 50.0, 2.0);
  EXPECT_EQ((*loc)["interface_id"], fixtures::kBubbleTea);
  const Json* ui = find_type(ph, "ui");
  ASSERT_NE(ui, nullptr);
  EXPECT_EQ(parse_ui_message(*ui), generate_ui(*bubble_record(), "menu"));
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Ready);
  pump();

  // text items are not selectable
  phone.send(msg::select("price_avocado"));
  ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "INTERNAL");
  phone.send(msg::select("no_such_thing"));
  ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "INTERNAL");

  phone.send(msg::select("avocado_tea"));
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Executing);
  // a second selection during Executing is rejected, not queued
  phone.send(msg::select("add_avocado"));
  ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "INTERNAL");
  const auto cmds = pump();
  ASSERT_EQ(cmds.size(), 1u);
  ASSERT_EQ(twin.reports().size(), 1u);
  const Element* avocado = bubble_record()->home().find_element("avocado_tea");
  EXPECT_TRUE(avocado->bbox_mm.contains(twin.reports()[0].contact));
  ph = drain(phone);
  const Json* done = find_type(ph, "touch_done");
  ASSERT_NE(done, nullptr);
  EXPECT_EQ((*done)["hit"], "avocado_tea");
  ui = find_type(ph, "ui");
  ASSERT_NE(ui, nullptr);
  EXPECT_EQ((*ui)["screen_id"], twin.kiosk().current_screen_id());
  EXPECT_EQ(core.snapshot(sid)->active_screen_id, "customize");
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Ready);

  // stray touch_done outside Executing
  bot.send(msg::touch_done(std::string("back"), true));
  EXPECT_EQ(drain(bot).at(0)["code"], "INTERNAL");
  EXPECT_EQ(core.snapshot(sid)->active_screen_id, "customize");

  // one event per message, photos summarized
  bool saw_photos = false;
  for (const auto& e : events) {
    for (const char* key : {"t", "session_id", "link", "role", "dir", "type", "message"}) EXPECT_TRUE(e.contains(key));
    if (e["type"] == "photos") {
      saw_photos = true;
      EXPECT_EQ(e["message"]["shots"], 3);
    }
  }
  EXPECT_TRUE(saw_photos);
}

TEST_F(ManualBot, OcclusionAsksForRelocation) {
  // the bot base sits on top of the Add Cart button
  core.restore(ready_snapshot(sid, {{240, 185}, 0}, "customize"));
  phone.send(msg::select("add_cart"));
  auto ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "RELOCATION_REQUIRED");
  EXPECT_TRUE(pump().empty());
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::RelocationRequired);
  phone.send(msg::select("back"));
  ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "INTERNAL");
  EXPECT_TRUE(pump().empty());
}

TEST_F(ManualBot, BotRefusalIsRelayed) {
  core.restore(ready_snapshot(sid, {{60, 60}, 0}));
  phone.send(msg::select("avocado_tea"));
  drain(bot);
  bot.send(msg::error(ReasonCode::OutOfReach, "arm jammed"));
  const auto ph = drain(phone);
  ASSERT_EQ(ph.size(), 1u);
  EXPECT_EQ(ph[0]["code"], "OUT_OF_REACH");
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Ready);
}

TEST(Localization, MonochromeIsUnrecognized) {
  ServerCore core(test::fixture_store());
  LocalLink phone(core);
  const std::string sid = join(phone, "phone");
  phone.send({{"type", "simulate"}, {"interface_id", fixtures::kMonochrome}, {"x_mm", 132.75}, {"y_mm", 74.75},
              {"orientation_deg", 0}});
  const auto ph = drain(phone);
  EXPECT_EQ(find_type(ph, "ui"), nullptr);
  const Json* err = find_type(ph, "error");
  ASSERT_NE(err, nullptr);
  EXPECT_EQ((*err)["code"], "UNRECOGNIZED_SCREEN");
  EXPECT_EQ(core.snapshot(sid)->state, SessionState::Failed);
  phone.send(msg::select("start"));
  EXPECT_EQ(drain(phone).at(0)["code"], "INTERNAL");
}

TEST(Localization, IdentifiesTheKioskAmongMany) {
  ServerCore core(test::fixture_store());
  LocalLink phone(core);
  const std::string sid = join(phone, "phone");
  phone.send({{"type", "simulate"}, {"interface_id", fixtures::kAirport}, {"x_mm", 230}, {"y_mm", 130},
              {"orientation_deg", 10}});
  const auto ph = drain(phone);
  const Json* loc = find_type(ph, "location");
  ASSERT_NE(loc, nullptr);
  EXPECT_EQ((*loc)["interface_id"], fixtures::kAirport);
  EXPECT_EQ(core.snapshot(sid)->interface_id, fixtures::kAirport);
  EXPECT_EQ(parse_ui_message(*find_type(ph, "ui")).screen_id, "start");
}

TEST(Tcp, HttpEndpointsAndFramedChannel) {
  ServerCore core(test::fixture_store());
  TcpServer server(core, 0);
  ASSERT_NE(server.port(), 0);
  auto [status, body] = http_get("127.0.0.1", server.port(), "/health");
  EXPECT_EQ(status, 200);
  EXPECT_EQ(Json::parse(body)["status"], "ok");
  std::tie(status, body) = http_get("127.0.0.1", server.port(), "/interfaces");
  EXPECT_EQ(status, 200);
  std::set<std::string> ids;
  const Json listing = Json::parse(body);
  for (const auto& id : listing["interfaces"]) ids.insert(id.get<std::string>());
  for (const auto& rec : test::fixture_store()->interfaces()) EXPECT_TRUE(ids.count(rec.record->interface_id));
  std::tie(status, body) = http_get("127.0.0.1", server.port(), "/admin");
  EXPECT_EQ(status, 404);

  TcpLink link("127.0.0.1", server.port());
  link.send(msg::hello("phone"));
  const auto hello = link.receive(5s);
  ASSERT_TRUE(hello);
  EXPECT_EQ((*hello)["type"], "hello");
  const std::string sid = (*hello)["session_id"];
  EXPECT_TRUE(core.snapshot(sid));
  std::tie(status, body) = http_get("127.0.0.1", server.port(), "/health");
  EXPECT_GE(Json::parse(body)["sessions"].get<int>(), 1);
  link.send(Json{{"type", "bogus"}, {"extra", Json::array()}});
  const auto err = link.receive(5s);
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["code"], "INTERNAL");
  link.close();
  server.stop();
}

TEST(Scenario, BubbleTeaCornerAndCenter) {
  for (const char* name : {"bubble_tea_corner", "bubble_tea_center"}) {
    SCOPED_TRACE(name);
    ServerCore core(test::fixture_store());
    const ScenarioSpec spec = load_scenario(test::scenario_dir() + "/" + name + ".json");
    const ScenarioReport rep = full_scenario(core, spec);
    EXPECT_TRUE(rep.success) << rep.failure;
    EXPECT_EQ(rep.hits, 4);
    EXPECT_EQ(rep.final_screen, "done");
    EXPECT_EQ(rep.relocations, std::string(name) == "bubble_tea_center" ? 1 : 0);
    EXPECT_TRUE(rep.contacts_inside_targets);
    EXPECT_EQ(rep.unintended_touches, 0);
    EXPECT_EQ(rep.screens_visited, (std::vector<std::string>{"menu", "customize", "cart", "done"}));
  }
}

TEST(Scenario, UnknownElementFails) {
  ServerCore core(test::fixture_store());
  const ScenarioReport rep = full_scenario(core, load_scenario(test::scenario_dir() + "/bad_element.json"));
  EXPECT_FALSE(rep.success);
  bool saw_error = false;
  for (const auto& line : rep.transcript) saw_error |= line.value("type", "") == "error";
  EXPECT_TRUE(saw_error);
}

TEST(Fuzz, ShortRunHasNoViolations) {
  test::FuzzOptions options;
  options.sequences_per_state = 300;
  const test::FuzzReport rep = test::run_protocol_fuzz(test::fixture_store(), options);
  EXPECT_EQ(rep.violation_count(), 0);
  for (const auto& v : rep.violations) ADD_FAILURE() << v;
  EXPECT_EQ(rep.sequences, 6 * 300);
  EXPECT_GT(rep.touch_cmds, 0);
  EXPECT_EQ(rep.start_states.size(), 6u);
}

}  // namespace
}  // namespace kioskbot

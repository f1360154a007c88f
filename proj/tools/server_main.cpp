// kioskbot-server: serves the interface database to bots and phones.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "kioskbot/error.hpp"
#include "kioskbot/json_config.hpp"
#include "kioskbot/localization.hpp"
#include "kioskbot/server.hpp"
#include "kioskbot/tcp.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kiosk bot session server"};
  std::string db, bind = "127.0.0.1", error_model, log_path;
  int port = 7878;
  std::uint64_t seed = 0;
  double idle_timeout = 600.0;
  bool noiseless_camera = false;
  app.add_option("--db", db, "Interface database directory")->required();
  app.add_option("--port", port, "Listening port (0 picks one)")->check(CLI::Range(0, 65535));
  app.add_option("--bind", bind, "Listening address");
  app.add_option("--seed", seed, "Seed for simulated bots");
  app.add_option("--error-model", error_model, "Actuation error model for simulated bots (JSON or file)");
  app.add_option("--log", log_path, "JSON-lines event log");
  app.add_option("--idle-timeout", idle_timeout, "Seconds before an idle session is dropped");
  app.add_flag("--noiseless-camera", noiseless_camera, "Simulated bots take clean photos");
  CLI11_PARSE(app, argc, argv);

  try {
    kioskbot::ServerOptions options;
    options.seed = seed;
    options.idle_timeout_s = idle_timeout;
    options.device_errors.seed = seed;
    if (!error_model.empty()) {
      options.device_errors = kioskbot::parse_error_model(kioskbot::read_json_argument(error_model), options.device_errors);
    }
    options.device_perturb =
        noiseless_camera ? kioskbot::PerturbationModel::none() : kioskbot::PerturbationModel::standard(seed);

    auto store = std::make_shared<kioskbot::InterfaceStore>(kioskbot::InterfaceStore::load(db));
    kioskbot::ServerCore core(store, options);
    std::ofstream log;
    std::mutex log_mutex;
    if (!log_path.empty()) {
      log.open(log_path, std::ios::app);
      if (!log) throw kioskbot::Error(kioskbot::ErrorKind::Io, "cannot open log " + log_path);
      core.set_event_listener([&](const kioskbot::Json& e) {
        std::lock_guard lock(log_mutex);
        log << e.dump() << '\n' << std::flush;
      });
    }
    kioskbot::TcpServer server(core, static_cast<std::uint16_t>(port), bind);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << bind << ":" << server.port() << " with " << store->interfaces().size()
              << " interfaces" << std::endl;
    auto last_reap = std::chrono::steady_clock::now();
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
      if (std::chrono::steady_clock::now() - last_reap > std::chrono::seconds(10)) {
        core.reap_idle();
        last_reap = std::chrono::steady_clock::now();
      }
    }
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "kioskbot-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

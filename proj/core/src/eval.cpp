#include "kioskbot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "kioskbot/error.hpp"
#include "kioskbot/fixtures.hpp"
#include "kioskbot/tcp.hpp"

namespace kioskbot {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Stats {
  double mean = 0.0, sd = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(s.sd / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

void validate(const EvalConfig& config) {
  const auto bad = [](const std::string& why) { throw Error(ErrorKind::DegenerateConfiguration, why); };
  if (config.trials < 1) bad("trials must be positive");
  if (config.corner_inset_mm < BotGeometry{}.base_radius_mm) bad("corner inset leaves the base off the screen");
  if (config.placement_jitter_deg < 0.0) bad("placement jitter must be non-negative");
  for (double r : config.extension_lengths_mm) {
    if (!(r >= 0.0 && r <= kMaxReachMm)) bad("extension length " + num(r) + " mm lies outside [0, 700]");
  }
  for (double a : config.rotation_angles_deg) {
    if (!std::isfinite(a)) bad("rotation angles must be finite");
  }
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
}

std::vector<Point2> canonical_points(const InterfaceRecord& record, double inset_mm) {
  const double w = record.screen_width_mm, h = record.screen_height_mm;
  return {{inset_mm, inset_mm}, {w - inset_mm, inset_mm}, {inset_mm, h - inset_mm}, {w - inset_mm, h - inset_mm},
          {0.5 * w, 0.5 * h}};
}

double facing_orientation_deg(const InterfaceRecord& record, Point2 position) {
  const Point2 center{0.5 * record.screen_width_mm, 0.5 * record.screen_height_mm};
  if (distance(center, position) < 1e-9) return 0.0;
  return normalize_degrees(bearing_deg(position, center) - kCaptureStepDeg);
}

LocalizationTable eval_localization(const InterfaceStore& store, const EvalConfig& config) {
  validate(config);
  const std::vector<std::string> ids = config.fixtures.empty() ? fixtures::evaluation_ids() : config.fixtures;
  LocalizationTable table;
  std::vector<double> all;
  for (std::size_t f = 0; f < ids.size(); ++f) {
    const StoredInterface& iface = store.get(ids[f]);
    const auto points = canonical_points(*iface.record, config.corner_inset_mm);
    FixtureSummary summary{ids[f]};
    std::vector<double> errors;
    for (std::size_t p = 0; p < points.size(); ++p) {
      for (int t = 0; t < config.trials; ++t) {
        const std::uint64_t s = trial_seed(config.seed, f + 1, p + 1, static_cast<std::uint64_t>(t) + 1);
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> jitter(-config.placement_jitter_deg, config.placement_jitter_deg);
        const double orientation = normalize_degrees(facing_orientation_deg(*iface.record, points[p]) + jitter(rng));

        Kiosk kiosk(iface.record);
        BotSim bot(ErrorModel::noiseless());
        LocalizationRow row{ids[f], static_cast<int>(p), t, bot.place(*iface.record, points[p], orientation), "", "",
                            {}, 0.0, 0.0};
        PerturbationModel perturb = config.perturbation;
        perturb.seed = trial_seed(s, 0x5107);
        const auto shots = capture_sequence(kiosk, bot, config.camera, perturb);
        try {
          const auto id = identify_interface(std::span<const CameraShot>(shots.data(), 3), store);
          row.identified = id.interface_id;
          if (id.interface_id != ids[f]) {
            row.status = "Misidentified";
          } else {
            const auto result = locate(std::span<const CameraShot, 3>(shots), iface, store.config());
            row.estimate = result.pose;
            row.error_mm = distance(result.pose.position, row.truth.position);
            row.orientation_error_deg = angle_difference_deg(result.pose.orientation_deg, row.truth.orientation_deg);
            row.status = "ok";
          }
        } catch (const Error& e) {
          row.status = to_string(e.kind());
          if (e.kind() == ErrorKind::InsufficientFeatures) ++summary.insufficient_features;
        }
        ++summary.trials;
        if (row.ok()) {
          errors.push_back(row.error_mm);
          all.push_back(row.error_mm);
          summary.max_orientation_error_deg =
              std::max(summary.max_orientation_error_deg, std::abs(row.orientation_error_deg));
        } else {
          ++summary.failures;
        }
        table.rows.push_back(std::move(row));
      }
    }
    const Stats st = stats(errors);
    summary.mean_error_mm = st.mean;
    summary.sd_error_mm = st.sd;
    table.fixtures.push_back(summary);
  }
  const Stats st = stats(all);
  table.grand_mean_mm = st.mean;
  table.grand_sd_mm = st.sd;
  return table;
}

RotationTable eval_rotation(const EvalConfig& config) {
  validate(config);
  RotationTable table;
  const auto& angles = config.rotation_angles_deg;
  table.mean_signed_error.assign(2, std::vector<double>(angles.size(), 0.0));
  std::vector<double> abs_errors;
  for (int t = 0; t < config.trials; ++t) {
    for (int dir = 0; dir < 2; ++dir) {
      ErrorModel errors = config.errors;
      errors.seed = trial_seed(config.seed, 0x2071, static_cast<std::uint64_t>(t) + 1, static_cast<std::uint64_t>(dir) + 1);
      BotSim bot(errors);
      std::vector<double> sweep = angles;
      if (dir == 1) std::reverse(sweep.begin(), sweep.end());
      // The protractor is zeroed on the sweep's starting angle.
      if (!sweep.empty()) bot.rotate_to(sweep.front());
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        const double realized = bot.rotate_to(sweep[i]);
        const double err = angle_difference_deg(realized, sweep[i]);
        table.rows.push_back({t, dir == 0 ? "clockwise" : "counterclockwise", sweep[i], realized, err});
        const std::size_t col = dir == 0 ? i : angles.size() - 1 - i;
        table.mean_signed_error[static_cast<std::size_t>(dir)][col] += err / config.trials;
        abs_errors.push_back(std::abs(err));
      }
    }
  }
  const Stats st = stats(abs_errors);
  table.grand_mean_abs_deg = st.mean;
  table.sd_abs_deg = st.sd;
  return table;
}

ExtensionTable eval_extension(const EvalConfig& config) {
  validate(config);
  ExtensionTable table;
  std::vector<double> errs;
  for (int t = 0; t < config.trials; ++t) {
    ErrorModel errors = config.errors;
    errors.seed = trial_seed(config.seed, 0xE7E, static_cast<std::uint64_t>(t) + 1);
    BotSim bot(errors);
    std::vector<double> sweep = config.extension_lengths_mm;
    for (int dir = 0; dir < 2; ++dir) {
      for (double c : sweep) {
        const double realized = bot.extend_to(c);
        const double err = std::abs(realized - c);
        table.rows.push_back({t, dir == 0 ? "extend" : "retract", c, realized, err});
        errs.push_back(err);
        table.max_error_mm = std::max(table.max_error_mm, err);
      }
      std::reverse(sweep.begin(), sweep.end());
    }
  }
  const Stats st = stats(errs);
  table.grand_mean_mm = st.mean;
  table.sd_mm = st.sd;
  return table;
}

ScenarioReport run_scenario(std::shared_ptr<const InterfaceStore> store, const ScenarioSpec& spec,
                            const DeviceSettings& devices, const ServerOptions& options) {
  const auto record = store->get(spec.interface_id).record;
  ServerCore core(store, options);
  TcpServer server(core, 0, "127.0.0.1");
  TcpLink bot("127.0.0.1", server.port());
  TcpLink phone("127.0.0.1", server.port());
  ScenarioReport report = drive_scenario(spec, record, phone, bot, devices);
  phone.close();
  bot.close();
  server.stop();
  return report;
}

void write_csv(std::ostream& out, const LocalizationTable& table) {
  out << "fixture,point,trial,true_x_mm,true_y_mm,true_orientation_deg,status,identified,est_x_mm,est_y_mm,"
         "est_orientation_deg,error_mm,orientation_error_deg\n";
  for (const auto& r : table.rows) {
    out << r.fixture << ',' << r.point << ',' << r.trial << ',' << num(r.truth.position.x) << ','
        << num(r.truth.position.y) << ',' << num(r.truth.orientation_deg) << ',' << r.status << ',' << r.identified;
    if (r.ok()) {
      out << ',' << num(r.estimate.position.x) << ',' << num(r.estimate.position.y) << ','
          << num(r.estimate.orientation_deg) << ',' << num(r.error_mm) << ',' << num(r.orientation_error_deg) << '\n';
    } else {
      out << ",NA,NA,NA,NA,NA\n";
    }
  }
}

void write_csv(std::ostream& out, const RotationTable& table) {
  out << "trial,direction,commanded_deg,realized_deg,error_deg\n";
  for (const auto& r : table.rows) {
    out << r.trial << ',' << r.direction << ',' << num(r.commanded_deg) << ',' << num(r.realized_deg) << ','
        << num(r.error_deg) << '\n';
  }
}

void write_csv(std::ostream& out, const ExtensionTable& table) {
  out << "trial,direction,commanded_mm,realized_mm,abs_error_mm\n";
  for (const auto& r : table.rows) {
    out << r.trial << ',' << r.direction << ',' << num(r.commanded_mm) << ',' << num(r.realized_mm) << ','
        << num(r.abs_error_mm) << '\n';
  }
}

void write_csv(std::ostream& out, const ScenarioReport& report) {
  out << "step,element_id,commanded_theta_deg,commanded_r_mm,realized_theta_deg,realized_r_mm,contact_x_mm,"
         "contact_y_mm,hit,screen_changed,duration_s\n";
  for (std::size_t i = 0; i < report.touches.size(); ++i) {
    const auto& t = report.touches[i];
    out << i << ',' << (i < report.selected.size() ? report.selected[i] : "") << ',' << num(t.commanded.theta_deg)
        << ',' << num(t.commanded.r_mm) << ',' << num(t.realized.theta_deg) << ',' << num(t.realized.r_mm) << ','
        << num(t.contact.x) << ',' << num(t.contact.y) << ',' << t.outcome.hit.value_or("") << ','
        << (t.outcome.screen_changed ? "true" : "false") << ',' << num(t.duration_s) << '\n';
  }
}

void write_transcript(std::ostream& out, const ScenarioReport& report) {
  for (const auto& e : report.transcript) out << e.dump() << '\n';
}

}  // namespace kioskbot

// evalctl: reruns the accuracy experiments and the end-to-end task against
// the simulator. Exit status is 0 iff every check of the suite passes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kioskbot/error.hpp"
#include "kioskbot/eval.hpp"
#include "kioskbot/fixtures.hpp"
#include "kioskbot/json_config.hpp"

namespace {

using namespace kioskbot;

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int report(const std::vector<Check>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.pass;
  }
  return all ? 0 : 1;
}

template <typename Table>
void save(const std::string& path, const Table& table) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_csv(out, table);
}

std::vector<Check> localization_checks(const LocalizationTable& t, bool noise) {
  std::vector<Check> checks;
  const auto ids = fixtures::evaluation_ids();
  int failures = 0;
  double worst_mean = 0.0, worst_orient = 0.0, sum = 0.0;
  int n = 0;
  for (const auto& f : t.fixtures) {
    if (f.fixture == fixtures::kMonochrome) {
      checks.push_back({"monochrome yields InsufficientFeatures", f.insufficient_features == f.trials,
                        std::to_string(f.insufficient_features) + "/" + std::to_string(f.trials)});
      continue;
    }
    failures += f.failures;
    worst_mean = std::max(worst_mean, f.mean_error_mm);
    worst_orient = std::max(worst_orient, f.max_orientation_error_deg);
    for (const auto& r : t.rows)
      if (r.fixture == f.fixture && r.ok()) {
        sum += r.error_mm;
        ++n;
      }
  }
  const double grand = n ? sum / n : 0.0;
  if (noise) {
    checks.push_back({"feature-rich grand mean in [2, 10] mm", n > 0 && grand >= 2.0 && grand <= 10.0,
                      fmt(grand) + " mm over " + std::to_string(n) + " trials"});
  } else {
    checks.push_back({"feature-rich means <= 2 mm", n > 0 && worst_mean <= 2.0, "worst " + fmt(worst_mean) + " mm"});
    checks.push_back({"orientation error <= 2 deg", worst_orient <= 2.0, "worst " + fmt(worst_orient) + " deg"});
    checks.push_back({"no feature-rich failures", failures == 0, std::to_string(failures) + " failures"});
  }
  return checks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator evaluation harness"};
  app.require_subcommand(1);
  std::string db, out, perturb_json, scenario_path, transcript_path;
  std::uint64_t seed = 0;
  bool no_noise = false;
  int trials = 3;
  for (const char* name : {"localization", "rotation", "extension", "scenario"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " suite");
    sub->add_option("--db", db, "Interface database directory")->required();
    sub->add_option("--out", out, "CSV output path");
    sub->add_option("--seed", seed, "Base seed");
    sub->add_flag("--no-noise", no_noise, "Disable camera and actuation noise");
    sub->add_option("--perturb", perturb_json, "Camera perturbation model (JSON or file)");
    sub->add_option("--trials", trials, "Trials per cell")->check(CLI::PositiveNumber);
    if (std::string(name) == "scenario") {
      sub->add_option("scenario", scenario_path, "Scenario JSON file")->required();
      sub->add_option("--transcript", transcript_path, "JSON-lines transcript path (default: <out>.jsonl)");
    }
  }
  CLI11_PARSE(app, argc, argv);
  const std::string suite = app.get_subcommands().front()->get_name();

  try {
    EvalConfig config;
    config.seed = seed;
    config.trials = trials;
    config.perturbation = PerturbationModel::standard(seed);
    if (!perturb_json.empty()) config.perturbation = parse_perturbation(read_json_argument(perturb_json), config.perturbation);
    if (no_noise) {
      config.perturbation = PerturbationModel::none();
      config.errors = ErrorModel::noiseless();
    }

    if (suite == "rotation") {
      const auto t = eval_rotation(config);
      save(out, t);
      std::cout << "grand mean |error| " << fmt(t.grand_mean_abs_deg) << " deg (SD " << fmt(t.sd_abs_deg) << ")\n";
      if (no_noise) {
        double worst = 0.0;
        for (const auto& r : t.rows) worst = std::max(worst, std::abs(r.error_deg));
        return report({{"noise-free rotation is exact", worst == 0.0, "max |error| " + fmt(worst, 6) + " deg"}});
      }
      return report({{"grand mean |error| in [0.2, 1.1] deg",
                      t.grand_mean_abs_deg >= 0.2 && t.grand_mean_abs_deg <= 1.1, fmt(t.grand_mean_abs_deg) + " deg"}});
    }
    if (suite == "extension") {
      if (no_noise) config.errors = ErrorModel::noiseless(true);
      const auto t = eval_extension(config);
      save(out, t);
      std::cout << "grand mean |error| " << fmt(t.grand_mean_mm) << " mm (SD " << fmt(t.sd_mm) << "), max "
                << fmt(t.max_error_mm) << " mm\n";
      if (no_noise) {
        return report({{"quantized errors <= 1.25 mm", t.max_error_mm <= 1.25, "max " + fmt(t.max_error_mm) + " mm"}});
      }
      return report({{"grand mean |error| in [1.5, 4.5] mm", t.grand_mean_mm >= 1.5 && t.grand_mean_mm <= 4.5,
                      fmt(t.grand_mean_mm) + " mm"}});
    }

    auto store = std::make_shared<InterfaceStore>(InterfaceStore::load(db));
    if (suite == "localization") {
      const auto t = eval_localization(*store, config);
      save(out, t);
      for (const auto& f : t.fixtures) {
        std::cout << f.fixture << ": " << (f.trials - f.failures) << "/" << f.trials << " located, mean "
                  << fmt(f.mean_error_mm) << " mm (SD " << fmt(f.sd_error_mm) << ")\n";
      }
      return report(localization_checks(t, !no_noise));
    }

    ScenarioSpec spec = load_scenario(scenario_path);
    spec.seed ^= seed;
    if (no_noise) spec.perturbed = false;
    DeviceSettings devices;
    devices.perturb = config.perturbation;
    devices.errors = config.errors;
    const auto r = run_scenario(store, spec, devices);
    save(out, r);
    const std::string tpath = !transcript_path.empty() ? transcript_path : (out.empty() ? "" : out + ".jsonl");
    if (!tpath.empty()) {
      std::ofstream tout(tpath);
      if (!tout) throw Error(ErrorKind::Io, "cannot write " + tpath);
      write_transcript(tout, r);
    }
    if (tpath.empty()) write_transcript(std::cout, r);
    std::cout << r.name << ": " << r.hits << " hits, " << r.relocations << " relocations, final screen "
              << r.final_screen << ", " << fmt(r.total_sim_time_s, 1) << " s simulated\n";
    return report({{"scenario " + r.name, r.success, r.success ? "completed" : r.failure}});
  } catch (const std::exception& e) {
    std::cerr << "evalctl: " << e.what() << "\n";
    return 2;
  }
}

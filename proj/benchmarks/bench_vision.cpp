#include <benchmark/benchmark.h>

#include <memory>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/fixtures.hpp"
#include "kioskbot/localization.hpp"
#include "kioskbot/matching.hpp"

namespace kioskbot {
namespace {

const InterfaceStore& store() {
  static const InterfaceStore s = InterfaceStore::load(KIOSKBOT_FIXTURE_DIR);
  return s;
}

// one noise-free capture at an interior airport pose, reused by every benchmark
struct Capture {
  const StoredInterface* iface;
  std::array<CameraShot, 3> shots;
};

const Capture& capture() {
  static const Capture c = [] {
    const StoredInterface& iface = store().get(fixtures::kAirport);
    Kiosk kiosk(iface.record);
    BotSim bot(ErrorModel::noiseless());
    bot.place(*iface.record, {200, 150}, 40);
    return Capture{&iface, capture_sequence(kiosk, bot, {}, PerturbationModel::none())};
  }();
  return c;
}

const PhotoFeatures& photo() {
  static const PhotoFeatures p = [] {
    const auto& c = capture();
    return photo_features(c.shots[1], c.iface->record->mm_per_pixel, store().config());
  }();
  return p;
}

void BM_DetectPhoto(benchmark::State& state) {
  const GrayImage& img = capture().shots[1].image;
  DetectorOptions opt;
  opt.max_keypoints = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(detect_and_describe(img, opt));
}
BENCHMARK(BM_DetectPhoto)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PhotoFeatures(benchmark::State& state) {
  const auto& c = capture();
  for (auto _ : state)
    benchmark::DoNotOptimize(photo_features(c.shots[1], c.iface->record->mm_per_pixel, store().config()));
}
BENCHMARK(BM_PhotoFeatures)->Unit(benchmark::kMillisecond);

void BM_MatchAgainstReference(benchmark::State& state) {
  const auto& q = photo().features.descriptors;
  const auto& t = capture().iface->home().features.descriptors;
  for (auto _ : state) benchmark::DoNotOptimize(match_descriptors(q, t));
  state.counters["train"] = static_cast<double>(t.size());
}
BENCHMARK(BM_MatchAgainstReference)->Unit(benchmark::kMillisecond);

void BM_Ransac(benchmark::State& state) {
  const ReferenceScreen& ref = capture().iface->home();
  const PhotoFeatures& p = photo();
  const auto matches = match_descriptors(p.features.descriptors, ref.features.descriptors);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_homography(matches, p.positions, ref.positions));
  state.counters["matches"] = static_cast<double>(matches.size());
}
BENCHMARK(BM_Ransac)->Unit(benchmark::kMillisecond);

void BM_Locate(benchmark::State& state) {
  const auto& c = capture();
  for (auto _ : state) benchmark::DoNotOptimize(locate(c.shots, *c.iface, store().config()));
}
BENCHMARK(BM_Locate)->Unit(benchmark::kMillisecond);

void BM_Identify(benchmark::State& state) {
  const auto& c = capture();
  for (auto _ : state) benchmark::DoNotOptimize(identify_interface(c.shots, store()));
  state.counters["interfaces"] = static_cast<double>(store().interfaces().size());
}
BENCHMARK(BM_Identify)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kioskbot

BENCHMARK_MAIN();

#include "ctd/bench.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "ctd/scenario.hpp"

namespace ctd {
namespace {

std::vector<FrameLogEntry> log_with(const std::vector<bool>& detected) {
  std::vector<FrameLogEntry> log;
  for (std::size_t i = 0; i < detected.size(); ++i) {
    FrameLogEntry e;
    e.frame = static_cast<int>(i) + 1;
    e.detected = detected[i];
    log.push_back(e);
  }
  return log;
}

SweepInput small_input() {
  ScenarioSpec spec;
  spec.frames = 120;
  spec.width = 640;
  spec.height = 480;
  spec.noise = 0.02;
  spec.miss_rate = 0.05;
  spec.seed = 9;
  ScenarioObject a, b;
  a.entry = 1, a.exit = 120, a.box = {20, 100, 40, 100}, a.vx = 3;
  b.entry = 1, b.exit = 120, b.box = {400, 250, 40, 100};
  spec.objects = {a, b};
  const auto data = generate_scenario(spec);
  return {data.det, data.gt, spec.frames};
}

TEST(CostModel, CalibrationMatchesRates) {
  const auto m = calibrate_preset("x", 10.915, 100);
  EXPECT_NEAR(m.t_detect_ms, 91.62, 0.005);
  EXPECT_DOUBLE_EQ(m.t_track_ms, 10.0);
  EXPECT_NEAR(calibrate_preset("s", 21.673).t_detect_ms, 46.14, 0.005);
  EXPECT_NEAR(calibrate_preset("m", 15.604).t_detect_ms, 64.09, 0.005);
}

TEST(CostModel, CalibrationRejectsBadOrdering) {
  EXPECT_THROW(calibrate_preset("x", 0.0), std::domain_error);
  EXPECT_THROW(calibrate_preset("x", 120.0, 100.0), std::domain_error);
  EXPECT_THROW(calibrate_preset("x", 100.0, 100.0), std::domain_error);
}

TEST(CostModel, Presets) {
  EXPECT_EQ(cost_preset_names().size(), 3u);
  EXPECT_FALSE(cost_preset("resnet").has_value());
  const auto all = log_with(std::vector<bool>(50, true));
  const std::pair<const char*, double> expected[] = {
      {"yolov3-tiny", 10.915}, {"mobilenet-ssd", 15.604}, {"squeezenet", 21.673}};
  for (auto [name, hz] : expected) {
    const auto cm = cost_preset(name);
    ASSERT_TRUE(cm.has_value()) << name;
    EXPECT_NEAR(effective_hz(all, *cm), hz, 1e-9);
  }
}

TEST(EffectiveHz, Arithmetic) {
  const CostModel cm{"t", 90.0, 10.0};
  std::vector<bool> alt;
  for (int i = 0; i < 40; ++i) alt.push_back(i % 2 == 0);
  EXPECT_DOUBLE_EQ(effective_hz(log_with(alt), cm), 20.0);
  EXPECT_DOUBLE_EQ(effective_hz(log_with(std::vector<bool>(7, false)), cm), 100.0);
  EXPECT_THROW(effective_hz({}, cm), std::domain_error);
}

TEST(EffectiveHz, DependsOnlyOnDetectedCount) {
  const CostModel cm{"t", 64.0, 9.0};
  std::vector<bool> a(30, false), b(30, false);
  for (int i : {0, 3, 9, 10}) a[i] = true;
  for (int i : {29, 1, 2, 15}) b[i] = true;
  EXPECT_EQ(effective_hz(log_with(a), cm), effective_hz(log_with(b), cm));
  EXPECT_EQ(detection_count(log_with(a)), 4);
}

TEST(Ratios, SpeedAndAccuracy) {
  EXPECT_DOUBLE_EQ(speed_increase(8.1, 16.2), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_decrease(0.5, 0.25), 0.5);
}

TEST(Sweep, AllDetectCellIsVanilla) {
  const auto input = small_input();
  SweepConfig cfg;
  cfg.confidences = {1.0};
  cfg.frequencies = {1};
  cfg.cost = *cost_preset("yolov3-tiny");
  const auto rows = sweep(input, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].detections, input.frames);
  EXPECT_NEAR(rows[0].hz, 10.915, 1e-9);
}

TEST(Sweep, FixedCadenceDetectionCount) {
  const auto input = small_input();
  SweepConfig cfg;
  cfg.confidences = {1.0};
  cfg.frequencies = {5, 7};
  cfg.cost = *cost_preset("squeezenet");
  const auto rows = sweep(input, cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].detections, 24);
  EXPECT_EQ(rows[1].detections, (120 + 6) / 7);
}

TEST(Sweep, OrderedAndIndependentOfThreadCount) {
  const auto input = small_input();
  SweepConfig cfg;
  cfg.confidences = {0.9, 0.3, 1.0};
  cfg.frequencies = {3, 1, 6};
  cfg.cost = *cost_preset("mobilenet-ssd");
  cfg.threads = 1;
  const auto serial = sweep(input, cfg);
  cfg.threads = 4;
  const auto parallel = sweep(input, cfg);
  ASSERT_EQ(serial.size(), 9u);
  EXPECT_EQ(emit_sweep_csv(serial), emit_sweep_csv(parallel));
  for (std::size_t i = 1; i < serial.size(); ++i) {
    const bool ordered = serial[i - 1].confidence < serial[i].confidence ||
                         (serial[i - 1].confidence == serial[i].confidence &&
                          serial[i - 1].detect_frequency < serial[i].detect_frequency);
    EXPECT_TRUE(ordered);
  }
}

TEST(Sweep, CellMatchesDirectEvaluation) {
  const auto input = small_input();
  const auto cm = *cost_preset("yolov3-tiny");
  const auto cell = evaluate_cell(input, 0.7, 4, cm);
  MotDetectionSource src(input.det, input.frames);
  const auto log = run_sequence(src, {0.7, 4});
  const auto metrics = clear_mot(input.gt, hypothesis_rows(log));
  EXPECT_EQ(cell.detections, detection_count(log));
  EXPECT_EQ(cell.hz, effective_hz(log, cm));
  EXPECT_EQ(cell.metrics.mota, metrics.mota);
  EXPECT_EQ(cell.metrics.idsw, metrics.idsw);
}

TEST(Sweep, EmptyGridRejected) {
  SweepConfig cfg;
  cfg.confidences = {};
  cfg.frequencies = {1};
  cfg.cost = *cost_preset("yolov3-tiny");
  EXPECT_THROW(sweep(small_input(), cfg), std::domain_error);
}

TEST(Sweep, DefaultGrids) {
  EXPECT_EQ(default_confidence_grid(), (std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 1.0}));
  const auto d = default_frequency_grid();
  ASSERT_EQ(d.size(), 11u);
  EXPECT_EQ(d.front(), 1);
  EXPECT_EQ(d.back(), 11);
}

TEST(SweepCsv, Header) {
  const auto csv = emit_sweep_csv({});
  EXPECT_EQ(csv, "confidence,detect_frequency,detections,frames,hz,mota,motp,mt,ml,fp,fn,idsw\n");
}

TEST(Comparison, RejectsDegenerateThreshold) {
  EXPECT_THROW(compare_ctd_vs_skip(small_input(), 1.0, 5, *cost_preset("yolov3-tiny")), std::domain_error);
}

TEST(Comparison, PairsSameFrequency) {
  const auto c = compare_ctd_vs_skip(small_input(), 0.3, 5, *cost_preset("yolov3-tiny"));
  EXPECT_EQ(c.skip.confidence, 1.0);
  EXPECT_EQ(c.skip.detect_frequency, 5);
  EXPECT_EQ(c.skip.detections, 24);
  EXPECT_GE(c.ctd.detections, c.skip.detections);
  EXPECT_DOUBLE_EQ(c.mota_delta, c.ctd.metrics.mota - c.skip.metrics.mota);
  EXPECT_DOUBLE_EQ(c.hz_delta, c.ctd.hz - c.skip.hz);
}

TEST(MatchingSkipFrequency, ClosestCount) {
  EXPECT_EQ(matching_skip_frequency(600, 600), 1);
  EXPECT_EQ(matching_skip_frequency(600, 120), 5);
  EXPECT_EQ(matching_skip_frequency(600, 150), 4);
  EXPECT_EQ(matching_skip_frequency(600, 135), 4);  // 150 vs 120: 15 each, smaller D wins
  EXPECT_EQ(matching_skip_frequency(600, 1), 600);
}

}  // namespace
}  // namespace ctd

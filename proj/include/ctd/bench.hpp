#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctd/datasets.hpp"
#include "ctd/metrics.hpp"
#include "ctd/pipeline.hpp"

namespace ctd {

/// Simulated per-frame processing cost.
struct CostModel {
  std::string name;
  double t_detect_ms = 0.0;  // frame where the detector runs
  double t_track_ms = 0.0;   // frame handled by the tracker alone
};

/// Tracker-only throughput assumed when only full-pipeline rates are known.
inline constexpr double kDefaultTrackerOnlyHz = 100.0;

/// Throws std::domain_error unless 0 < full_detect_hz < tracker_only_hz.
CostModel calibrate_preset(const std::string& name, double full_detect_hz,
                           double tracker_only_hz = kDefaultTrackerOnlyHz);

/// Built-in detector presets: "yolov3-tiny", "mobilenet-ssd", "squeezenet".
/// Returns nullopt for unknown names.
std::optional<CostModel> cost_preset(const std::string& name, double tracker_only_hz = kDefaultTrackerOnlyHz);

std::vector<std::string> cost_preset_names();

/// Frames per second of simulated time. Throws std::domain_error on an
/// empty log.
double effective_hz(const std::vector<FrameLogEntry>& log, const CostModel& cm);

int detection_count(const std::vector<FrameLogEntry>& log);

/// Relative speed gain hz2/hz1 - 1 and accuracy loss 1 - mota2/mota1.
double speed_increase(double hz_base, double hz);
double accuracy_decrease(double mota_base, double mota);

/// Detections and ground truth for one sequence.
struct SweepInput {
  std::vector<MotRow> det;
  std::vector<MotRow> gt;
  int frames = 0;
};

struct SweepRow {
  double confidence = 1.0;
  int detect_frequency = 1;
  int detections = 0;
  int frames = 0;
  double hz = 0.0;
  MetricsReport metrics;
};

struct SweepConfig {
  std::vector<double> confidences;
  std::vector<int> frequencies;
  CostModel cost;
  LifecycleConfig lifecycle;
  MetricsConfig metrics;
  double min_score = kDefaultMinScore;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Confidence grid 10%..100% used for the trade-off study.
std::vector<double> default_confidence_grid();
/// Detect frequencies 1..11.
std::vector<int> default_frequency_grid();

/// One pipeline run plus evaluation.
SweepRow evaluate_cell(const SweepInput& input, double confidence, int detect_frequency, const CostModel& cm,
                       const LifecycleConfig& lifecycle = {}, const MetricsConfig& metrics = {},
                       double min_score = kDefaultMinScore);

/// Every (confidence, frequency) cell, ordered by confidence then frequency
/// regardless of execution order. Cells run concurrently.
std::vector<SweepRow> sweep(const SweepInput& input, const SweepConfig& cfg);

/// CSV with header.
std::string emit_sweep_csv(const std::vector<SweepRow>& rows);

struct Comparison {
  SweepRow ctd;
  SweepRow skip;  // confidence 1.0, same frequency
  double mota_delta = 0.0;  // ctd - skip
  double hz_delta = 0.0;
};

/// Confidence-triggered run against the fixed-cadence run at the same
/// frequency. Throws std::domain_error for confidence >= 1.
Comparison compare_ctd_vs_skip(const SweepInput& input, double confidence, int detect_frequency,
                               const CostModel& cm, const LifecycleConfig& lifecycle = {},
                               const MetricsConfig& metrics = {}, double min_score = kDefaultMinScore);

/// Fixed-cadence frequency whose detection count ceil(N/D) is closest to
/// `target` (smallest D on ties).
int matching_skip_frequency(int frames, int target);

}  // namespace ctd

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctd/datasets.hpp"
#include "ctd/gating.hpp"
#include "ctd/kalman.hpp"

namespace ctd {

enum class TrackStatus { Tentative, Confirmed, Deleted };

std::string_view to_string(TrackStatus s);

struct Track {
  int id = 0;
  BoxState state;
  TrackStatus status = TrackStatus::Tentative;
  int hits = 0;
  // Detection-frame misses since the last association; skipped frames do not count.
  int time_since_update = 0;
  // Most recent associated detection, held fixed while detection is skipped.
  std::optional<Measurement> last_detection;

  Box box() const;
};

struct LifecycleConfig {
  int n_init = 3;    // consecutive hits to confirm a tentative track
  int max_age = 30;  // detection-frame misses tolerated by a confirmed track
  // Association gate, independent of the confidence threshold.
  double association_p = 0.95;
  bool report_tentative = false;
  NoiseModel noise;
};

/// Live tracks of one sequence plus the id counter. Ids start at 1 and are
/// never reused.
struct TrackSet {
  std::vector<Track> tracks;
  int next_id = 1;
};

enum class TrackEventKind { Created, Matched, Missed, Confirmed, Deleted };

struct TrackEvent {
  int track_id = 0;
  TrackEventKind kind = TrackEventKind::Created;
};

struct DetectStepResult {
  TrackSet tracks;
  std::vector<TrackEvent> events;
};

/// Detection frame: predict every track, associate by gated Mahalanobis
/// cost, update matches, age misses, spawn tentative tracks and apply the
/// lifecycle rules. Deleted tracks are dropped from the returned set.
DetectStepResult step_detect(const TrackSet& tracks, const std::vector<Measurement>& dets,
                             const LifecycleConfig& cfg = {});

struct PredictStepResult {
  TrackSet tracks;
  bool low = false;
  std::optional<double> max_m2;
  std::optional<int> max_track;  // id of the track attaining max_m2
};

/// Skipped frame: predict every track, then measure each confirmed track's
/// prediction against its own stale detection. Confidence is low when the
/// largest squared distance exceeds `gate.d`.
PredictStepResult step_predict_only(const TrackSet& tracks, const GateSpec& gate,
                                    const NoiseModel& noise = {});

enum class Trigger { Init, Frequency, LowConfidence, None };

std::string_view to_string(Trigger t);

struct SchedulerState {
  int counter = 0;  // frames since the last detection
  int detect_frequency = 1;
  bool confidence_low = true;  // forces a detection on the first frame
  bool first_frame = true;
  GateSpec gate;
};

SchedulerState make_scheduler(double confidence, int detect_frequency);

struct DetectDecision {
  bool detect = false;
  Trigger trigger = Trigger::None;
};

/// Low confidence wins over the counter when both hold.
DetectDecision should_detect(const SchedulerState& s);

SchedulerState after_frame(const SchedulerState& s, bool detected, bool low);

struct OutputBox {
  int id = 0;
  Box box;
  TrackStatus status = TrackStatus::Confirmed;
};

struct FrameLogEntry {
  int frame = 0;
  bool detected = false;
  Trigger trigger = Trigger::None;
  std::vector<OutputBox> outputs;
  std::optional<double> max_m2;      // skipped frames only
  std::optional<int> max_m2_track;   // track attaining max_m2
  std::optional<int> trigger_track;  // LowConfidence detections: the track that caused it
};

/// Supplies the detector output for one frame. Only queried on frames where
/// detection runs.
class DetectionSource {
 public:
  virtual ~DetectionSource() = default;
  virtual int frame_count() const = 0;
  virtual std::vector<Measurement> detections(int frame) = 0;
};

/// Detection source backed by MOT rows, with the score filter applied.
class MotDetectionSource : public DetectionSource {
 public:
  MotDetectionSource(const std::vector<MotRow>& rows, int frames, double min_score = kDefaultMinScore);

  int frame_count() const override { return frames_; }
  std::vector<Measurement> detections(int frame) override;

 private:
  std::map<int, std::vector<MotRow>> by_frame_;
  int frames_;
};

struct SchedulerConfig {
  double confidence = 1.0;
  int detect_frequency = 1;
};

/// Runs frames 1..N through the scheduler. Errors from the source are
/// rethrown with the frame index prepended.
std::vector<FrameLogEntry> run_sequence(DetectionSource& source, const SchedulerConfig& sched,
                                        const LifecycleConfig& lifecycle = {});

/// Hypothesis rows (MOT format) for every reported box in the log.
std::vector<MotRow> hypothesis_rows(const std::vector<FrameLogEntry>& log);

/// CSV: frame,detected,trigger,max_m2,max_m2_track,trigger_track,outputs
std::string emit_frame_log(const std::vector<FrameLogEntry>& log);

}  // namespace ctd

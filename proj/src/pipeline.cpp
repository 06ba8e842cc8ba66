#include "ctd/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "ctd/association.hpp"

namespace ctd {
namespace {

bool degenerate(const BoxState& s) { return !(s.mean(3) > 0.0) || !(s.mean(2) > 0.0); }

Measurement measurement_of(const BoxState& s) { return {s.mean(0), s.mean(1), s.mean(2), s.mean(3)}; }

// Predicts every track; tracks whose predicted box collapses are deleted.
TrackSet predict_all(const TrackSet& in, const NoiseModel& noise, std::vector<TrackEvent>* events) {
  TrackSet out;
  out.next_id = in.next_id;
  out.tracks.reserve(in.tracks.size());
  for (const auto& t : in.tracks) {
    Track p = t;
    p.state = predict(t.state, noise);
    if (degenerate(p.state)) {
      if (events) events->push_back({t.id, TrackEventKind::Deleted});
      continue;
    }
    out.tracks.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string_view to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tentative: return "Tentative";
    case TrackStatus::Confirmed: return "Confirmed";
    case TrackStatus::Deleted: return "Deleted";
  }
  return "?";
}

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::Init: return "Init";
    case Trigger::Frequency: return "Frequency";
    case Trigger::LowConfidence: return "LowConfidence";
    case Trigger::None: return "None";
  }
  return "?";
}

Box Track::box() const { return measurement_to_tlwh(measurement_of(state)); }

DetectStepResult step_detect(const TrackSet& tracks, const std::vector<Measurement>& dets,
                             const LifecycleConfig& cfg) {
  DetectStepResult result;
  TrackSet predicted = predict_all(tracks, cfg.noise, &result.events);

  std::vector<BoxState> states;
  states.reserve(predicted.tracks.size());
  for (const auto& t : predicted.tracks) states.push_back(t.state);
  const GateSpec gate = gate_from_confidence(cfg.association_p);
  const auto assignment = gated_assignment(states, dets, gate, cfg.noise);

  for (auto [r, c] : assignment.matches) {
    Track& t = predicted.tracks[r];
    t.state = update(t.state, dets[c], cfg.noise);
    t.hits += 1;
    t.time_since_update = 0;
    t.last_detection = dets[c];
    result.events.push_back({t.id, TrackEventKind::Matched});
    if (t.status == TrackStatus::Tentative && t.hits >= cfg.n_init) {
      t.status = TrackStatus::Confirmed;
      result.events.push_back({t.id, TrackEventKind::Confirmed});
    }
  }
  for (std::size_t r : assignment.unmatched_rows) {
    Track& t = predicted.tracks[r];
    t.time_since_update += 1;
    result.events.push_back({t.id, TrackEventKind::Missed});
    if (t.status == TrackStatus::Tentative || t.time_since_update > cfg.max_age) {
      t.status = TrackStatus::Deleted;
      result.events.push_back({t.id, TrackEventKind::Deleted});
    }
  }

  result.tracks.next_id = predicted.next_id;
  for (auto& t : predicted.tracks) {
    if (t.status != TrackStatus::Deleted) result.tracks.tracks.push_back(std::move(t));
  }
  for (std::size_t c : assignment.unmatched_cols) {
    Track t;
    t.id = result.tracks.next_id++;
    t.state = initiate(dets[c], cfg.noise);
    t.status = cfg.n_init <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
    t.hits = 1;
    t.last_detection = dets[c];
    result.events.push_back({t.id, TrackEventKind::Created});
    result.tracks.tracks.push_back(std::move(t));
  }
  return result;
}

PredictStepResult step_predict_only(const TrackSet& tracks, const GateSpec& gate, const NoiseModel& noise) {
  PredictStepResult result;
  result.tracks = predict_all(tracks, noise, nullptr);
  for (const auto& t : result.tracks.tracks) {
    if (t.status != TrackStatus::Confirmed || !t.last_detection) continue;
    const Measurement stale[] = {*t.last_detection};
    const double m2 = mahalanobis_squared(t.state, stale, noise).front();
    if (!result.max_m2 || m2 > *result.max_m2) {
      result.max_m2 = m2;
      result.max_track = t.id;
    }
  }
  result.low = result.max_m2 && gate.exceeded_by(*result.max_m2);
  return result;
}

SchedulerState make_scheduler(double confidence, int detect_frequency) {
  if (detect_frequency < 1) throw std::domain_error("detect frequency must be >= 1");
  SchedulerState s;
  s.detect_frequency = detect_frequency;
  s.gate = gate_from_confidence(confidence);
  return s;
}

DetectDecision should_detect(const SchedulerState& s) {
  if (s.first_frame) return {true, Trigger::Init};
  if (s.confidence_low) return {true, Trigger::LowConfidence};
  if (s.counter + 1 >= s.detect_frequency) return {true, Trigger::Frequency};
  return {false, Trigger::None};
}

SchedulerState after_frame(const SchedulerState& s, bool detected, bool low) {
  SchedulerState next = s;
  next.counter = detected ? 0 : s.counter + 1;
  next.confidence_low = low;
  next.first_frame = false;
  return next;
}

MotDetectionSource::MotDetectionSource(const std::vector<MotRow>& rows, int frames, double min_score)
    : by_frame_(group_by_frame(filter_detections(rows, min_score))), frames_(frames) {
  if (frames < 0) throw std::domain_error("frame count must be nonnegative");
}

std::vector<Measurement> MotDetectionSource::detections(int frame) {
  std::vector<Measurement> out;
  const auto it = by_frame_.find(frame);
  if (it == by_frame_.end()) return out;
  for (const auto& r : it->second) {
    if (r.box.w > 0.0 && r.box.h > 0.0) out.push_back(tlwh_to_measurement(r.box));
  }
  return out;
}

std::vector<FrameLogEntry> run_sequence(DetectionSource& source, const SchedulerConfig& sched,
                                        const LifecycleConfig& lifecycle) {
  SchedulerState state = make_scheduler(sched.confidence, sched.detect_frequency);
  TrackSet tracks;
  std::optional<int> pending_trigger;
  std::vector<FrameLogEntry> log;
  const int frames = source.frame_count();
  log.reserve(static_cast<std::size_t>(std::max(frames, 0)));

  for (int f = 1; f <= frames; ++f) {
    FrameLogEntry entry;
    entry.frame = f;
    const auto decision = should_detect(state);
    bool low = false;
    if (decision.detect) {
      std::vector<Measurement> dets;
      try {
        dets = source.detections(f);
      } catch (const std::exception& e) {
        throw std::runtime_error("frame " + std::to_string(f) + ": " + e.what());
      }
      tracks = step_detect(tracks, dets, lifecycle).tracks;
      entry.detected = true;
      entry.trigger = decision.trigger;
      if (decision.trigger == Trigger::LowConfidence) entry.trigger_track = pending_trigger;
      pending_trigger.reset();
    } else {
      auto step = step_predict_only(tracks, state.gate, lifecycle.noise);
      tracks = std::move(step.tracks);
      low = step.low;
      entry.max_m2 = step.max_m2;
      entry.max_m2_track = step.max_track;
      pending_trigger = low ? step.max_track : std::nullopt;
    }

    for (const auto& t : tracks.tracks) {
      const bool report = t.status == TrackStatus::Confirmed ||
                          (lifecycle.report_tentative && t.status == TrackStatus::Tentative);
      if (report) entry.outputs.push_back({t.id, t.box(), t.status});
    }
    std::sort(entry.outputs.begin(), entry.outputs.end(),
              [](const OutputBox& a, const OutputBox& b) { return a.id < b.id; });

    state = after_frame(state, decision.detect, low);
    log.push_back(std::move(entry));
  }
  return log;
}

std::vector<MotRow> hypothesis_rows(const std::vector<FrameLogEntry>& log) {
  std::vector<MotRow> rows;
  for (const auto& e : log) {
    for (const auto& o : e.outputs) {
      MotRow r;
      r.frame = e.frame;
      r.id = o.id;
      r.box = o.box;
      rows.push_back(r);
    }
  }
  return rows;
}

std::string emit_frame_log(const std::vector<FrameLogEntry>& log) {
  std::string out = "frame,detected,trigger,max_m2,max_m2_track,trigger_track,outputs\n";
  for (const auto& e : log) {
    out += std::to_string(e.frame);
    out += e.detected ? ",1," : ",0,";
    out += to_string(e.trigger);
    out += ',';
    if (e.max_m2) out += format_real(*e.max_m2);
    out += ',';
    if (e.max_m2_track) out += std::to_string(*e.max_m2_track);
    out += ',';
    if (e.trigger_track) out += std::to_string(*e.trigger_track);
    out += ',';
    out += std::to_string(e.outputs.size());
    out += '\n';
  }
  return out;
}

}  // namespace ctd

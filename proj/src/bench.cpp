#include "ctd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ctd {
namespace {

struct Preset {
  const char* name;
  double full_hz;
};

// Measured full-pipeline rates of the three detector integrations.
constexpr Preset kPresets[] = {
    {"yolov3-tiny", 10.915},
    {"mobilenet-ssd", 15.604},
    {"squeezenet", 21.673},
};

std::string cell_label(double p, int d) {
  return "(p=" + format_real(p) + ", D=" + std::to_string(d) + ")";
}

}  // namespace

CostModel calibrate_preset(const std::string& name, double full_detect_hz, double tracker_only_hz) {
  if (!(full_detect_hz > 0.0) || !(full_detect_hz < tracker_only_hz)) {
    throw std::domain_error("cost model: need 0 < full-detect Hz < tracker-only Hz");
  }
  return {name, 1000.0 / full_detect_hz, 1000.0 / tracker_only_hz};
}

std::optional<CostModel> cost_preset(const std::string& name, double tracker_only_hz) {
  for (const auto& p : kPresets) {
    if (name == p.name) return calibrate_preset(p.name, p.full_hz, tracker_only_hz);
  }
  return std::nullopt;
}

std::vector<std::string> cost_preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

double effective_hz(const std::vector<FrameLogEntry>& log, const CostModel& cm) {
  if (log.empty()) throw std::domain_error("effective_hz: empty frame log");
  const auto detected = static_cast<double>(detection_count(log));
  const auto skipped = static_cast<double>(log.size()) - detected;
  const double total_ms = detected * cm.t_detect_ms + skipped * cm.t_track_ms;
  return 1000.0 * static_cast<double>(log.size()) / total_ms;
}

int detection_count(const std::vector<FrameLogEntry>& log) {
  return static_cast<int>(std::count_if(log.begin(), log.end(), [](const FrameLogEntry& e) { return e.detected; }));
}

double speed_increase(double hz_base, double hz) { return hz / hz_base - 1.0; }
double accuracy_decrease(double mota_base, double mota) { return 1.0 - mota / mota_base; }

std::vector<double> default_confidence_grid() { return {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 1.0}; }

std::vector<int> default_frequency_grid() {
  std::vector<int> d(11);
  for (int i = 0; i < 11; ++i) d[i] = i + 1;
  return d;
}

SweepRow evaluate_cell(const SweepInput& input, double confidence, int detect_frequency, const CostModel& cm,
                       const LifecycleConfig& lifecycle, const MetricsConfig& metrics, double min_score) {
  MotDetectionSource source(input.det, input.frames, min_score);
  const auto log = run_sequence(source, {confidence, detect_frequency}, lifecycle);
  SweepRow row;
  row.confidence = confidence;
  row.detect_frequency = detect_frequency;
  row.frames = static_cast<int>(log.size());
  row.detections = detection_count(log);
  row.hz = log.empty() ? 0.0 : effective_hz(log, cm);
  row.metrics = clear_mot(input.gt, hypothesis_rows(log), metrics);
  return row;
}

std::vector<SweepRow> sweep(const SweepInput& input, const SweepConfig& cfg) {
  if (cfg.confidences.empty() || cfg.frequencies.empty()) throw std::domain_error("sweep: empty grid");
  std::vector<std::pair<double, int>> cells;
  for (double p : cfg.confidences) {
    for (int d : cfg.frequencies) cells.emplace_back(p, d);
  }
  std::sort(cells.begin(), cells.end());

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto [p, d] = cells[i];
      try {
        rows[i] = evaluate_cell(input, p, d, cfg.cost, cfg.lifecycle, cfg.metrics, cfg.min_score);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(std::runtime_error("sweep cell " + cell_label(p, d) + ": " + e.what()));
        }
      }
    }
  };

  unsigned n = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(cells.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "confidence,detect_frequency,detections,frames,hz,mota,motp,mt,ml,fp,fn,idsw\n";
  for (const auto& r : rows) {
    out += format_real(r.confidence) + ',' + std::to_string(r.detect_frequency) + ',' +
           std::to_string(r.detections) + ',' + std::to_string(r.frames) + ',' + format_real(r.hz) + ',' +
           format_real(r.metrics.mota) + ',' + format_real(r.metrics.motp) + ',' + format_real(r.metrics.mt) +
           ',' + format_real(r.metrics.ml) + ',' + std::to_string(r.metrics.fp) + ',' +
           std::to_string(r.metrics.fn) + ',' + std::to_string(r.metrics.idsw) + '\n';
  }
  return out;
}

Comparison compare_ctd_vs_skip(const SweepInput& input, double confidence, int detect_frequency,
                               const CostModel& cm, const LifecycleConfig& lifecycle,
                               const MetricsConfig& metrics, double min_score) {
  if (!(confidence >= 0.0 && confidence < 1.0)) {
    throw std::domain_error("compare_ctd_vs_skip: confidence must lie in [0, 1); 1 disables triggering");
  }
  Comparison c;
  c.ctd = evaluate_cell(input, confidence, detect_frequency, cm, lifecycle, metrics, min_score);
  c.skip = evaluate_cell(input, 1.0, detect_frequency, cm, lifecycle, metrics, min_score);
  c.mota_delta = c.ctd.metrics.mota - c.skip.metrics.mota;
  c.hz_delta = c.ctd.hz - c.skip.hz;
  return c;
}

int matching_skip_frequency(int frames, int target) {
  if (frames < 1 || target < 1) throw std::domain_error("matching_skip_frequency: need positive counts");
  int best = 1;
  int best_gap = std::abs(frames - target);
  for (int d = 2; d <= frames; ++d) {
    const int count = (frames + d - 1) / d;
    const int gap = std::abs(count - target);
    if (gap < best_gap) {
      best = d;
      best_gap = gap;
    }
    if (count < target) break;
  }
  return best;
}

}  // namespace ctd

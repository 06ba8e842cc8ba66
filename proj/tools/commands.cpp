#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ctd/bench.hpp"
#include "ctd/errors.hpp"
#include "ctd/scenario.hpp"

namespace ctd::cli {
namespace {

namespace fs = std::filesystem;

// Raised for configuration problems detected after flag parsing (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string det_path;
  std::string gt_path;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  int frames = 0;
};

struct TrackerOptions {
  double min_score = kDefaultMinScore;
  int n_init = 3;
  int max_age = 30;
  std::string cost_preset = "yolov3-tiny";
  std::optional<double> t_detect_ms;
  std::optional<double> t_track_ms;
  double iou_min = 0.5;
};

void add_input_flags(CLI::App& cmd, InputOptions& in) {
  cmd.add_option("--det", in.det_path, "Detections in MOT CSV format (alternative to --scenario)");
  cmd.add_option("--gt", in.gt_path, "Ground truth in MOT CSV format; enables evaluation");
  cmd.add_option("--scenario", in.scenario_path, "JSON scenario spec; synthesizes detections and ground truth");
  cmd.add_option("--seed", in.seed, "Override the scenario seed");
  cmd.add_option("--frames", in.frames, "Sequence length (default: last frame found in the inputs)")
      ->check(CLI::NonNegativeNumber);
}

void add_tracker_flags(CLI::App& cmd, TrackerOptions& t) {
  cmd.add_option("--min-score", t.min_score, "Discard detections scoring below this")->capture_default_str();
  cmd.add_option("--n-init", t.n_init, "Consecutive hits to confirm a track")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--max-age", t.max_age, "Detection-frame misses before a confirmed track is deleted")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--cost-preset", t.cost_preset, "Latency preset")
      ->check(CLI::IsMember(cost_preset_names()))
      ->capture_default_str();
  cmd.add_option("--t-detect-ms", t.t_detect_ms, "Per-frame cost when the detector runs (overrides the preset)");
  cmd.add_option("--t-track-ms", t.t_track_ms, "Per-frame cost when only the tracker runs (default 10 ms)");
  cmd.add_option("--iou-min", t.iou_min, "Minimum IoU for a gt/hypothesis match")->capture_default_str();
}

SweepInput load_input(const InputOptions& in) {
  SweepInput input;
  if (!in.scenario_path.empty()) {
    if (!in.det_path.empty()) throw UsageError("--scenario and --det are mutually exclusive");
    auto spec = load_scenario(in.scenario_path);
    if (in.seed) spec.seed = *in.seed;
    auto data = generate_scenario(spec);
    input.det = std::move(data.det);
    input.gt = std::move(data.gt);
    input.frames = spec.frames;
  } else {
    if (in.det_path.empty()) throw UsageError("one of --det or --scenario is required");
    input.det = read_mot_file(in.det_path);
    input.frames = last_frame(input.det);
  }
  if (!in.gt_path.empty()) {
    input.gt = read_mot_file(in.gt_path);
    input.frames = std::max(input.frames, last_frame(input.gt));
  }
  if (in.frames > 0) input.frames = in.frames;
  return input;
}

bool has_ground_truth(const InputOptions& in) { return !in.scenario_path.empty() || !in.gt_path.empty(); }

CostModel resolve_cost(const TrackerOptions& t) {
  const double track_ms = t.t_track_ms.value_or(1000.0 / kDefaultTrackerOnlyHz);
  if (!(track_ms > 0.0)) throw UsageError("--t-track-ms must be positive");
  CostModel cm;
  if (t.t_detect_ms) {
    cm = {"custom", *t.t_detect_ms, track_ms};
  } else {
    cm = *cost_preset(t.cost_preset, 1000.0 / track_ms);
  }
  if (!(cm.t_detect_ms >= cm.t_track_ms)) throw UsageError("detection cost must be at least the tracking cost");
  return cm;
}

LifecycleConfig lifecycle_of(const TrackerOptions& t) {
  LifecycleConfig cfg;
  cfg.n_init = t.n_init;
  cfg.max_age = t.max_age;
  return cfg;
}

MetricsConfig metrics_of(const TrackerOptions& t) {
  if (!(t.iou_min >= 0.0 && t.iou_min < 1.0)) throw UsageError("--iou-min must lie in [0, 1)");
  MetricsConfig m;
  m.iou_min = t.iou_min;
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-', 1);
    try {
      if constexpr (std::is_integral_v<T>) {
        if (dash != std::string::npos) {
          const int lo = std::stoi(item.substr(0, dash));
          const int hi = std::stoi(item.substr(dash + 1));
          for (int v = lo; v <= hi; ++v) out.push_back(v);
          continue;
        }
        std::size_t used = 0;
        out.push_back(static_cast<T>(std::stoi(item, &used)));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        std::size_t used = 0;
        out.push_back(static_cast<T>(std::stod(item, &used)));
        if (used != item.size()) throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": grid is empty");
  return out;
}

std::string run_summary(const SweepRow& row, const CostModel& cm, bool with_metrics) {
  std::string s;
  s += "frames=" + std::to_string(row.frames) + '\n';
  s += "detections=" + std::to_string(row.detections) + '\n';
  s += "confidence=" + format_real(row.confidence) + '\n';
  s += "detect_frequency=" + std::to_string(row.detect_frequency) + '\n';
  s += "cost_model=" + cm.name + '\n';
  s += "t_detect_ms=" + format_real(cm.t_detect_ms) + '\n';
  s += "t_track_ms=" + format_real(cm.t_track_ms) + '\n';
  s += "hz=" + format_real(row.hz) + '\n';
  if (with_metrics) {
    s += format_report_kv(row.metrics);
    s += '\n';
    s += format_report_table(row.metrics);
  }
  return s;
}

int cmd_run(const InputOptions& in, const TrackerOptions& t, double confidence, int detect_frequency,
            const std::string& out_dir, std::ostream& out) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw UsageError("--confidence must lie in [0, 1]");
  const auto cm = resolve_cost(t);
  const auto lifecycle = lifecycle_of(t);
  const auto mcfg = metrics_of(t);
  const auto input = load_input(in);

  MotDetectionSource source(input.det, input.frames, t.min_score);
  const auto log = run_sequence(source, {confidence, detect_frequency}, lifecycle);
  const auto hyp = hypothesis_rows(log);

  SweepRow row;
  row.confidence = confidence;
  row.detect_frequency = detect_frequency;
  row.frames = static_cast<int>(log.size());
  row.detections = detection_count(log);
  row.hz = log.empty() ? 0.0 : effective_hz(log, cm);
  const bool evaluate = has_ground_truth(in);
  if (evaluate) row.metrics = clear_mot(input.gt, hyp, mcfg);

  const auto dir = prepare_out_dir(out_dir);
  write_text(dir / "hyp.txt", emit_mot(hyp));
  write_text(dir / "framelog.csv", emit_frame_log(log));
  const auto summary = run_summary(row, cm, evaluate);
  write_text(dir / "report.txt", summary);
  out << summary;
  return kExitOk;
}

int cmd_sweep(const InputOptions& in, const TrackerOptions& t, const std::string& thresholds,
              const std::string& freqs, unsigned threads, const std::string& out_dir, std::ostream& out) {
  SweepConfig cfg;
  cfg.confidences = parse_list<double>(thresholds, "--thresholds");
  cfg.frequencies = parse_list<int>(freqs, "--freqs");
  for (double p : cfg.confidences) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--thresholds: values must lie in [0, 1]");
  }
  for (int d : cfg.frequencies) {
    if (d < 1) throw UsageError("--freqs: values must be >= 1");
  }
  if (!has_ground_truth(in)) throw UsageError("sweep needs ground truth (--gt or --scenario)");
  cfg.cost = resolve_cost(t);
  cfg.lifecycle = lifecycle_of(t);
  cfg.metrics = metrics_of(t);
  cfg.min_score = t.min_score;
  cfg.threads = threads;
  const auto input = load_input(in);

  const auto rows = sweep(input, cfg);
  const auto dir = prepare_out_dir(out_dir);
  write_text(dir / "sweep.csv", emit_sweep_csv(rows));

  char line[160];
  std::snprintf(line, sizeof(line), "%6s %4s %6s %9s %8s %6s %6s %6s\n", "p", "D", "dets", "hz", "MOTA", "FP",
                "FN", "IDSw");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%6.2f %4d %6d %9.3f %8.4f %6ld %6ld %6ld\n", r.confidence,
                  r.detect_frequency, r.detections, r.hz, r.metrics.mota, r.metrics.fp, r.metrics.fn,
                  r.metrics.idsw);
    out << line;
  }
  out << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_metrics(const std::string& gt_path, const std::string& hyp_path, double iou_min, std::ostream& out) {
  if (!(iou_min >= 0.0 && iou_min < 1.0)) throw UsageError("--iou-min must lie in [0, 1)");
  const auto gt = read_mot_file(gt_path);
  const auto hyp = read_mot_file(hyp_path);
  MetricsConfig cfg;
  cfg.iou_min = iou_min;
  const auto rep = clear_mot(gt, hyp, cfg);
  out << format_report_table(rep) << '\n' << format_report_kv(rep);
  return kExitOk;
}

int cmd_synth(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
              std::ostream& out) {
  auto spec = load_scenario(scenario_path);
  if (seed) spec.seed = *seed;
  const auto data = generate_scenario(spec);
  const auto dir = prepare_out_dir(out_dir);
  write_mot_file((dir / "gt.txt").string(), data.gt);
  write_mot_file((dir / "det.txt").string(), data.det);
  out << "wrote " << data.gt.size() << " gt rows and " << data.det.size() << " detections to " << dir.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence-triggered tracking-by-detection: run, sweep, evaluate, synthesize"};
  app.name(args.empty() ? "ctd_cli" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with flag values; command-line flags take precedence");

  InputOptions in;
  TrackerOptions tracker;
  std::string out_dir = "out";
  double confidence = 1.0;
  int detect_frequency = 1;
  std::string thresholds = "0.1,0.3,0.5,0.7,0.8,0.9,0.95,1.0";
  std::string freqs = "1-11";
  unsigned threads = 0;
  std::string metrics_gt, metrics_hyp;
  double metrics_iou = 0.5;
  std::string synth_scenario;
  std::optional<std::uint64_t> synth_seed;

  auto* run = app.add_subcommand("run", "Track one sequence; writes hyp.txt, framelog.csv and report.txt");
  add_input_flags(*run, in);
  add_tracker_flags(*run, tracker);
  run->add_option("--confidence", confidence, "Confidence threshold p in [0, 1]; 1 disables triggering")
      ->capture_default_str();
  run->add_option("--detect-freq", detect_frequency, "Detect at least every D frames")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Evaluate a confidence x frequency grid; writes sweep.csv");
  add_input_flags(*sw, in);
  add_tracker_flags(*sw, tracker);
  sw->add_option("--thresholds", thresholds, "Comma-separated confidence grid")->capture_default_str();
  sw->add_option("--freqs", freqs, "Comma-separated detect frequencies; ranges like 1-11 allowed")
      ->capture_default_str();
  sw->add_option("--threads", threads, "Worker threads (0: one per core)")->capture_default_str();
  sw->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* met = app.add_subcommand("metrics", "CLEAR-MOT evaluation of a hypothesis file");
  met->add_option("--gt", metrics_gt, "Ground truth MOT file")->required();
  met->add_option("--hyp", metrics_hyp, "Hypothesis MOT file")->required();
  met->add_option("--iou-min", metrics_iou, "Minimum IoU for a match")->capture_default_str();

  auto* syn = app.add_subcommand("synth", "Write gt.txt and det.txt for a scenario spec");
  syn->add_option("--scenario", synth_scenario, "JSON scenario spec")->required();
  syn->add_option("--seed", synth_seed, "Override the scenario seed");
  syn->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("ctd_cli");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(in, tracker, confidence, detect_frequency, out_dir, out);
    if (sw->parsed()) return cmd_sweep(in, tracker, thresholds, freqs, threads, out_dir, out);
    if (met->parsed()) return cmd_metrics(metrics_gt, metrics_hyp, metrics_iou, out);
    if (syn->parsed()) return cmd_synth(synth_scenario, synth_seed, out_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ctd::cli

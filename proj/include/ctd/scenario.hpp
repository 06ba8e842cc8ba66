#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ctd/datasets.hpp"

namespace ctd {

/// Portable random source: std::mt19937_64 (bit-exact across conforming
/// standard libraries) with hand-written variate transforms, because the
/// std::*_distribution algorithms are implementation-defined.
class ScenarioRng {
 public:
  explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits of one draw.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box-Muller; consumes two uniforms and caches nothing.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Knuth's multiplication method; fine for the small means used here.
  int poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

/// Velocity in effect from `start` (an absolute frame) until the next segment.
struct VelocitySegment {
  int start = 1;
  double vx = 0.0;
  double vy = 0.0;
};

struct ScenarioObject {
  int entry = 1;
  int exit = 1;
  Box box;  // at the entry frame
  std::vector<VelocitySegment> segments;
  // Velocity before the first segment starts.
  double vx = 0.0;
  double vy = 0.0;
};

struct ScenarioSpec {
  int frames = 600;
  int width = 1920;
  int height = 1080;
  std::vector<ScenarioObject> objects;
  double noise = 0.0;      // detection jitter std as a fraction of box height
  double miss_rate = 0.0;  // per object-frame dropout probability
  double fp_rate = 0.0;    // expected false positives per frame
  std::uint64_t seed = 0;

  /// Throws std::domain_error naming the offending field.
  void validate() const;
};

struct ScenarioData {
  std::vector<MotRow> gt;
  std::vector<MotRow> det;
};

/// Ground truth follows the piecewise-constant motion exactly and is emitted
/// only while the box overlaps the image. Detections are the ground truth with
/// per-coordinate Gaussian jitter (std = noise * h), Bernoulli dropouts and
/// Poisson false positives; id is -1. Deterministic in `spec.seed`.
ScenarioData generate_scenario(const ScenarioSpec& spec);

/// JSON scenario description; see data/scenarios/README.md for the schema.
ScenarioSpec parse_scenario(std::string_view json_text);
ScenarioSpec load_scenario(const std::string& path);

}  // namespace ctd

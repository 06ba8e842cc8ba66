#include "ctd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ctd {

double ScenarioRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ScenarioRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int ScenarioRng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  int k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& msg) { throw std::domain_error("scenario: " + msg); };
  if (frames < 1) fail("frames must be >= 1");
  if (width < 1 || height < 1) fail("width and height must be >= 1");
  if (!(noise >= 0.0)) fail("noise must be >= 0");
  if (!(miss_rate >= 0.0 && miss_rate <= 1.0)) fail("miss_rate must lie in [0, 1]");
  if (!(fp_rate >= 0.0)) fail("fp_rate must be >= 0");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "].";
    if (o.entry < 1) fail(where + "entry must be >= 1");
    if (o.exit <= o.entry) fail(where + "exit must be greater than entry");
    if (!(o.box.w > 0.0 && o.box.h > 0.0)) fail(where + "box width and height must be positive");
    if (o.box.x < 0.0 || o.box.y < 0.0 || o.box.x + o.box.w > width || o.box.y + o.box.h > height) {
      fail(where + "box must lie inside the image at entry");
    }
    for (std::size_t k = 1; k < o.segments.size(); ++k) {
      if (o.segments[k].start <= o.segments[k - 1].start) {
        fail(where + "segments must have strictly increasing start frames");
      }
    }
  }
}

namespace {

std::pair<double, double> velocity_at(const ScenarioObject& o, int frame) {
  double vx = o.vx;
  double vy = o.vy;
  for (const auto& s : o.segments) {
    if (s.start > frame) break;
    vx = s.vx;
    vy = s.vy;
  }
  return {vx, vy};
}

bool overlaps_image(const Box& b, int width, int height) {
  return b.x < width && b.y < height && b.x + b.w > 0.0 && b.y + b.h > 0.0;
}

}  // namespace

ScenarioData generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioRng rng(spec.seed);
  ScenarioData out;

  std::vector<Box> pos;
  std::vector<bool> gone(spec.objects.size(), false);
  for (const auto& o : spec.objects) pos.push_back(o.box);

  for (int f = 1; f <= spec.frames; ++f) {
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
      const auto& o = spec.objects[i];
      if (f < o.entry || f > o.exit || gone[i]) continue;
      if (f > o.entry) {
        const auto [vx, vy] = velocity_at(o, f - 1);
        pos[i].x += vx;
        pos[i].y += vy;
      }
      if (!overlaps_image(pos[i], spec.width, spec.height)) {
        gone[i] = true;
        continue;
      }

      MotRow gt;
      gt.frame = f;
      gt.id = static_cast<int>(i) + 1;
      gt.box = pos[i];
      out.gt.push_back(gt);

      if (rng.bernoulli(spec.miss_rate)) continue;
      const double sigma = spec.noise * gt.box.h;
      MotRow det = gt;
      det.id = -1;
      det.box.x += sigma * rng.normal();
      det.box.y += sigma * rng.normal();
      det.box.w = std::max(1.0, det.box.w + sigma * rng.normal());
      det.box.h = std::max(1.0, det.box.h + sigma * rng.normal());
      det.conf = rng.uniform(0.5, 1.0);
      out.det.push_back(det);
    }

    const int n_fp = rng.poisson(spec.fp_rate);
    for (int k = 0; k < n_fp; ++k) {
      MotRow fp;
      fp.frame = f;
      fp.id = -1;
      fp.box.h = rng.uniform(40.0, 160.0);
      fp.box.w = 0.4 * fp.box.h;
      fp.box.x = rng.uniform(0.0, std::max(0.0, spec.width - fp.box.w));
      fp.box.y = rng.uniform(0.0, std::max(0.0, spec.height - fp.box.h));
      fp.conf = rng.uniform();
      out.det.push_back(fp);
    }
  }
  return out;
}

namespace {

using nlohmann::json;

template <typename T>
T field(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::domain_error("scenario: " + where + key + " has the wrong type");
  }
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw std::domain_error("scenario: missing field " + where + key);
  return field<T>(obj, key, where, T{});
}

std::pair<double, double> pair_field(const json& obj, const char* key, const std::string& where) {
  const auto v = field<std::vector<double>>(obj, key, where, {0.0, 0.0});
  if (v.size() != 2) throw std::domain_error("scenario: " + where + key + " must be [vx, vy]");
  return {v[0], v[1]};
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::domain_error(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::domain_error("scenario: top level must be an object");

  ScenarioSpec spec;
  spec.frames = field<int>(root, "frames", "", spec.frames);
  spec.width = field<int>(root, "width", "", spec.width);
  spec.height = field<int>(root, "height", "", spec.height);
  spec.noise = field<double>(root, "noise", "", spec.noise);
  spec.miss_rate = field<double>(root, "miss_rate", "", spec.miss_rate);
  spec.fp_rate = field<double>(root, "fp_rate", "", spec.fp_rate);
  spec.seed = field<std::uint64_t>(root, "seed", "", spec.seed);

  const auto objects = root.contains("objects") ? root.at("objects") : json::array();
  if (!objects.is_array()) throw std::domain_error("scenario: objects must be an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "].";
    if (!o.is_object()) throw std::domain_error("scenario: " + where.substr(0, where.size() - 1) + " must be an object");
    ScenarioObject obj;
    obj.entry = field<int>(o, "entry", where, 1);
    obj.exit = field<int>(o, "exit", where, spec.frames);
    const auto box = required<std::vector<double>>(o, "box", where);
    if (box.size() != 4) throw std::domain_error("scenario: " + where + "box must be [x, y, w, h]");
    obj.box = {box[0], box[1], box[2], box[3]};
    std::tie(obj.vx, obj.vy) = pair_field(o, "velocity", where);
    if (o.contains("segments")) {
      const auto& segs = o.at("segments");
      if (!segs.is_array()) throw std::domain_error("scenario: " + where + "segments must be an array");
      for (std::size_t k = 0; k < segs.size(); ++k) {
        const std::string sw = where + "segments[" + std::to_string(k) + "].";
        VelocitySegment seg;
        seg.start = required<int>(segs[k], "start", sw);
        std::tie(seg.vx, seg.vy) = pair_field(segs[k], "velocity", sw);
        obj.segments.push_back(seg);
      }
    }
    spec.objects.push_back(obj);
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace ctd

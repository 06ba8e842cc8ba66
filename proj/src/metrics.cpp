#include "ctd/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "ctd/association.hpp"

namespace ctd {

double iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

MetricsReport clear_mot(const std::vector<MotRow>& gt, const std::vector<MotRow>& hyp, const MetricsConfig& cfg) {
  if (!(cfg.iou_min >= 0.0 && cfg.iou_min < 1.0)) throw std::domain_error("iou_min must lie in [0, 1)");

  auto by_id = [](std::vector<MotRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) { return a.id < b.id; });
    return group_by_frame(rows);
  };
  const auto gt_frames = by_id(gt);
  const auto hyp_frames = by_id(hyp);

  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  MetricsReport rep;
  rep.frames = static_cast<long>(frames.size());
  std::map<int, int> last_match;  // gt id -> hyp id of its most recent match
  std::map<int, long> gt_seen, gt_matched;
  double iou_sum = 0.0;
  const std::vector<MotRow> none;

  for (int f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& g = git == gt_frames.end() ? none : git->second;
    const auto& h = hit == hyp_frames.end() ? none : hit->second;

    std::vector<int> g_to_h(g.size(), -1);
    std::vector<bool> h_taken(h.size(), false);

    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto lm = last_match.find(g[i].id);
      if (lm == last_match.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h_taken[j] || h[j].id != lm->second) continue;
        if (iou(g[i].box, h[j].box) >= cfg.iou_min) {
          g_to_h[i] = static_cast<int>(j);
          h_taken[j] = true;
        }
        break;
      }
    }

    std::vector<std::size_t> g_rest, h_rest;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g_to_h[i] < 0) g_rest.push_back(i);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_taken[j]) h_rest.push_back(j);
    }
    CostMatrix costs(g_rest.size(), h_rest.size());
    for (std::size_t a = 0; a < g_rest.size(); ++a) {
      for (std::size_t b = 0; b < h_rest.size(); ++b) {
        const double o = iou(g[g_rest[a]].box, h[h_rest[b]].box);
        costs(a, b) = o >= cfg.iou_min && o > 0.0 ? 1.0 - o : CostMatrix::kInfeasible;
      }
    }
    for (auto [a, b] : hungarian(costs).matches) {
      g_to_h[g_rest[a]] = static_cast<int>(h_rest[b]);
      h_taken[h_rest[b]] = true;
    }

    for (std::size_t i = 0; i < g.size(); ++i) {
      const int gid = g[i].id;
      gt_seen[gid] += 1;
      if (g_to_h[i] < 0) {
        rep.fn += 1;
        continue;
      }
      const auto& hr = h[static_cast<std::size_t>(g_to_h[i])];
      const auto lm = last_match.find(gid);
      if (lm != last_match.end() && lm->second != hr.id) rep.idsw += 1;
      last_match[gid] = hr.id;
      gt_matched[gid] += 1;
      rep.matches += 1;
      iou_sum += iou(g[i].box, hr.box);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_taken[j]) rep.fp += 1;
    }
    rep.gt_boxes += static_cast<long>(g.size());
  }

  rep.gt_trajectories = static_cast<long>(gt_seen.size());
  long mt = 0, ml = 0;
  for (const auto& [id, seen] : gt_seen) {
    const double frac = static_cast<double>(gt_matched[id]) / static_cast<double>(seen);
    if (frac >= cfg.mostly_tracked) ++mt;
    if (frac <= cfg.mostly_lost) ++ml;
  }
  if (rep.gt_trajectories > 0) {
    rep.mt = static_cast<double>(mt) / rep.gt_trajectories;
    rep.ml = static_cast<double>(ml) / rep.gt_trajectories;
  }
  rep.motp = rep.matches > 0 ? iou_sum / rep.matches : 0.0;
  if (rep.gt_boxes > 0) {
    rep.mota = 1.0 - static_cast<double>(rep.fn + rep.fp + rep.idsw) / static_cast<double>(rep.gt_boxes);
  } else {
    rep.mota = rep.fp == 0 ? 1.0 : -static_cast<double>(rep.fp);
  }
  return rep;
}

std::string format_report_table(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%8s %8s %7s %7s %7s %8s %8s %8s %8s\n"
                "%8.4f %8.4f %7.4f %7.4f %7ld %8ld %8ld %8ld %8ld\n",
                "MOTA", "MOTP", "MT", "ML", "IDSw", "FP", "FN", "GT", "Frames", r.mota, r.motp, r.mt, r.ml, r.idsw,
                r.fp, r.fn, r.gt_boxes, r.frames);
  return buf;
}

std::string format_report_kv(const MetricsReport& r) {
  std::string out;
  auto put = [&out](const char* k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  put("mota", format_real(r.mota));
  put("motp", format_real(r.motp));
  put("mt", format_real(r.mt));
  put("ml", format_real(r.ml));
  put("idsw", std::to_string(r.idsw));
  put("fp", std::to_string(r.fp));
  put("fn", std::to_string(r.fn));
  put("matches", std::to_string(r.matches));
  put("gt_boxes", std::to_string(r.gt_boxes));
  put("gt_trajectories", std::to_string(r.gt_trajectories));
  put("frames", std::to_string(r.frames));
  return out;
}

}  // namespace ctd

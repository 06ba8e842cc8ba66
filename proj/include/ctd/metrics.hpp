#pragma once

#include <string>
#include <vector>

#include "ctd/datasets.hpp"

namespace ctd {

/// Intersection over union of two tlwh boxes; 0 when disjoint or when the
/// union is empty.
double iou(const Box& a, const Box& b);

struct MetricsConfig {
  double iou_min = 0.5;
  double mostly_tracked = 0.8;  // matched fraction at or above: MT
  double mostly_lost = 0.2;     // matched fraction at or below: ML
};

struct MetricsReport {
  double mota = 0.0;
  double motp = 0.0;  // mean IoU over matches
  long fp = 0;
  long fn = 0;
  long idsw = 0;
  long matches = 0;
  double mt = 0.0;
  double ml = 0.0;
  long gt_boxes = 0;
  long gt_trajectories = 0;
  long frames = 0;
};

/// CLEAR-MOT over gt and hypothesis rows. Each frame first keeps the previous
/// gt-to-hypothesis correspondences that still overlap by at least iou_min,
/// then pairs the rest by maximum IoU. Throws std::domain_error unless
/// 0 <= iou_min < 1.
MetricsReport clear_mot(const std::vector<MotRow>& gt, const std::vector<MotRow>& hyp,
                        const MetricsConfig& cfg = {});

/// Aligned human-readable table.
std::string format_report_table(const MetricsReport& r);

/// One `key=value` pair per line.
std::string format_report_kv(const MetricsReport& r);

}  // namespace ctd

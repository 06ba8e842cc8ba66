#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctd/kalman.hpp"

namespace ctd {

/// Axis-aligned box, top-left corner plus size, in pixels.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const Box&) const = default;
};

/// One line of a MOTChallenge det/gt/result file.
struct MotRow {
  int frame = 1;
  int id = -1;
  Box box;
  double conf = 1.0;
  double x3 = -1.0;
  double y3 = -1.0;
  double z3 = -1.0;

  bool operator==(const MotRow&) const = default;
};

/// Default detector score threshold.
inline constexpr double kDefaultMinScore = 0.3;

/// Parses MOT CSV text. Rows need at least six fields (frame, id, x, y, w, h);
/// missing trailing fields take conf = 1 and placeholders = -1. Blank lines
/// and CR line endings are tolerated. Throws ParseError with the line number.
std::vector<MotRow> parse_mot(std::string_view text);

/// Canonical ten-field text, one row per line, stably sorted by (frame, id).
/// Reals use the shortest representation that round-trips exactly.
std::string emit_mot(std::vector<MotRow> rows);

std::vector<MotRow> read_mot_file(const std::string& path);
void write_mot_file(const std::string& path, const std::vector<MotRow>& rows);

Measurement tlwh_to_measurement(const Box& b);
Box measurement_to_tlwh(const Measurement& m);

/// Keeps rows with conf >= min_conf, order preserved.
std::vector<MotRow> filter_detections(const std::vector<MotRow>& rows, double min_conf);

/// Rows bucketed by frame number, input order preserved within a frame.
std::map<int, std::vector<MotRow>> group_by_frame(const std::vector<MotRow>& rows);

/// Largest frame index present, 0 for no rows.
int last_frame(const std::vector<MotRow>& rows);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

}  // namespace ctd

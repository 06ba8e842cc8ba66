#include "ctd/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ctd/errors.hpp"

namespace ctd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("non-numeric field '" + std::string(field) + "'", line);
  }
  return v;
}

int parse_integral(std::string_view field, std::size_t line, const char* name) {
  const double v = parse_real(field, line);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError(std::string(name) + " must be an integer", line);
  }
  return static_cast<int>(v);
}

}  // namespace

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf.data(), ptr);
}

std::vector<MotRow> parse_mot(std::string_view text) {
  std::vector<MotRow> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 6) {
      throw ParseError("expected at least 6 fields, found " + std::to_string(fields.size()), line_no);
    }
    if (fields.size() > 10) {
      throw ParseError("expected at most 10 fields, found " + std::to_string(fields.size()), line_no);
    }

    MotRow row;
    row.frame = parse_integral(fields[0], line_no, "frame");
    if (row.frame < 1) throw ParseError("frame must be >= 1", line_no);
    row.id = parse_integral(fields[1], line_no, "id");
    row.box = {parse_real(fields[2], line_no), parse_real(fields[3], line_no), parse_real(fields[4], line_no),
               parse_real(fields[5], line_no)};
    if (fields.size() > 6) row.conf = parse_real(fields[6], line_no);
    if (fields.size() > 7) row.x3 = parse_real(fields[7], line_no);
    if (fields.size() > 8) row.y3 = parse_real(fields[8], line_no);
    if (fields.size() > 9) row.z3 = parse_real(fields[9], line_no);
    rows.push_back(row);
  }
  return rows;
}

std::string emit_mot(std::vector<MotRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::string out;
  out.reserve(rows.size() * 48);
  for (const auto& r : rows) {
    out += std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.id);
    for (double v : {r.box.x, r.box.y, r.box.w, r.box.h, r.conf, r.x3, r.y3, r.z3}) {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<MotRow> read_mot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_mot(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_mot_file(const std::string& path, const std::vector<MotRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << emit_mot(rows);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Measurement tlwh_to_measurement(const Box& b) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw std::domain_error("box width and height must be positive");
  return {b.x + 0.5 * b.w, b.y + 0.5 * b.h, b.w / b.h, b.h};
}

Box measurement_to_tlwh(const Measurement& m) {
  const double w = m.a * m.h;
  return {m.cx - 0.5 * w, m.cy - 0.5 * m.h, w, m.h};
}

std::vector<MotRow> filter_detections(const std::vector<MotRow>& rows, double min_conf) {
  std::vector<MotRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [min_conf](const MotRow& r) { return r.conf >= min_conf; });
  return out;
}

std::map<int, std::vector<MotRow>> group_by_frame(const std::vector<MotRow>& rows) {
  std::map<int, std::vector<MotRow>> out;
  for (const auto& r : rows) out[r.frame].push_back(r);
  return out;
}

int last_frame(const std::vector<MotRow>& rows) {
  int f = 0;
  for (const auto& r : rows) f = std::max(f, r.frame);
  return f;
}

}  // namespace ctd

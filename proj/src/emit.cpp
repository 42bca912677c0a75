#include "wavegame/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace wg::harness {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void check_table(const ResultTable& t) {
  if (t.columns.empty()) throw ValidationError("emit: table has no columns");
  for (size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].size() != t.columns.size())
      throw ValidationError("emit: row " + std::to_string(i) + " has " +
                            std::to_string(t.rows[i].size()) + " fields, expected " +
                            std::to_string(t.columns.size()));
    for (size_t j = 0; j < t.rows[i].size(); ++j)
      if (!std::isfinite(t.rows[i][j]))
        throw ValidationError("emit: non-finite value at row " + std::to_string(i) +
                              ", column \"" + t.columns[j] + "\"");
  }
}

struct Range {
  double lo = 0;
  double hi = 1;
  void widen(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range padded(double lo, double hi) {
  if (lo > hi) return {0.0, 1.0};
  if (lo == hi) {
    double pad = std::max(0.5, std::abs(lo) * 0.5);
    return {lo - pad, hi + pad};
  }
  double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

} // namespace

std::string to_csv(const ResultTable& t) {
  check_table(t);
  std::string out;
  for (size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += csv_field(t.columns[j]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += fmt12(row[j]);
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(const std::string& text) {
  // RFC 4180 state machine; CRLF is tolerated on input even though the writer
  // only ever produces LF.
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      if (!field.empty() || field_started || !record.empty()) {
        record.push_back(field);
        records.push_back(record);
      }
      field.clear();
      record.clear();
      field_started = false;
    } else if (c == '\r') {
      // dropped; only meaningful as part of CRLF
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("parse_csv: unterminated quoted field");
  if (!field.empty() || field_started || !record.empty()) {
    record.push_back(field);
    records.push_back(record);
  }
  if (records.empty()) throw ValidationError("parse_csv: no header row");

  ResultTable t;
  t.columns = records[0];
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.columns.size())
      throw ValidationError("parse_csv: row " + std::to_string(i - 1) + " has " +
                            std::to_string(records[i].size()) + " fields, expected " +
                            std::to_string(t.columns.size()));
    std::vector<double> row;
    for (size_t j = 0; j < records[i].size(); ++j) {
      const std::string& f = records[i][j];
      char* end = nullptr;
      double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size())
        throw ValidationError("parse_csv: row " + std::to_string(i - 1) + " column " +
                              std::to_string(j) + " is not numeric");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_svg(const ResultTable& t) {
  check_table(t);
  if (t.columns.size() < 2)
    throw ValidationError("svg: need at least two columns (x and one series)");

  const double width = 860, height = 540;
  const double ml = 80, mr = 24, mt = 24, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;

  Range xr, yr;
  bool first = true;
  for (const auto& row : t.rows) {
    if (first) {
      xr = {row[0], row[0]};
      yr = {row[1], row[1]};
      first = false;
    }
    xr.widen(row[0]);
    for (size_t j = 1; j < row.size(); ++j) yr.widen(row[j]);
  }
  Range xs = padded(xr.lo, xr.hi);
  Range ys = padded(yr.lo, yr.hi);
  auto px = [&](double x) { return ml + (x - xs.lo) / (xs.hi - xs.lo) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ys.lo) / (ys.hi - ys.lo) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(width) +
       "\" height=\"" + fmt_px(height) + "\" viewBox=\"0 0 " + fmt_px(width) + " " +
       fmt_px(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // axes
  s += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(mt + ph) + "\" x2=\"" +
       fmt_px(ml + pw) + "\" y2=\"" + fmt_px(mt + ph) +
       "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(mt) + "\" x2=\"" + fmt_px(ml) +
       "\" y2=\"" + fmt_px(mt + ph) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    double xv = xs.lo + (xs.hi - xs.lo) * i / 4.0;
    double yv = ys.lo + (ys.hi - ys.lo) * i / 4.0;
    s += "<line x1=\"" + fmt_px(px(xv)) + "\" y1=\"" + fmt_px(mt + ph) + "\" x2=\"" +
         fmt_px(px(xv)) + "\" y2=\"" + fmt_px(mt + ph + 5) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + fmt_px(px(xv)) + "\" y=\"" + fmt_px(mt + ph + 20) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
         fmt_tick(xv) + "</text>\n";
    s += "<line x1=\"" + fmt_px(ml - 5) + "\" y1=\"" + fmt_px(py(yv)) + "\" x2=\"" +
         fmt_px(ml) + "\" y2=\"" + fmt_px(py(yv)) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + fmt_px(ml - 9) + "\" y=\"" + fmt_px(py(yv) + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
         fmt_tick(yv) + "</text>\n";
  }

  // axis labels: x column under the axis, y series name rotated on the left
  s += "<text x=\"" + fmt_px(ml + pw / 2) + "\" y=\"" + fmt_px(height - 12) +
       "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
       xml_escape(t.columns[0]) + "</text>\n";
  const std::string ylab = t.columns.size() == 2 ? t.columns[1] : std::string("value");
  s += "<text x=\"18\" y=\"" + fmt_px(mt + ph / 2) +
       "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 18 " +
       fmt_px(mt + ph / 2) + ")\">" + xml_escape(ylab) + "</text>\n";

  for (size_t j = 1; j < t.columns.size(); ++j) {
    const char* color = palette[(j - 1) % 6];
    if (!t.rows.empty()) {
      std::string pts;
      for (const auto& row : t.rows) {
        if (!pts.empty()) pts += ' ';
        pts += fmt_px(px(row[0])) + "," + fmt_px(py(row[j]));
      }
      s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    if (t.columns.size() > 2) {
      double ly = mt + 16 + 18 * double(j - 1);
      s += "<line x1=\"" + fmt_px(ml + pw - 150) + "\" y1=\"" + fmt_px(ly - 4) +
           "\" x2=\"" + fmt_px(ml + pw - 126) + "\" y2=\"" + fmt_px(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + fmt_px(ml + pw - 120) + "\" y=\"" + fmt_px(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(t.columns[j]) +
           "</text>\n";
    }
  }
  if (t.rows.empty())
    s += "<text x=\"" + fmt_px(ml + pw / 2) + "\" y=\"" + fmt_px(mt + ph / 2) +
         "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">no "
         "data</text>\n";

  s += "</svg>\n";
  return s;
}

void emit(const ResultTable& table, const std::string& format, const std::string& path) {
  std::string payload;
  if (format == "csv")
    payload = to_csv(table);
  else if (format == "svg")
    payload = to_svg(table);
  else
    throw ValidationError("emit: unknown format \"" + format + "\"");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("emit: cannot write \"" + path + "\"");
  f << payload;
  if (!f.good()) throw ValidationError("emit: write to \"" + path + "\" failed");
}

} // namespace wg::harness

#include "sparsemob/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <utility>

#include "sparsemob/errors.hpp"

namespace sparsemob {

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool at_row_start = true;
  bool comment = false;
  bool field_touched = false;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_touched = false;
  };
  auto end_row = [&] {
    if (!comment) {
      end_field();
      const bool blank = row.fields.size() == 1 && row.fields[0].empty();
      if (!blank) rows.push_back(std::move(row));
    }
    row = CsvRow{};
    field.clear();
    field_touched = false;
    comment = false;
    at_row_start = true;
  };

  char c;
  while (in.get(c)) {
    if (at_row_start) {
      row.line = line;
      at_row_start = false;
      if (c == '#') comment = true;
    }
    if (comment) {
      if (c == '\n') {
        ++line;
        end_row();
      }
      continue;
    }
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_touched && field.empty()) {
          quoted = true;
          field_touched = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        field.push_back(c);
        field_touched = true;
    }
  }
  if (quoted) throw DataError("line " + std::to_string(row.line) + ": unterminated quoted field");
  if (!at_row_start) end_row();
  return rows;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("bad number '" + std::string(s) + "'");
  }
  return v;
}

Seconds civil_to_epoch(int y, int mo, int d, int h, int mi, int s, Seconds offset) {
  using namespace std::chrono;
  const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!date.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    throw DataError("invalid calendar time");
  }
  const Seconds days = sys_days{date}.time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + s - offset;
}

// HH:MM:SS
bool split_clock(std::string_view s, int& h, int& m, int& sec) {
  if (s.size() < 8 || s[2] != ':' || s[5] != ':') return false;
  if (!all_digits(s.substr(0, 2)) || !all_digits(s.substr(3, 2)) || !all_digits(s.substr(6, 2))) {
    return false;
  }
  h = to_int(s.substr(0, 2));
  m = to_int(s.substr(3, 2));
  sec = to_int(s.substr(6, 2));
  return true;
}

}  // namespace

Seconds parse_utc_offset(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "Z" || s == "z" || s == "UTC" || s == "utc") return 0;
  if (s.size() < 2 || (s[0] != '+' && s[0] != '-')) {
    throw ParameterError("bad UTC offset '" + std::string(text) + "'");
  }
  const int sign = s[0] == '-' ? -1 : 1;
  std::string_view body = s.substr(1);
  int hours = 0;
  int minutes = 0;
  if (const auto colon = body.find(':'); colon != std::string_view::npos) {
    if (!all_digits(body.substr(0, colon)) || !all_digits(body.substr(colon + 1))) {
      throw ParameterError("bad UTC offset '" + std::string(text) + "'");
    }
    hours = to_int(body.substr(0, colon));
    minutes = to_int(body.substr(colon + 1));
  } else if (all_digits(body) && body.size() == 4) {
    hours = to_int(body.substr(0, 2));
    minutes = to_int(body.substr(2));
  } else if (all_digits(body) && body.size() <= 2) {
    hours = to_int(body);
  } else {
    throw ParameterError("bad UTC offset '" + std::string(text) + "'");
  }
  if (hours > 14 || minutes > 59) throw ParameterError("UTC offset out of range: " + std::string(text));
  return sign * (hours * 3600 + minutes * 60);
}

Seconds parse_timestamp(std::string_view text, Seconds utc_offset) {
  const std::string_view s = trim(text);
  if (s.empty()) throw DataError("empty timestamp");

  // Epoch seconds, optionally fractional.
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  if (all_digits(whole) && (dot == std::string_view::npos || all_digits(s.substr(dot + 1)))) {
    Seconds v = 0;
    auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), v);
    if (ec != std::errc() || ptr != whole.data() + whole.size()) {
      throw DataError("epoch timestamp out of range: " + std::string(s));
    }
    return v;
  }

  int h = 0;
  int mi = 0;
  int sec = 0;
  // HH:MM:SS/MM/DD/YYYY
  if (s.size() == 19 && s[8] == '/' && s[11] == '/' && s[14] == '/' && split_clock(s.substr(0, 8), h, mi, sec) &&
      all_digits(s.substr(9, 2)) && all_digits(s.substr(12, 2)) && all_digits(s.substr(15, 4))) {
    return civil_to_epoch(to_int(s.substr(15, 4)), to_int(s.substr(9, 2)), to_int(s.substr(12, 2)), h,
                          mi, sec, utc_offset);
  }

  // ISO-8601
  if (s.size() >= 19 && s[4] == '-' && s[7] == '-' && (s[10] == 'T' || s[10] == ' ') &&
      all_digits(s.substr(0, 4)) && all_digits(s.substr(5, 2)) && all_digits(s.substr(8, 2)) &&
      split_clock(s.substr(11, 8), h, mi, sec)) {
    std::string_view rest = s.substr(19);
    if (!rest.empty() && rest[0] == '.') {
      std::size_t k = 1;
      while (k < rest.size() && std::isdigit(static_cast<unsigned char>(rest[k]))) ++k;
      if (k == 1) throw DataError("bad fractional seconds in '" + std::string(s) + "'");
      rest.remove_prefix(k);
    }
    Seconds offset = utc_offset;
    if (!rest.empty()) {
      try {
        offset = parse_utc_offset(rest);
      } catch (const ParameterError&) {
        throw DataError("bad zone designator in '" + std::string(s) + "'");
      }
    }
    return civil_to_epoch(to_int(s.substr(0, 4)), to_int(s.substr(5, 2)), to_int(s.substr(8, 2)), h,
                          mi, sec, offset);
  }
  throw DataError("unrecognized timestamp '" + std::string(s) + "'");
}

namespace {

double parse_coordinate(std::string_view text, const char* what) {
  const std::string_view s = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

struct ParsedRow {
  std::size_t line;
  Seconds time;
  GeoPoint location;
  MobilityLabel label;
};

std::map<std::string, std::size_t> column_index(const CsvRow& header) {
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::string name(trim(header.fields[i]));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!columns.emplace(name, i).second) {
      throw DataError("line " + std::to_string(header.line) + ": duplicate column '" + name + "'");
    }
  }
  return columns;
}

std::size_t require_column(const std::map<std::string, std::size_t>& columns, const char* name) {
  const auto it = columns.find(name);
  if (it == columns.end()) throw DataError(std::string("missing column '") + name + "'");
  return it->second;
}

}  // namespace

Dataset ingest(std::istream& in, const IngestOptions& options) {
  const auto rows = parse_csv(in);
  Dataset dataset;
  if (rows.empty()) return dataset;

  const auto columns = column_index(rows.front());
  const std::size_t c_time = require_column(columns, "time");
  const std::size_t c_lon = require_column(columns, "lon");
  const std::size_t c_lat = require_column(columns, "lat");
  const std::size_t c_mid = require_column(columns, "mid");
  std::optional<std::size_t> c_label;
  if (const auto it = columns.find("label"); it != columns.end()) c_label = it->second;
  dataset.labeled = c_label.has_value();
  const std::size_t width = rows.front().fields.size();

  std::map<std::string, std::vector<ParsedRow>> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    try {
      if (row.fields.size() != width) {
        throw DataError("expected " + std::to_string(width) + " fields, found " +
                        std::to_string(row.fields.size()));
      }
      const std::string mid(trim(row.fields[c_mid]));
      if (mid.empty()) throw DataError("empty mid");
      ParsedRow parsed{row.line, parse_timestamp(row.fields[c_time], options.utc_offset),
                       {parse_coordinate(row.fields[c_lon], "lon"),
                        parse_coordinate(row.fields[c_lat], "lat")},
                       MobilityLabel::Unlabeled};
      if (!is_valid(parsed.location)) throw DataError("coordinate out of range");
      if (c_label) {
        const std::string_view letter = trim(row.fields[*c_label]);
        if (letter.size() != 1) throw DataError("bad label '" + std::string(letter) + "'");
        parsed.label = label_from_letter(letter[0]);
      }
      groups[mid].push_back(parsed);
    } catch (const DataError& e) {
      dataset.diagnostics.push_back("line " + std::to_string(row.line) + ": " + e.what());
      ++dataset.rejected_rows;
    }
  }

  for (auto& [mid, records] : groups) {
    std::stable_sort(records.begin(), records.end(),
                     [](const ParsedRow& a, const ParsedRow& b) { return a.time < b.time; });
    std::vector<TrajectoryRecord> kept;
    std::vector<MobilityLabel> labels;
    std::size_t kept_line = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      if (!kept.empty() && kept.back().time == records[k].time) {
        dataset.diagnostics.push_back("line " + std::to_string(records[k].line) + ": duplicate (mid " +
                                      mid + ", time " + std::to_string(records[k].time) +
                                      ") first seen on line " + std::to_string(kept_line));
        ++dataset.rejected_rows;
        continue;
      }
      kept.push_back({records[k].time, records[k].location});
      kept_line = records[k].line;
      labels.push_back(records[k].label);
    }
    dataset.trajectories.emplace_back(mid, std::move(kept));
    if (dataset.labeled) dataset.labels.push_back(std::move(labels));
  }

  if (options.strict && !dataset.diagnostics.empty()) {
    std::string message = std::to_string(dataset.rejected_rows) + " rejected row(s)";
    for (const auto& d : dataset.diagnostics) message += "\n  " + d;
    throw DataError(message);
  }
  return dataset;
}

Dataset ingest_file(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ingest(in, options);
}

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset(std::ostream& out, const std::vector<Trajectory>& trajectories,
                   const std::vector<std::vector<MobilityLabel>>* labels) {
  if (labels && labels->size() != trajectories.size()) {
    throw ParameterError("label table does not match the trajectories");
  }
  out << "# sparsemob trajectories v1\n";
  out << (labels ? "time,lon,lat,mid,label\n" : "time,lon,lat,mid\n");
  for (std::size_t d = 0; d < trajectories.size(); ++d) {
    const auto& traj = trajectories[d];
    const std::string mid = csv_field(traj.device());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << traj.time(i) << ',' << exact(traj.location(i).lon) << ',' << exact(traj.location(i).lat)
          << ',' << mid;
      if (labels) out << ',' << label_letter((*labels)[d].at(i));
      out << '\n';
    }
  }
}

void write_labels(std::ostream& out, const std::vector<Trajectory>& trajectories,
                  const std::vector<std::vector<MobilityLabel>>& labels) {
  if (labels.size() != trajectories.size()) {
    throw ParameterError("label table does not match the trajectories");
  }
  out << "# sparsemob labels v1\n";
  out << "mid,time,label\n";
  for (std::size_t d = 0; d < trajectories.size(); ++d) {
    const auto& traj = trajectories[d];
    if (labels[d].size() != traj.size()) throw ParameterError("label count differs from records");
    const std::string mid = csv_field(traj.device());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << mid << ',' << traj.time(i) << ',' << label_letter(labels[d][i]) << '\n';
    }
  }
}

LabelTable read_labels(std::istream& in) {
  const auto rows = parse_csv(in);
  LabelTable table;
  if (rows.empty()) return table;
  const auto columns = column_index(rows.front());
  const std::size_t c_mid = require_column(columns, "mid");
  const std::size_t c_time = require_column(columns, "time");
  const std::size_t c_label = require_column(columns, "label");
  const std::size_t width = rows.front().fields.size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != width) throw DataError(where + "wrong number of fields");
    const std::string_view letter = trim(row.fields[c_label]);
    if (letter.size() != 1) throw DataError(where + "bad label '" + std::string(letter) + "'");
    LabelTable::Row out;
    out.line = row.line;
    out.mid = std::string(trim(row.fields[c_mid]));
    try {
      out.time = parse_timestamp(row.fields[c_time], 0);
      out.label = label_from_letter(letter[0]);
    } catch (const std::exception& e) {
      throw DataError(where + e.what());
    }
    table.rows.push_back(std::move(out));
  }
  return table;
}

}  // namespace sparsemob

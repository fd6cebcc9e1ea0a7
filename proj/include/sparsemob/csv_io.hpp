#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sparsemob/trajectory.hpp"

namespace sparsemob {

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

/// Comma-separated rows with double-quote escaping (quoted fields may span
/// lines). Blank lines and lines starting with '#' are skipped.
std::vector<CsvRow> parse_csv(std::istream& in);

// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(std::string_view value);

/// "+08:00", "-0530", "+8", "Z" or "UTC" to seconds east of UTC.
Seconds parse_utc_offset(std::string_view text);

/// Epoch seconds (a fractional part is truncated), ISO-8601
/// (YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+HH:MM]) or HH:MM:SS/MM/DD/YYYY.
/// Zone-less calendar forms are read in `utc_offset`. Throws DataError.
Seconds parse_timestamp(std::string_view text, Seconds utc_offset);

struct IngestOptions {
  bool strict = false;
  Seconds utc_offset = 8 * 3600;
};

struct Dataset {
  std::vector<Trajectory> trajectories;          // ordered by device id
  std::vector<std::vector<MobilityLabel>> labels;  // parallel to trajectories when labeled
  bool labeled = false;
  std::vector<std::string> diagnostics;
  std::size_t rejected_rows = 0;
};

/// Reads records with header columns time, lon, lat, mid (any order) and an
/// optional label column (S/T/U). Rows failing to parse and duplicate
/// (mid, time) pairs are reported with their line number; in strict mode any
/// such row raises DataError, otherwise bad rows are dropped and the first of
/// a duplicate pair is kept.
Dataset ingest(std::istream& in, const IngestOptions& options = {});
Dataset ingest_file(const std::string& path, const IngestOptions& options = {});

/// time,lon,lat,mid[,label] with coordinates printed to round-trip exactly.
void write_dataset(std::ostream& out, const std::vector<Trajectory>& trajectories,
                   const std::vector<std::vector<MobilityLabel>>* labels = nullptr);

// mid,time,label
void write_labels(std::ostream& out, const std::vector<Trajectory>& trajectories,
                  const std::vector<std::vector<MobilityLabel>>& labels);

struct LabelTable {
  struct Row {
    std::size_t line = 0;
    std::string mid;
    Seconds time = 0;
    MobilityLabel label = MobilityLabel::Unlabeled;
  };
  std::vector<Row> rows;
};

// Reads mid,time,label (columns in any order). Throws DataError.
LabelTable read_labels(std::istream& in);

}  // namespace sparsemob

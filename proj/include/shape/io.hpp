#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "shape/trajectory.hpp"

namespace shape {

// One JSONL line -> record. Throws ParseError (line number attached) on
// malformed JSON or wrongly typed fields. Field-level invariants (binary
// outcome, grid membership) are left to validate().
TrajectoryRecord parse_record(std::string_view line, std::size_t line_number = 1);
std::string serialize_record(const TrajectoryRecord& record);

struct SkippedLine {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  std::vector<TrajectoryRecord> records;
  std::vector<SkippedLine> skipped;
};

// Streams a JSONL file. Blank lines are ignored. With strict = true the first
// malformed line throws; otherwise it is recorded in `skipped`.
LoadResult read_jsonl(std::istream& in, bool strict);
LoadResult read_jsonl_file(const std::string& path, bool strict);

std::string serialize_sheet(const AdvantageSheet& sheet);

// Writes through a sibling temp file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& writer);

// RFC-4180 quoting of one CSV field.
std::string csv_field(std::string_view text);
// Shortest round-trippable decimal form of a double.
std::string format_double(double value);

}  // namespace shape

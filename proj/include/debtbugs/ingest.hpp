#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "debtbugs/features.hpp"
#include "debtbugs/model.hpp"

namespace debtbugs {

struct RepositorySnapshot {
  std::map<BugId, BugRecord> bugs;
  std::string source_description;
  Timestamp ingest_timestamp{};
};

enum class MalformedPolicy { Skip, Abort };

struct IngestConfig {
  MalformedPolicy on_malformed = MalformedPolicy::Abort;
  /// Extra status spellings accepted at ingest (e.g. "FIXED" -> RESOLVED).
  /// Anything neither canonical nor listed here makes the line malformed.
  std::map<std::string, Status> status_aliases;
  std::string source_description;
};

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t lines_read = 0;
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::vector<LineIssue> issues;  // ordered by line number
};

struct IngestResult {
  RepositorySnapshot snapshot;
  IngestReport report;
};

/// Reads bug JSON-lines. Blank lines are ignored. Throws ParseError under the
/// abort policy and DuplicateIdError whenever two lines share a bug_id.
IngestResult parse_bug_stream(std::istream& input, const IngestConfig& config = {});

/// One canonical line per bug, ascending bug_id. Returns the line count.
std::size_t write_snapshot(const RepositorySnapshot& snapshot, std::ostream& output);

std::string bug_to_json_line(const BugRecord& bug);
BugRecord bug_from_json_line(const std::string& line, const IngestConfig& config = {});

/// Column names of the feature CSV, in order.
extern const std::array<std::string_view, 13> kFeatureCsvHeader;

/// Sorted by (product, version). Throws ContractError on empty input.
std::size_t write_feature_table(std::vector<ProductAttributes> rows, std::ostream& output);
std::vector<ProductAttributes> read_feature_table(std::istream& input);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace debtbugs

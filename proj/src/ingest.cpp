#include "debtbugs/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "debtbugs/error.hpp"
#include "json.hpp"

namespace debtbugs {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::array<std::string_view, 13> kFeatureCsvHeader = {
    "product",     "version",      "n_bugs",      "tag_count",   "tag_freq",
    "tag_time",    "reopen_count", "reopen_freq", "reopen_time", "dup_count",
    "dup_freq",    "dup_time",     "avg_fix_time"};

namespace {

// Thrown while decoding one line; converted to a ParseError with line number.
struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FieldError(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) throw FieldError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> get_optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw FieldError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::int64_t get_int(const json& v, const char* key) {
  if (!v.is_number_integer()) {
    throw FieldError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

Timestamp get_timestamp(const json& v, const char* key) {
  if (!v.is_string()) throw FieldError(std::string("field '") + key + "' must be a timestamp");
  auto ts = parse_timestamp(v.get<std::string>());
  if (!ts) {
    throw FieldError(std::string("field '") + key + "' is not ISO-8601 with a UTC offset: " +
                     v.get<std::string>());
  }
  return *ts;
}

Status get_status(const json& v, const IngestConfig& config) {
  if (!v.is_string()) throw FieldError("status must be a string");
  auto text = v.get<std::string>();
  if (auto s = status_from_string(text)) return *s;
  if (auto it = config.status_aliases.find(text); it != config.status_aliases.end()) {
    return it->second;
  }
  throw FieldError("unknown status '" + text + "'");
}

json optional_to_json(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

void write_text(std::ostream& output, const std::string& text) {
  output << text;
  if (!output) throw IoError("write failed");
}

}  // namespace

BugRecord bug_from_json_line(const std::string& line, const IngestConfig& config) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FieldError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw FieldError("line is not a JSON object");

  BugRecord bug;
  bug.bug_id = get_int(require(obj, "bug_id"), "bug_id");
  bug.product.name = get_string(obj, "product");
  bug.product.version = get_string(obj, "version");
  bug.summary = get_string(obj, "summary");
  if (const auto& a = require(obj, "assigned_date"); !a.is_null()) {
    bug.assigned_date = get_timestamp(a, "assigned_date");
  }
  bug.last_change_date = get_timestamp(require(obj, "last_change_date"), "last_change_date");
  if (const auto& d = require(obj, "duplicate_of"); !d.is_null()) {
    bug.duplicate_of = get_int(d, "duplicate_of");
  }

  const auto& history = require(obj, "status_history");
  if (!history.is_array()) throw FieldError("field 'status_history' must be an array");
  for (const auto& ev : history) {
    if (!ev.is_object()) throw FieldError("status_history entries must be objects");
    StatusEvent event;
    event.ts = get_timestamp(require(ev, "ts"), "ts");
    event.status = get_status(require(ev, "status"), config);
    event.actor = get_optional_string(ev, "actor");
    bug.status_history.push_back(std::move(event));
  }

  const auto& comments = require(obj, "comments");
  if (!comments.is_array()) throw FieldError("field 'comments' must be an array");
  for (const auto& c : comments) {
    if (!c.is_object()) throw FieldError("comments entries must be objects");
    Comment comment;
    auto index = get_int(require(c, "index"), "index");
    if (index < 0 || index > std::numeric_limits<int>::max()) {
      throw FieldError("comment index out of range");
    }
    comment.index = static_cast<int>(index);
    comment.ts = get_timestamp(require(c, "ts"), "ts");
    comment.author = get_optional_string(c, "author");
    comment.body = get_string(c, "body");
    bug.comments.push_back(std::move(comment));
  }

  if (auto violations = validate_record(bug); !violations.empty()) {
    std::string msg = "invalid record";
    for (const auto& v : violations) msg += "; " + v;
    throw FieldError(msg);
  }
  return bug;
}

std::string bug_to_json_line(const BugRecord& bug) {
  ordered_json obj;
  obj["bug_id"] = bug.bug_id;
  obj["product"] = bug.product.name;
  obj["version"] = bug.product.version;
  obj["summary"] = bug.summary;
  obj["assigned_date"] =
      bug.assigned_date ? ordered_json(format_timestamp(*bug.assigned_date)) : ordered_json();
  obj["last_change_date"] = format_timestamp(bug.last_change_date);
  obj["duplicate_of"] = bug.duplicate_of ? ordered_json(*bug.duplicate_of) : ordered_json();
  auto history = ordered_json::array();
  for (const auto& ev : bug.status_history) {
    ordered_json e;
    e["ts"] = format_timestamp(ev.ts);
    e["status"] = std::string(to_string(ev.status));
    e["actor"] = optional_to_json(ev.actor);
    history.push_back(std::move(e));
  }
  obj["status_history"] = std::move(history);
  auto comments = ordered_json::array();
  for (const auto& c : bug.comments) {
    ordered_json e;
    e["index"] = c.index;
    e["ts"] = format_timestamp(c.ts);
    e["author"] = optional_to_json(c.author);
    e["body"] = c.body;
    comments.push_back(std::move(e));
  }
  obj["comments"] = std::move(comments);
  return obj.dump();
}

IngestResult parse_bug_stream(std::istream& input, const IngestConfig& config) {
  IngestResult result;
  result.snapshot.source_description = config.source_description;
  result.snapshot.ingest_timestamp =
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());

  std::map<BugId, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++result.report.lines_read;
    BugRecord bug;
    try {
      bug = bug_from_json_line(line, config);
    } catch (const FieldError& e) {
      if (config.on_malformed == MalformedPolicy::Abort) throw ParseError(line_no, e.what());
      result.report.issues.push_back({line_no, e.what()});
      ++result.report.skipped;
      continue;
    }
    auto [it, inserted] = first_line.emplace(bug.bug_id, line_no);
    if (!inserted) throw DuplicateIdError(bug.bug_id, it->second, line_no);
    result.snapshot.bugs.emplace(bug.bug_id, std::move(bug));
    ++result.report.accepted;
  }
  if (input.bad()) throw IoError("read failed");
  return result;
}

std::size_t write_snapshot(const RepositorySnapshot& snapshot, std::ostream& output) {
  std::size_t lines = 0;
  for (const auto& [id, bug] : snapshot.bugs) {
    write_text(output, bug_to_json_line(bug) + '\n');
    ++lines;
  }
  return lines;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quote");
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError(line_no, "not a number: '" + text + "'");
  }
  return value;
}

std::int64_t parse_count(const std::string& text, std::size_t line_no) {
  std::int64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || value < 0) {
    throw ParseError(line_no, "not a non-negative integer: '" + text + "'");
  }
  return value;
}

}  // namespace

std::size_t write_feature_table(std::vector<ProductAttributes> rows, std::ostream& output) {
  if (rows.empty()) throw ContractError("feature table needs at least one row");
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.key < b.key; });
  std::string text;
  for (std::size_t i = 0; i < kFeatureCsvHeader.size(); ++i) {
    if (i) text += ',';
    text += kFeatureCsvHeader[i];
  }
  text += '\n';
  for (const auto& row : rows) {
    text += csv_field(row.key.name) + ',' + csv_field(row.key.version) + ',' +
            std::to_string(row.n_bugs);
    for (auto t : kDebtTypes) {
      const auto& a = row[t];
      text += ',' + std::to_string(a.count) + ',' + format_double(a.frequency) + ',' +
              format_double(a.time);
    }
    text += ',' + format_double(row.avg_fix_time) + '\n';
  }
  write_text(output, text);
  return rows.size();
}

std::vector<ProductAttributes> read_feature_table(std::istream& input) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<ProductAttributes> rows;
  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (!header_seen) {
      if (fields.size() != kFeatureCsvHeader.size() ||
          !std::equal(fields.begin(), fields.end(), kFeatureCsvHeader.begin())) {
        throw ParseError(line_no, "unexpected feature table header");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kFeatureCsvHeader.size()) {
      throw ParseError(line_no, "expected " + std::to_string(kFeatureCsvHeader.size()) +
                                    " columns, got " + std::to_string(fields.size()));
    }
    ProductAttributes row;
    row.key = {fields[0], fields[1]};
    if (row.key.name.empty()) throw ParseError(line_no, "empty product name");
    row.n_bugs = parse_count(fields[2], line_no);
    std::size_t col = 3;
    for (auto t : kDebtTypes) {
      row[t].count = parse_count(fields[col++], line_no);
      row[t].frequency = parse_double(fields[col++], line_no);
      row[t].time = parse_double(fields[col++], line_no);
    }
    row.avg_fix_time = parse_double(fields[col], line_no);
    rows.push_back(std::move(row));
  }
  if (input.bad()) throw IoError("read failed");
  if (!header_seen) throw ParseError(line_no, "missing feature table header");
  return rows;
}

}  // namespace debtbugs

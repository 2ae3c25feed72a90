#include "debtbugs/model.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

namespace debtbugs {

namespace {

constexpr std::array<std::string_view, 6> kStatusNames = {"NEW",      "ASSIGNED", "RESOLVED",
                                                          "REOPENED", "VERIFIED", "CLOSED"};
constexpr std::array<std::string_view, 3> kDebtTypeNames = {"tag", "reopened", "duplicate"};

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  auto res = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return res.ec == std::errc{};
}

}  // namespace

std::string_view to_string(Status status) { return kStatusNames[static_cast<int>(status)]; }

std::optional<Status> status_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == text) return static_cast<Status>(i);
  }
  return std::nullopt;
}

std::string_view to_string(DebtType type) { return kDebtTypeNames[static_cast<int>(type)]; }

std::optional<DebtType> debt_type_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kDebtTypeNames.size(); ++i) {
    if (kDebtTypeNames[i] == text) return static_cast<DebtType>(i);
  }
  return std::nullopt;
}

std::vector<std::string> validate_record(const BugRecord& record) {
  std::vector<std::string> violations;
  if (record.bug_id <= 0) violations.emplace_back("bug_id: must be a positive integer");
  if (record.product.name.empty()) violations.emplace_back("product: name must be non-empty");
  if (record.duplicate_of && *record.duplicate_of == record.bug_id) {
    violations.emplace_back("duplicate_of: self-duplicate (equals bug_id)");
  }
  if (record.assigned_date && record.last_change_date < *record.assigned_date) {
    violations.emplace_back("last_change_date: date ordering (earlier than assigned_date)");
  }
  for (std::size_t i = 1; i < record.status_history.size(); ++i) {
    if (record.status_history[i].ts < record.status_history[i - 1].ts) {
      violations.emplace_back("status_history: timestamps must be non-decreasing (event " +
                              std::to_string(i) + ")");
      break;
    }
  }
  std::set<int> indices;
  bool bad_index = false;
  for (const auto& c : record.comments) {
    if (c.index < 0 || !indices.insert(c.index).second) bad_index = true;
  }
  if (!bad_index && !indices.empty() &&
      *indices.rbegin() != static_cast<int>(indices.size()) - 1) {
    bad_index = true;
  }
  if (bad_index) violations.emplace_back("comments: indices must be unique and dense from 0");
  return violations;
}

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM:SS with optional fractional seconds
// (dropped), followed by Z or +HH:MM / -HH:MM. A bare date is midnight UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_int(text, 5, 2, mo) || text[7] != '-' || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::size_t pos = 10;
  int offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    if (!read_int(text, pos + 1, 2, h) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, mi) || pos + 6 >= text.size() || text[pos + 6] != ':' ||
        !read_int(text, pos + 7, 2, s)) {
      return std::nullopt;
    }
    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos >= text.size()) return std::nullopt;  // offset is mandatory
    if (text[pos] == 'Z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      int oh = 0, om = 0;
      if (!read_int(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
          !read_int(text, pos + 4, 2, om)) {
        return std::nullopt;
      }
      offset_minutes = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
      pos += 6;
    } else {
      return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
  }
  auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return Timestamp{local - minutes{offset_minutes}};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  auto day_start = floor<days>(ts);
  year_month_day ymd{day_start};
  hh_mm_ss hms{ts - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace debtbugs

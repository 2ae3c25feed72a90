#pragma once

// Core bug-tracker domain types shared by every pipeline stage.

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace debtbugs {

using BugId = std::int64_t;
using Timestamp = std::chrono::sys_seconds;

/// A product is identified by its name together with its version.
struct ProductKey {
  std::string name;
  std::string version = "trunk";

  auto operator<=>(const ProductKey&) const = default;
  bool operator==(const ProductKey&) const = default;
};

enum class Status { New, Assigned, Resolved, Reopened, Verified, Closed };

std::string_view to_string(Status status);
std::optional<Status> status_from_string(std::string_view text);

struct StatusEvent {
  Timestamp ts;
  Status status = Status::New;
  std::optional<std::string> actor;

  bool operator==(const StatusEvent&) const = default;
};

struct Comment {
  int index = 0;
  Timestamp ts;
  std::optional<std::string> author;
  std::string body;

  bool operator==(const Comment&) const = default;
};

struct BugRecord {
  BugId bug_id = 0;
  ProductKey product;
  std::string summary;
  std::vector<StatusEvent> status_history;
  std::vector<Comment> comments;
  std::optional<Timestamp> assigned_date;
  Timestamp last_change_date;
  std::optional<BugId> duplicate_of;

  bool operator==(const BugRecord&) const = default;
};

/// Checks the per-record invariants. Returns one message per broken rule,
/// each naming the offending field; empty when the record is well formed.
std::vector<std::string> validate_record(const BugRecord& record);

enum class DebtType { Tag = 0, Reopened = 1, Duplicate = 2 };

inline constexpr std::array<DebtType, 3> kDebtTypes = {DebtType::Tag, DebtType::Reopened,
                                                      DebtType::Duplicate};

std::string_view to_string(DebtType type);
std::optional<DebtType> debt_type_from_string(std::string_view text);

/// Small bitset over DebtType.
class DebtTypes {
 public:
  constexpr DebtTypes() = default;

  constexpr bool contains(DebtType t) const { return (bits_ >> static_cast<int>(t)) & 1U; }
  constexpr void insert(DebtType t) { bits_ |= 1U << static_cast<int>(t); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return ((bits_ >> 0) & 1U) + ((bits_ >> 1) & 1U) + ((bits_ >> 2) & 1U);
  }

  bool operator==(const DebtTypes&) const = default;

 private:
  unsigned bits_ = 0;
};

struct TagHit {
  /// -1 for a manual (allowlisted) hit with no backing comment.
  int comment_index = 0;
  std::string keyword;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool manual = false;

  bool operator==(const TagHit&) const = default;
};

struct DebtMark {
  BugId bug_id = 0;
  DebtTypes types;
  std::vector<TagHit> tag_hits;
  int reopen_count = 0;
  std::optional<BugId> master_id;

  bool operator==(const DebtMark&) const = default;
};

// Timestamps are exchanged as ISO-8601 with an explicit UTC offset and
// normalized to UTC on read.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

inline std::chrono::sys_days utc_day(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts);
}

}  // namespace debtbugs

#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "debtbugs/ingest.hpp"
#include "debtbugs/model.hpp"

namespace fixture {

using namespace debtbugs;

inline Timestamp ts(const std::string& text) { return *parse_timestamp(text); }

struct BugSpec {
  BugId id = 1;
  std::string product = "Core";
  std::string version = "trunk";
  std::optional<std::string> assigned = "2010-01-01T09:00:00Z";
  std::string last_change = "2010-01-11T17:30:00Z";
  std::vector<std::string> comments;
  std::vector<Status> statuses = {Status::New, Status::Assigned, Status::Resolved};
  std::optional<BugId> duplicate_of;
};

inline BugRecord bug(const BugSpec& spec) {
  BugRecord b;
  b.bug_id = spec.id;
  b.product = {spec.product, spec.version};
  b.summary = "bug " + std::to_string(spec.id);
  if (spec.assigned) b.assigned_date = ts(*spec.assigned);
  b.last_change_date = ts(spec.last_change);
  b.duplicate_of = spec.duplicate_of;
  const auto start = b.assigned_date.value_or(b.last_change_date);
  for (std::size_t i = 0; i < spec.statuses.size(); ++i) {
    b.status_history.push_back({start + std::chrono::seconds(static_cast<long>(i)),
                                spec.statuses[i], "dev@example.org"});
  }
  for (std::size_t i = 0; i < spec.comments.size(); ++i) {
    b.comments.push_back({static_cast<int>(i), start + std::chrono::seconds(static_cast<long>(i)),
                          std::nullopt, spec.comments[i]});
  }
  return b;
}

inline RepositorySnapshot snapshot(std::initializer_list<BugRecord> bugs) {
  RepositorySnapshot s;
  for (const auto& b : bugs) s.bugs.emplace(b.bug_id, b);
  return s;
}

}  // namespace fixture

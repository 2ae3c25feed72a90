#pragma once

// Classification of bugs into tag, reopened and duplicate debt.

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "debtbugs/model.hpp"

namespace debtbugs {

struct RepositorySnapshot;

struct TagRuleSet {
  std::vector<std::string> keywords = {"TODO", "FIXME", "XXX"};
  bool case_sensitive = true;
  /// Reviewed overrides: allowlisted bugs are tag bugs even without a textual
  /// hit, denylisted bugs never are.
  std::set<BugId> allowlist;
  std::set<BugId> denylist;

  /// Throws ContractError if keywords are empty or the lists intersect.
  void validate() const;
};

struct DuplicateClusters {
  std::map<BugId, BugId> master_of;
  std::map<BugId, std::set<BugId>> clusters;
  /// Masters that are referenced but absent from the snapshot.
  std::set<BugId> dangling_masters;
};

/// Whole-token keyword hits in comment bodies, ordered by (comment, offset).
/// A token boundary is any character outside [A-Za-z0-9_] or the text edge.
std::vector<TagHit> scan_tags(const BugRecord& bug, const TagRuleSet& rules);

int detect_reopened(const BugRecord& bug);

/// Follows duplicate_of chains to their terminal bug. Throws CycleError.
DuplicateClusters resolve_duplicate_masters(const RepositorySnapshot& snapshot);

std::map<BugId, DebtMark> classify_debt(const RepositorySnapshot& snapshot,
                                        const TagRuleSet& rules = {});

/// Rebuilds clusters from the master ids recorded in a set of marks.
DuplicateClusters clusters_from_marks(const std::map<BugId, DebtMark>& marks);

// Debt report: one JSON object per bug, ascending bug_id.
std::size_t write_debt_report(const std::map<BugId, DebtMark>& marks, std::ostream& output);
std::map<BugId, DebtMark> read_debt_report(std::istream& input);

std::string debt_mark_to_json_line(const DebtMark& mark);

}  // namespace debtbugs

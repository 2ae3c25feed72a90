#include "debtbugs/identify.hpp"

#include <algorithm>
#include <cctype>

#include "debtbugs/error.hpp"
#include "debtbugs/ingest.hpp"
#include "json.hpp"

namespace debtbugs {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

char fold(char c, bool case_sensitive) {
  return case_sensitive ? c : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool matches_at(std::string_view text, std::size_t pos, std::string_view keyword,
                bool case_sensitive) {
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    if (fold(text[pos + i], case_sensitive) != fold(keyword[i], case_sensitive)) return false;
  }
  return true;
}

}  // namespace

void TagRuleSet::validate() const {
  if (keywords.empty()) throw ContractError("tag rule set needs at least one keyword");
  for (const auto& k : keywords) {
    if (k.empty()) throw ContractError("tag keywords must be non-empty");
  }
  for (auto id : allowlist) {
    if (denylist.count(id)) {
      throw ContractError("bug " + std::to_string(id) + " is both allowlisted and denylisted");
    }
  }
}

std::vector<TagHit> scan_tags(const BugRecord& bug, const TagRuleSet& rules) {
  std::vector<TagHit> hits;
  if (rules.denylist.count(bug.bug_id)) return hits;

  for (const auto& comment : bug.comments) {
    std::string_view body = comment.body;
    for (const auto& keyword : rules.keywords) {
      if (keyword.empty() || keyword.size() > body.size()) continue;
      for (std::size_t pos = 0; pos + keyword.size() <= body.size(); ++pos) {
        if (pos > 0 && is_word_char(body[pos - 1])) continue;
        std::size_t end = pos + keyword.size();
        if (end < body.size() && is_word_char(body[end])) continue;
        if (!matches_at(body, pos, keyword, rules.case_sensitive)) continue;
        hits.push_back({comment.index, keyword, pos, end, false});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const TagHit& a, const TagHit& b) {
    return std::tie(a.comment_index, a.begin, a.keyword) <
           std::tie(b.comment_index, b.begin, b.keyword);
  });
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());

  if (hits.empty() && rules.allowlist.count(bug.bug_id)) {
    hits.push_back({-1, "MANUAL", 0, 0, true});
  }
  return hits;
}

int detect_reopened(const BugRecord& bug) {
  return static_cast<int>(
      std::count_if(bug.status_history.begin(), bug.status_history.end(),
                    [](const StatusEvent& e) { return e.status == Status::Reopened; }));
}

DuplicateClusters resolve_duplicate_masters(const RepositorySnapshot& snapshot) {
  DuplicateClusters result;
  const auto& bugs = snapshot.bugs;

  auto next_of = [&](BugId id) -> std::optional<BugId> {
    auto it = bugs.find(id);
    if (it == bugs.end()) return std::nullopt;
    return it->second.duplicate_of;
  };

  std::map<BugId, BugId> resolved;  // memoized master for every visited linked bug
  std::vector<BugId> path;
  for (const auto& [start, bug] : bugs) {
    if (!bug.duplicate_of || resolved.count(start)) continue;

    path.clear();
    std::map<BugId, std::size_t> on_path;
    BugId current = start;
    BugId master = start;
    while (true) {
      if (auto it = resolved.find(current); it != resolved.end()) {
        master = it->second;
        break;
      }
      auto next = next_of(current);
      if (!next) {
        master = current;
        if (!bugs.count(current)) result.dangling_masters.insert(current);
        break;
      }
      if (auto it = on_path.find(current); it != on_path.end()) {
        std::vector<BugId> cycle(path.begin() + static_cast<std::ptrdiff_t>(it->second),
                                 path.end());
        throw CycleError(std::move(cycle));
      }
      on_path.emplace(current, path.size());
      path.push_back(current);
      current = *next;
    }
    for (auto id : path) resolved.emplace(id, master);
  }

  for (const auto& [dup, master] : resolved) {
    result.master_of.emplace(dup, master);
    result.clusters[master].insert(dup);
  }
  return result;
}

std::map<BugId, DebtMark> classify_debt(const RepositorySnapshot& snapshot,
                                        const TagRuleSet& rules) {
  rules.validate();
  auto clusters = resolve_duplicate_masters(snapshot);

  std::map<BugId, DebtMark> marks;
  for (const auto& [id, bug] : snapshot.bugs) {
    DebtMark mark;
    mark.bug_id = id;
    mark.tag_hits = scan_tags(bug, rules);
    if (!mark.tag_hits.empty()) mark.types.insert(DebtType::Tag);
    mark.reopen_count = detect_reopened(bug);
    if (mark.reopen_count > 0) mark.types.insert(DebtType::Reopened);
    if (auto it = clusters.master_of.find(id); it != clusters.master_of.end()) {
      mark.master_id = it->second;
      mark.types.insert(DebtType::Duplicate);
    }
    marks.emplace(id, std::move(mark));
  }
  return marks;
}

DuplicateClusters clusters_from_marks(const std::map<BugId, DebtMark>& marks) {
  DuplicateClusters result;
  for (const auto& [id, mark] : marks) {
    if (!mark.master_id) continue;
    result.master_of.emplace(id, *mark.master_id);
    result.clusters[*mark.master_id].insert(id);
    if (!marks.count(*mark.master_id)) result.dangling_masters.insert(*mark.master_id);
  }
  return result;
}

std::string debt_mark_to_json_line(const DebtMark& mark) {
  ordered_json obj;
  obj["bug_id"] = mark.bug_id;
  auto types = ordered_json::array();
  for (auto t : kDebtTypes) {
    if (mark.types.contains(t)) types.push_back(std::string(to_string(t)));
  }
  obj["types"] = std::move(types);
  obj["reopen_count"] = mark.reopen_count;
  obj["master_id"] = mark.master_id ? ordered_json(*mark.master_id) : ordered_json();
  auto hits = ordered_json::array();
  for (const auto& h : mark.tag_hits) {
    ordered_json e;
    e["comment"] = h.comment_index;
    e["keyword"] = h.keyword;
    e["begin"] = h.begin;
    e["end"] = h.end;
    e["manual"] = h.manual;
    hits.push_back(std::move(e));
  }
  obj["tag_hits"] = std::move(hits);
  return obj.dump();
}

std::size_t write_debt_report(const std::map<BugId, DebtMark>& marks, std::ostream& output) {
  for (const auto& [id, mark] : marks) output << debt_mark_to_json_line(mark) << '\n';
  if (!output) throw IoError("write failed");
  return marks.size();
}

std::map<BugId, DebtMark> read_debt_report(std::istream& input) {
  std::map<BugId, DebtMark> marks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    DebtMark mark;
    try {
      auto obj = json::parse(line);
      mark.bug_id = obj.at("bug_id").get<BugId>();
      for (const auto& t : obj.at("types")) {
        auto type = debt_type_from_string(t.get<std::string>());
        if (!type) throw ParseError(line_no, "unknown debt type " + t.dump());
        mark.types.insert(*type);
      }
      mark.reopen_count = obj.at("reopen_count").get<int>();
      if (!obj.at("master_id").is_null()) mark.master_id = obj.at("master_id").get<BugId>();
      for (const auto& h : obj.at("tag_hits")) {
        mark.tag_hits.push_back({h.at("comment").get<int>(), h.at("keyword").get<std::string>(),
                                 h.at("begin").get<std::size_t>(), h.at("end").get<std::size_t>(),
                                 h.at("manual").get<bool>()});
      }
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed debt record: ") + e.what());
    }
    if (mark.types.contains(DebtType::Tag) != !mark.tag_hits.empty() ||
        mark.types.contains(DebtType::Reopened) != (mark.reopen_count > 0) ||
        mark.types.contains(DebtType::Duplicate) !=
            (mark.master_id && *mark.master_id != mark.bug_id)) {
      throw ParseError(line_no, "debt record types disagree with its evidence");
    }
    if (!marks.emplace(mark.bug_id, std::move(mark)).second) {
      throw ParseError(line_no, "bug_id repeated in debt report");
    }
  }
  if (input.bad()) throw IoError("read failed");
  return marks;
}

}  // namespace debtbugs

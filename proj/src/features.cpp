#include "debtbugs/features.hpp"

#include <algorithm>
#include <set>

#include "debtbugs/error.hpp"
#include "debtbugs/ingest.hpp"
#include "json.hpp"

namespace debtbugs {

std::array<double, kNumAttributes> ProductAttributes::features() const {
  std::array<double, kNumAttributes> out{};
  std::size_t i = 0;
  for (auto t : kDebtTypes) {
    const auto& a = (*this)[t];
    out[i++] = static_cast<double>(a.count);
    out[i++] = a.frequency;
    out[i++] = a.time;
  }
  return out;
}

std::optional<std::int64_t> fix_time_days(const BugRecord& bug) {
  if (!bug.assigned_date) return std::nullopt;
  return (utc_day(bug.last_change_date) - utc_day(*bug.assigned_date)).count();
}

double type_frequency(BugId bug_id, const std::map<BugId, DebtMark>& marks,
                      const DuplicateClusters& clusters, DebtType t,
                      const FeatureOptions& options) {
  auto it = marks.find(bug_id);
  if (it == marks.end() || !it->second.types.contains(t)) {
    throw ContractError("bug " + std::to_string(bug_id) + " does not carry debt type " +
                        std::string(to_string(t)));
  }
  const auto& mark = it->second;
  switch (t) {
    case DebtType::Tag:
      return static_cast<double>(mark.tag_hits.size());
    case DebtType::Reopened:
      return static_cast<double>(mark.reopen_count);
    case DebtType::Duplicate: {
      auto cluster = clusters.clusters.find(*mark.master_id);
      if (cluster == clusters.clusters.end() || !cluster->second.count(bug_id)) {
        throw ContractError("bug " + std::to_string(bug_id) + " missing from duplicate cluster " +
                            std::to_string(*mark.master_id));
      }
      auto size = static_cast<double>(cluster->second.size());
      return options.include_master_in_freq ? size + 1.0 : size;
    }
  }
  return 0.0;
}

ProductAttributes aggregate_product(const RepositorySnapshot& snapshot,
                                    const std::map<BugId, DebtMark>& marks,
                                    const DuplicateClusters& clusters, const ProductKey& key,
                                    const FeatureOptions& options) {
  ProductAttributes row;
  row.key = key;

  struct Accum {
    double freq_sum = 0.0;
    double time_sum = 0.0;
    std::int64_t timed = 0;
  };
  std::array<Accum, 3> acc{};
  double total_time = 0.0;
  std::int64_t total_timed = 0;

  for (const auto& [id, bug] : snapshot.bugs) {
    if (bug.product != key) continue;
    ++row.n_bugs;
    auto days = fix_time_days(bug);
    if (days) {
      total_time += static_cast<double>(*days);
      ++total_timed;
    }
    auto mark = marks.find(id);
    if (mark == marks.end()) throw DataError("no debt mark for bug " + std::to_string(id));
    for (auto t : kDebtTypes) {
      if (!mark->second.types.contains(t)) continue;
      auto& a = acc[static_cast<int>(t)];
      ++row[t].count;
      a.freq_sum += type_frequency(id, marks, clusters, t, options);
      if (days) {
        a.time_sum += static_cast<double>(*days);
        ++a.timed;
      }
    }
  }
  if (row.n_bugs == 0) {
    throw DataError("product " + key.name + " " + key.version + " has no bugs");
  }

  for (auto t : kDebtTypes) {
    const auto& a = acc[static_cast<int>(t)];
    auto& out = row[t];
    if (out.count > 0) {
      auto denom = options.frequency_denominator == FrequencyDenominator::TypeBugs ? out.count
                                                                                   : row.n_bugs;
      out.frequency = a.freq_sum / static_cast<double>(denom);
    }
    if (a.timed > 0) out.time = a.time_sum / static_cast<double>(a.timed);
  }
  if (total_timed > 0) row.avg_fix_time = total_time / static_cast<double>(total_timed);
  return row;
}

std::vector<ProductAttributes> aggregate_all(const RepositorySnapshot& snapshot,
                                             const std::map<BugId, DebtMark>& marks,
                                             const DuplicateClusters& clusters,
                                             const FeatureOptions& options) {
  std::set<ProductKey> keys;
  for (const auto& [id, bug] : snapshot.bugs) keys.insert(bug.product);
  std::vector<ProductAttributes> rows;
  rows.reserve(keys.size());
  for (const auto& key : keys) {
    rows.push_back(aggregate_product(snapshot, marks, clusters, key, options));
  }
  return rows;
}

std::vector<ProductAttributes> filter_products(std::vector<ProductAttributes> rows,
                                               std::int64_t min_bugs) {
  std::erase_if(rows, [min_bugs](const ProductAttributes& r) { return r.n_bugs < min_bugs; });
  return rows;
}

RepositorySummary summarize_repository(const std::vector<ProductAttributes>& rows) {
  if (rows.empty()) throw ContractError("summary needs at least one product");
  RepositorySummary s;
  s.bands = {{0, 100, 0}, {100, 500, 0}, {500, 1000, 0}, {1000, 5000, 0}, {5000, std::nullopt, 0}};
  for (const auto& row : rows) {
    for (auto& band : s.bands) {
      if (row.n_bugs >= band.lower && (!band.upper || row.n_bugs < *band.upper)) {
        ++band.products;
        break;
      }
    }
    ++s.products;
    s.bugs += row.n_bugs;
    for (auto t : kDebtTypes) s.debt_bugs[static_cast<int>(t)] += row[t].count;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    s.ratios[i] = s.bugs > 0 ? static_cast<double>(s.debt_bugs[i]) / static_cast<double>(s.bugs)
                             : 0.0;
  }
  return s;
}

std::string summary_to_json(const RepositorySummary& summary) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json out;
  auto bands = ordered_json::array();
  for (const auto& b : summary.bands) {
    ordered_json band;
    band["lower"] = b.lower;
    band["upper"] = b.upper ? ordered_json(*b.upper) : ordered_json();
    band["products"] = b.products;
    band["share"] = summary.products > 0 ? static_cast<double>(b.products) /
                                               static_cast<double>(summary.products)
                                         : 0.0;
    bands.push_back(std::move(band));
  }
  out["bands"] = std::move(bands);
  ordered_json totals;
  totals["products"] = summary.products;
  totals["bugs"] = summary.bugs;
  ordered_json ratios;
  for (auto t : kDebtTypes) {
    totals[std::string(to_string(t))] = summary.debt_bugs[static_cast<int>(t)];
    ratios[std::string(to_string(t))] = summary.ratios[static_cast<int>(t)];
  }
  out["totals"] = std::move(totals);
  out["ratios"] = std::move(ratios);
  return out.dump(2) + '\n';
}

}  // namespace debtbugs

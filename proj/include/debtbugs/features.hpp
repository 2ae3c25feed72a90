#pragma once

// Per-product debt attributes and the average fix time target.

#include <array>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "debtbugs/identify.hpp"
#include "debtbugs/model.hpp"

namespace debtbugs {

struct RepositorySnapshot;

inline constexpr std::size_t kNumAttributes = 9;

/// Attribute names in feature-table column order.
inline constexpr std::array<std::string_view, kNumAttributes> kAttributeNames = {
    "tag_count",    "tag_freq",    "tag_time",  "reopen_count", "reopen_freq",
    "reopen_time",  "dup_count",   "dup_freq",  "dup_time"};

struct TypeAttributes {
  std::int64_t count = 0;
  double frequency = 0.0;
  double time = 0.0;

  bool operator==(const TypeAttributes&) const = default;
};

struct ProductAttributes {
  ProductKey key;
  std::int64_t n_bugs = 0;
  std::array<TypeAttributes, 3> per_type{};
  double avg_fix_time = 0.0;

  const TypeAttributes& operator[](DebtType t) const { return per_type[static_cast<int>(t)]; }
  TypeAttributes& operator[](DebtType t) { return per_type[static_cast<int>(t)]; }

  /// The nine attributes in column order.
  std::array<double, kNumAttributes> features() const;

  bool operator==(const ProductAttributes&) const = default;
};

enum class FrequencyDenominator {
  TypeBugs,  // mean over the bugs carrying the type
  AllBugs,   // sum over typed bugs divided by every bug in the product
};

struct FeatureOptions {
  bool include_master_in_freq = false;
  FrequencyDenominator frequency_denominator = FrequencyDenominator::TypeBugs;
};

/// Whole UTC days from assignment to the last change; empty when unassigned.
std::optional<std::int64_t> fix_time_days(const BugRecord& bug);

/// Per-bug multiplicity of debt type `t`. Throws ContractError when the bug
/// does not carry `t`.
double type_frequency(BugId bug_id, const std::map<BugId, DebtMark>& marks,
                      const DuplicateClusters& clusters, DebtType t,
                      const FeatureOptions& options = {});

/// Throws DataError when the product has no bugs in the snapshot.
ProductAttributes aggregate_product(const RepositorySnapshot& snapshot,
                                    const std::map<BugId, DebtMark>& marks,
                                    const DuplicateClusters& clusters, const ProductKey& key,
                                    const FeatureOptions& options = {});

/// Every product in the snapshot, sorted by key.
std::vector<ProductAttributes> aggregate_all(const RepositorySnapshot& snapshot,
                                             const std::map<BugId, DebtMark>& marks,
                                             const DuplicateClusters& clusters,
                                             const FeatureOptions& options = {});

inline constexpr std::int64_t kDefaultMinBugs = 100;

/// Keeps rows with n_bugs >= min_bugs, preserving order.
std::vector<ProductAttributes> filter_products(std::vector<ProductAttributes> rows,
                                               std::int64_t min_bugs = kDefaultMinBugs);

struct SizeBand {
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;  // exclusive; empty = unbounded
  std::int64_t products = 0;
};

struct RepositorySummary {
  std::vector<SizeBand> bands;
  std::int64_t products = 0;
  std::int64_t bugs = 0;
  std::array<std::int64_t, 3> debt_bugs{};
  /// Share of all bugs carrying each type.
  std::array<double, 3> ratios{};
};

RepositorySummary summarize_repository(const std::vector<ProductAttributes>& rows);

std::string summary_to_json(const RepositorySummary& summary);

}  // namespace debtbugs

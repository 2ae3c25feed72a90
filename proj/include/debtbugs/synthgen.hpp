#pragma once

// Deterministic synthetic bug repositories with planted debt and the
// ground truth the pipeline is expected to recover.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "debtbugs/features.hpp"
#include "debtbugs/ingest.hpp"
#include "debtbugs/model.hpp"

namespace debtbugs {

/// avg_fix_time = base_days + coefficients . attributes + N(0, noise_sigma)
struct FixTimeModel {
  double base_days = 15.0;
  std::array<double, kNumAttributes> coefficients = {0.0, 0.5, 0.1, 0.0, 1.0,
                                                     0.3, 0.0, 0.8, 0.6};
  double noise_sigma = 0.0;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t products = 10;
  std::int64_t min_bugs = 100;
  std::int64_t max_bugs = 200;

  double tag_rate = 0.02;
  double reopen_rate = 0.08;
  double duplicate_rate = 0.2;  // share of bugs planted as duplicates
  double unassigned_rate = 0.05;

  int max_tag_hits = 3;
  int max_reopens = 3;
  /// Cluster size counts the master and its duplicates.
  std::int64_t min_cluster = 2;
  std::int64_t max_cluster = 5;
  int max_chain_depth = 3;

  /// Upper bound of a product's per-type mean fix time for debt bugs.
  double max_debt_days = 60.0;
  FixTimeModel fix_time;

  /// Throws ContractError when a field is out of range.
  void validate() const;
};

struct SynthResult {
  RepositorySnapshot snapshot;
  /// Planted marks for every bug, under the default tag rules.
  std::map<BugId, DebtMark> marks;
  /// Planted attributes per product, sorted by key, with the default
  /// feature options.
  std::vector<ProductAttributes> products;
  /// The fix-time model's value for each product (same order). Differs from
  /// avg_fix_time by noise plus whole-day rounding.
  std::vector<double> model_target;
};

SynthResult generate(const SynthSpec& spec);

std::string ground_truth_to_json(const SynthResult& result, const SynthSpec& spec);

}  // namespace debtbugs

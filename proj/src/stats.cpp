#include "debtbugs/stats.hpp"

#include "debtbugs/ingest.hpp"
#include "json.hpp"

namespace debtbugs {

std::string_view to_string(CorrelationLevel level) {
  switch (level) {
    case CorrelationLevel::None: return "none";
    case CorrelationLevel::Weak: return "weak";
    case CorrelationLevel::Modest: return "modest";
    case CorrelationLevel::Strong: return "strong";
    case CorrelationLevel::Undefined: return "undefined";
  }
  return "undefined";
}

std::string_view to_string(CorrelationSign sign) {
  switch (sign) {
    case CorrelationSign::None: return "none";
    case CorrelationSign::Negative: return "negative";
    case CorrelationSign::Positive: return "positive";
  }
  return "none";
}

LevelAndSign classify_level(double r) {
  if (!(r >= -1.0 && r <= 1.0)) {
    throw ContractError("classify_level: r outside [-1, 1]: " + format_double(r));
  }
  if (r >= -0.1 && r <= 0.1) return {CorrelationLevel::None, CorrelationSign::None};
  if (r > 0.0) {
    if (r <= 0.3) return {CorrelationLevel::Weak, CorrelationSign::Positive};
    if (r <= 0.5) return {CorrelationLevel::Modest, CorrelationSign::Positive};
    return {CorrelationLevel::Strong, CorrelationSign::Positive};
  }
  if (r >= -0.3) return {CorrelationLevel::Weak, CorrelationSign::Negative};
  if (r >= -0.5) return {CorrelationLevel::Modest, CorrelationSign::Negative};
  return {CorrelationLevel::Strong, CorrelationSign::Negative};
}

CorrelationReport correlation_report(const std::vector<ProductAttributes>& rows) {
  if (rows.size() < 3) {
    throw InsufficientDataError("correlation needs at least 3 products, got " +
                                std::to_string(rows.size()));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd columns(n, static_cast<Eigen::Index>(kNumAttributes));
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto f = rows[static_cast<std::size_t>(i)].features();
    for (std::size_t j = 0; j < kNumAttributes; ++j) columns(i, static_cast<Eigen::Index>(j)) = f[j];
    target(i) = rows[static_cast<std::size_t>(i)].avg_fix_time;
  }

  CorrelationReport report;
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    CorrelationEntry entry;
    entry.attribute = std::string(kAttributeNames[j]);
    entry.sample_size = rows.size();
    try {
      double r = pearson(columns.col(static_cast<Eigen::Index>(j)), target);
      auto ls = classify_level(r);
      entry.r = r;
      entry.level = ls.level;
      entry.sign = ls.sign;
    } catch (const UndefinedCorrelationError&) {
      entry.level = CorrelationLevel::Undefined;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string correlation_to_json(const CorrelationReport& report) {
  using ordered_json = nlohmann::ordered_json;
  auto attrs = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json obj;
    obj["attribute"] = e.attribute;
    obj["r"] = e.r ? ordered_json(*e.r) : ordered_json();
    obj["level"] = std::string(to_string(e.level));
    obj["sign"] = std::string(to_string(e.sign));
    obj["n"] = e.sample_size;
    attrs.push_back(std::move(obj));
  }
  ordered_json out;
  out["target"] = "avg_fix_time";
  out["attributes"] = std::move(attrs);
  return out.dump(2) + '\n';
}

std::string correlation_to_csv(const CorrelationReport& report) {
  std::string out = "attribute,r,level,sign\n";
  for (const auto& e : report.entries) {
    out += e.attribute + ',' + (e.r ? format_double(*e.r) : std::string()) + ',' +
           std::string(to_string(e.level)) + ',' + std::string(to_string(e.sign)) + '\n';
  }
  return out;
}

}  // namespace debtbugs

#pragma once

// Pearson correlation and the coefficient strength bands.

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debtbugs/error.hpp"
#include "debtbugs/features.hpp"

namespace debtbugs {

/// Sample Pearson correlation of two equally long vectors, clamped to [-1, 1].
/// Throws ContractError on length mismatch or fewer than two samples and
/// UndefinedCorrelationError when either vector is constant.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::MatrixBase<DerivedX>& x,
                                  const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
  if (x.size() < 2) throw ContractError("pearson: needs at least two samples");

  const auto n = static_cast<Scalar>(x.size());
  const Scalar mean_x = x.sum() / n;
  const Scalar mean_y = y.sum() / n;
  auto dx = (x.array() - mean_x).eval();
  auto dy = (y.template cast<Scalar>().array() - mean_y).eval();
  const Scalar sxx = dx.square().sum();
  const Scalar syy = dy.square().sum();
  const bool x_const = (x.array() == x(0)).all();
  const bool y_const = (y.array() == y(0)).all();
  if (x_const || y_const || sxx == Scalar(0) || syy == Scalar(0)) {
    throw UndefinedCorrelationError("pearson: constant input has no correlation");
  }
  // (n - 1) cancels between covariance and the two deviations.
  Scalar r = (dx * dy).sum() / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, Scalar(-1), Scalar(1));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  using Map = Eigen::Map<const Eigen::VectorXd>;
  return pearson(Map(x.data(), static_cast<Eigen::Index>(x.size())),
                 Map(y.data(), static_cast<Eigen::Index>(y.size())));
}

enum class CorrelationLevel { None, Weak, Modest, Strong, Undefined };
enum class CorrelationSign { None, Negative, Positive };

std::string_view to_string(CorrelationLevel level);
std::string_view to_string(CorrelationSign sign);

struct LevelAndSign {
  CorrelationLevel level;
  CorrelationSign sign;
  bool operator==(const LevelAndSign&) const = default;
};

/// Band boundaries, read as written:
///   none    -0.1 <= r <= 0.1
///   weak    -0.3 <= r < -0.1   or  0.1 < r <= 0.3
///   modest  -0.5 <= r < -0.3   or  0.3 < r <= 0.5
///   strong  -1.0 <= r < -0.5   or  0.5 < r <= 1.0
/// Throws ContractError for |r| > 1 or NaN.
LevelAndSign classify_level(double r);

struct CorrelationEntry {
  std::string attribute;
  std::optional<double> r;  // empty when the column or target is constant
  CorrelationLevel level = CorrelationLevel::Undefined;
  CorrelationSign sign = CorrelationSign::None;
  std::size_t sample_size = 0;
};

struct CorrelationReport {
  std::vector<CorrelationEntry> entries;  // one per attribute, column order
};

/// Correlates each attribute column with avg_fix_time. Throws
/// InsufficientDataError for fewer than three rows.
CorrelationReport correlation_report(const std::vector<ProductAttributes>& rows);

std::string correlation_to_json(const CorrelationReport& report);
/// attribute,r,level,sign
std::string correlation_to_csv(const CorrelationReport& report);

}  // namespace debtbugs

#pragma once

// Regression learners for average fix time, k-fold cross-validation and the
// evaluation metrics (pooled correlation coefficient, RRSE).

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "debtbugs/error.hpp"
#include "debtbugs/features.hpp"

namespace debtbugs {

struct Dataset {
  Eigen::MatrixXd features;  // rows x attributes
  Eigen::VectorXd target;
  std::vector<ProductKey> keys;

  static Dataset from_rows(const std::vector<ProductAttributes>& rows);

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
  Dataset subset(const std::vector<std::size_t>& indices) const;

  /// Throws DataError on shape mismatch or non-finite values.
  void validate() const;
};

enum class ModelKind { Linear, ModelTree, Mlp };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view text);

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + intercept;
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;  // x[feature] > threshold
  std::size_t samples = 0;
  LinearModel leaf;

  bool is_leaf() const { return feature < 0; }
};

struct ModelTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Index of the leaf that `x` is routed to.
  std::size_t route(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct MlpParameters {
  Eigen::MatrixXd hidden_weights;  // hidden x inputs
  Eigen::VectorXd hidden_bias;
  Eigen::VectorXd output_weights;
  double output_bias = 0.0;

  Eigen::Index size() const {
    return hidden_weights.size() + hidden_bias.size() + output_weights.size() + 1;
  }
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::Ref<const Eigen::VectorXd>& flat);
};

struct Standardizer {
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;
};

struct MlpModel {
  MlpParameters params;
  Standardizer norm;
};

struct TrainedModel {
  std::variant<LinearModel, ModelTree, MlpModel> params;
  Eigen::Index n_features = 0;
  std::uint64_t seed = 0;

  ModelKind kind() const { return static_cast<ModelKind>(params.index()); }
};

struct LinearConfig {
  double ridge = 1e-8;
};

struct TreeConfig {
  std::size_t min_leaf = 4;
  /// A split must reduce the target SD by at least this share of the root SD.
  double min_sd_reduction = 0.05;
  LinearConfig leaf;
};

struct MlpConfig {
  int hidden = 8;
  int epochs = 2000;
  double learning_rate = 0.01;
  int window = 50;
  std::uint64_t seed = 1;
};

struct LearnerConfig {
  LinearConfig linear;
  TreeConfig tree;
  MlpConfig mlp;
};

/// Least squares on the centred design, falling back to a tiny ridge when the
/// design is rank deficient; the intercept is never penalised. Throws
/// InsufficientDataError unless rows > cols and
/// SingularFitError if the ridge cannot restore full rank.
TrainedModel train_linear(const Dataset& data, const LinearConfig& config = {});

/// Binary tree split by maximum standard-deviation reduction with linear
/// models in the leaves (leaf mean for leaves with at most cols + 1 rows).
TrainedModel train_model_tree(const Dataset& data, const TreeConfig& config = {});

/// One sigmoid hidden layer, linear output, full-batch gradient descent on
/// MSE over standardized inputs and target. Throws DivergenceError on a
/// non-finite loss.
TrainedModel train_mlp(const Dataset& data, const MlpConfig& config = {});

TrainedModel train(const Dataset& data, ModelKind kind, const LearnerConfig& config = {});

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // same layout as MlpParameters::flatten
};

/// Mean squared error of the network on (already standardized) data.
LossAndGradient mlp_loss_and_gradient(const MlpParameters& params, const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& y);

double mlp_forward(const MlpParameters& params, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Throws ContractError if the feature count differs from the model's.
double predict(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& features);
Eigen::VectorXd predict_rows(const TrainedModel& model, const Eigen::MatrixXd& features);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then k contiguous test blocks whose sizes differ by at
/// most one (the larger blocks first). Both index lists are sorted.
std::vector<Fold> kfold_split(std::size_t n_rows, std::size_t k, std::uint64_t seed);

/// Root relative squared error, in percent.
template <typename DerivedP, typename DerivedA>
double rrse(const Eigen::MatrixBase<DerivedP>& predicted,
            const Eigen::MatrixBase<DerivedA>& actual) {
  if (predicted.size() != actual.size() || actual.size() == 0) {
    throw ContractError("rrse: vectors must have equal non-zero length");
  }
  if ((actual.array() == actual(0)).all()) {
    throw UndefinedCorrelationError("rrse: actual values are constant");
  }
  const double mean = actual.mean();
  const double num = (predicted - actual).squaredNorm();
  const double den = (actual.array() - mean).square().sum();
  return 100.0 * std::sqrt(num / den);
}

struct EvalMetrics {
  double correlation_coefficient = 0.0;
  double rrse_percent = 0.0;
  Eigen::VectorXd predictions;  // out-of-fold, in row order
};

using Trainer = std::function<TrainedModel(const Dataset&)>;

/// Pools every out-of-fold prediction before scoring. A constant pooled
/// prediction vector scores a correlation of 0.
EvalMetrics cross_validate(const Dataset& data, const Trainer& trainer, std::size_t k,
                           std::uint64_t seed);
EvalMetrics cross_validate(const Dataset& data, ModelKind kind, std::size_t k,
                           std::uint64_t seed, const LearnerConfig& config = {});

inline constexpr int kModelFormatVersion = 1;

std::string save_model(const TrainedModel& model);
void save_model(const TrainedModel& model, std::ostream& output);
/// Throws ModelLoadError on a corrupt, truncated or unsupported stream.
TrainedModel load_model(std::istream& input);
TrainedModel load_model(const std::string& text);

std::string metrics_to_json(ModelKind kind, std::size_t k, std::uint64_t seed,
                            const EvalMetrics& metrics);

}  // namespace debtbugs

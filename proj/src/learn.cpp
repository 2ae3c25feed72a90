#include "debtbugs/learn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <sstream>

#include "debtbugs/random.hpp"
#include "debtbugs/stats.hpp"
#include "json.hpp"

namespace debtbugs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Dataset

Dataset Dataset::from_rows(const std::vector<ProductAttributes>& rows) {
  Dataset data;
  const auto n = static_cast<Index>(rows.size());
  data.features.resize(n, static_cast<Index>(kNumAttributes));
  data.target.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    auto f = row.features();
    for (std::size_t j = 0; j < kNumAttributes; ++j) data.features(i, static_cast<Index>(j)) = f[j];
    data.target(i) = row.avg_fix_time;
    data.keys.push_back(row.key);
  }
  data.validate();
  return data;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Index>(indices.size()), cols());
  out.target.resize(static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = static_cast<Index>(indices[i]);
    out.features.row(static_cast<Index>(i)) = features.row(src);
    out.target(static_cast<Index>(i)) = target(src);
    if (!keys.empty()) out.keys.push_back(keys[indices[i]]);
  }
  return out;
}

void Dataset::validate() const {
  if (features.rows() != target.size()) throw DataError("dataset: row count != target length");
  if (!keys.empty() && static_cast<Index>(keys.size()) != target.size()) {
    throw DataError("dataset: key count != target length");
  }
  if (!features.allFinite() || !target.allFinite()) throw DataError("dataset: non-finite value");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::ModelTree: return "mtree";
    case ModelKind::Mlp: return "mlp";
  }
  return "linear";
}

std::optional<ModelKind> model_kind_from_string(std::string_view text) {
  for (auto kind : {ModelKind::Linear, ModelKind::ModelTree, ModelKind::Mlp}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Linear regression

namespace {

LinearModel fit_least_squares(const MatrixXd& x, const VectorXd& y, double ridge) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n <= d) {
    throw InsufficientDataError("linear regression needs more rows (" + std::to_string(n) +
                                ") than features (" + std::to_string(d) + ")");
  }
  const VectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();

  MatrixXd centred = x.rowwise() - x_mean.transpose();
  VectorXd rhs = y.array() - y_mean;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(centred);
  if (qr.rank() < d && ridge > 0.0) {
    // Ridge as extra rows: [Xc; sqrt(l) I] w = [yc; 0].
    MatrixXd design(n + d, d);
    design.topRows(n) = centred;
    design.bottomRows(d) = std::sqrt(ridge) * MatrixXd::Identity(d, d);
    rhs.conservativeResize(n + d);
    rhs.tail(d).setZero();
    qr.compute(design);
  }
  if (qr.rank() < d) {
    throw SingularFitError("linear regression: design matrix is rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(d) + ")");
  }
  LinearModel model;
  model.weights = qr.solve(rhs);
  model.intercept = y_mean - x_mean.dot(model.weights);
  if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
    throw SingularFitError("linear regression: non-finite coefficients");
  }
  return model;
}

LinearModel mean_model(const VectorXd& y, Index d) {
  return {VectorXd::Zero(d), y.mean()};
}

}  // namespace

TrainedModel train_linear(const Dataset& data, const LinearConfig& config) {
  data.validate();
  TrainedModel model;
  model.params = fit_least_squares(data.features, data.target, config.ridge);
  model.n_features = data.cols();
  return model;
}

// ---------------------------------------------------------------------------
// Model tree

std::size_t ModelTree::route(const Eigen::Ref<const VectorXd>& x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(x(node.feature) <= node.threshold ? node.left : node.right);
  }
  return i;
}

namespace {

double population_sd(const VectorXd& y, const std::vector<std::size_t>& idx) {
  double mean = 0.0;
  for (auto i : idx) mean += y(static_cast<Index>(i));
  mean /= static_cast<double>(idx.size());
  double ss = 0.0;
  for (auto i : idx) ss += (y(static_cast<Index>(i)) - mean) * (y(static_cast<Index>(i)) - mean);
  return std::sqrt(ss / static_cast<double>(idx.size()));
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double reduction = 0.0;
  std::size_t left_count = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TreeConfig& config)
      : data_(data), config_(config) {}

  ModelTree build() {
    std::vector<std::size_t> all(static_cast<std::size_t>(data_.rows()));
    std::iota(all.begin(), all.end(), 0);
    root_sd_ = population_sd(data_.target, all);
    grow(all);
    return std::move(tree_);
  }

 private:
  int grow(const std::vector<std::size_t>& idx) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[static_cast<std::size_t>(id)].samples = idx.size();

    const double sd = population_sd(data_.target, idx);
    Split split;
    if (idx.size() >= 2 * config_.min_leaf && sd > 0.0) split = best_split(idx, sd);
    if (split.feature < 0 || split.reduction < config_.min_sd_reduction * root_sd_) {
      tree_.nodes[static_cast<std::size_t>(id)].leaf = fit_leaf(idx);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (data_.features(static_cast<Index>(i), split.feature) <= split.threshold ? left : right)
          .push_back(i);
    }
    const int l = grow(left);
    const int r = grow(right);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& idx, double sd) const {
    const std::size_t n = idx.size();
    const auto nd = static_cast<double>(n);
    Split best;
    std::vector<std::size_t> order(idx);
    std::vector<double> prefix_sum(n + 1), prefix_sq(n + 1);
    for (Index j = 0; j < data_.cols(); ++j) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data_.features(static_cast<Index>(a), j) < data_.features(static_cast<Index>(b), j);
      });
      for (std::size_t i = 0; i < n; ++i) {
        const double y = data_.target(static_cast<Index>(order[i]));
        prefix_sum[i + 1] = prefix_sum[i] + y;
        prefix_sq[i + 1] = prefix_sq[i] + y * y;
      }
      auto side_sd = [](double s, double sq, double m) {
        const double var = sq / m - (s / m) * (s / m);
        return var > 0.0 ? std::sqrt(var) : 0.0;
      };
      for (std::size_t left = config_.min_leaf; left + config_.min_leaf <= n; ++left) {
        const double lo = data_.features(static_cast<Index>(order[left - 1]), j);
        const double hi = data_.features(static_cast<Index>(order[left]), j);
        if (!(lo < hi)) continue;
        const auto nl = static_cast<double>(left);
        const auto nr = nd - nl;
        const double sd_l = side_sd(prefix_sum[left], prefix_sq[left], nl);
        const double sd_r = side_sd(prefix_sum[n] - prefix_sum[left], prefix_sq[n] - prefix_sq[left], nr);
        const double reduction = sd - (nl / nd) * sd_l - (nr / nd) * sd_r;
        if (reduction > best.reduction) {
          best = {static_cast<int>(j), lo + (hi - lo) / 2.0, reduction, left};
        }
      }
    }
    return best;
  }

  LinearModel fit_leaf(const std::vector<std::size_t>& idx) const {
    const Dataset part = data_.subset(idx);
    if (part.rows() > part.cols() + 1) {
      try {
        return fit_least_squares(part.features, part.target, config_.leaf.ridge);
      } catch (const SingularFitError&) {
      }
    }
    return mean_model(part.target, part.cols());
  }

  const Dataset& data_;
  const TreeConfig& config_;
  double root_sd_ = 0.0;
  ModelTree tree_;
};

}  // namespace

TrainedModel train_model_tree(const Dataset& data, const TreeConfig& config) {
  data.validate();
  if (config.min_leaf == 0) throw ContractError("model tree: min_leaf must be positive");
  if (static_cast<std::size_t>(data.rows()) < 2 * config.min_leaf) {
    throw InsufficientDataError("model tree needs at least " +
                                std::to_string(2 * config.min_leaf) + " rows");
  }
  TrainedModel model;
  model.params = TreeBuilder(data, config).build();
  model.n_features = data.cols();
  return model;
}

// ---------------------------------------------------------------------------
// Multilayer perceptron

VectorXd MlpParameters::flatten() const {
  VectorXd flat(size());
  Index pos = 0;
  for (Index c = 0; c < hidden_weights.cols(); ++c) {
    for (Index r = 0; r < hidden_weights.rows(); ++r) flat(pos++) = hidden_weights(r, c);
  }
  flat.segment(pos, hidden_bias.size()) = hidden_bias;
  pos += hidden_bias.size();
  flat.segment(pos, output_weights.size()) = output_weights;
  pos += output_weights.size();
  flat(pos) = output_bias;
  return flat;
}

void MlpParameters::assign(const Eigen::Ref<const VectorXd>& flat) {
  if (flat.size() != size()) throw ContractError("mlp: parameter vector has the wrong length");
  Index pos = 0;
  for (Index c = 0; c < hidden_weights.cols(); ++c) {
    for (Index r = 0; r < hidden_weights.rows(); ++r) hidden_weights(r, c) = flat(pos++);
  }
  hidden_bias = flat.segment(pos, hidden_bias.size());
  pos += hidden_bias.size();
  output_weights = flat.segment(pos, output_weights.size());
  pos += output_weights.size();
  output_bias = flat(pos);
}

namespace {

VectorXd sigmoid(const VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

MatrixXd sigmoid(const MatrixXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

Standardizer fit_standardizer(const Dataset& data) {
  Standardizer s;
  const auto n = static_cast<double>(data.rows());
  s.feature_mean = data.features.colwise().mean();
  s.feature_scale.resize(data.cols());
  for (Index j = 0; j < data.cols(); ++j) {
    const double var = (data.features.col(j).array() - s.feature_mean(j)).square().sum() / n;
    s.feature_scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  s.target_mean = data.target.mean();
  const double tvar = (data.target.array() - s.target_mean).square().sum() / n;
  s.target_scale = tvar > 0.0 ? std::sqrt(tvar) : 1.0;
  return s;
}

MatrixXd standardize(const MatrixXd& x, const Standardizer& s) {
  return ((x.rowwise() - s.feature_mean.transpose()).array().rowwise() /
          s.feature_scale.transpose().array())
      .matrix();
}

}  // namespace

double mlp_forward(const MlpParameters& params, const Eigen::Ref<const VectorXd>& x) {
  const VectorXd hidden = sigmoid(VectorXd(params.hidden_weights * x + params.hidden_bias));
  return params.output_weights.dot(hidden) + params.output_bias;
}

LossAndGradient mlp_loss_and_gradient(const MlpParameters& params, const MatrixXd& x,
                                      const VectorXd& y) {
  const auto n = static_cast<double>(x.rows());
  // Columns are samples.
  MatrixXd pre = params.hidden_weights * x.transpose();
  pre.colwise() += params.hidden_bias;
  const MatrixXd hidden = sigmoid(pre);
  const VectorXd out =
      (hidden.transpose() * params.output_weights).array() + params.output_bias;
  const VectorXd err = out - y;

  LossAndGradient result;
  result.loss = err.squaredNorm() / n;

  const VectorXd d_out = 2.0 * err / n;
  MlpParameters grad = params;
  grad.output_weights = hidden * d_out;
  grad.output_bias = d_out.sum();
  // dL/dpre = w2 * d_out * s(1 - s)
  const MatrixXd d_pre = ((params.output_weights * d_out.transpose()).array() * hidden.array() *
                          (1.0 - hidden.array()))
                             .matrix();
  grad.hidden_weights = d_pre * x;
  grad.hidden_bias = d_pre.rowwise().sum();
  result.gradient = grad.flatten();
  return result;
}

TrainedModel train_mlp(const Dataset& data, const MlpConfig& config) {
  data.validate();
  if (data.rows() < 10) throw InsufficientDataError("mlp needs at least 10 rows");
  if (config.hidden < 1 || config.epochs < 0 || !(config.learning_rate > 0.0)) {
    throw ContractError("mlp: invalid configuration");
  }
  MlpModel mlp;
  mlp.norm = fit_standardizer(data);
  const MatrixXd x = standardize(data.features, mlp.norm);
  const VectorXd y = (data.target.array() - mlp.norm.target_mean) / mlp.norm.target_scale;

  const Index d = data.cols();
  const Index h = config.hidden;
  Rng rng(config.seed);
  auto& p = mlp.params;
  p.hidden_weights.resize(h, d);
  p.hidden_bias.resize(h);
  p.output_weights.resize(h);
  const double in_range = 1.0 / std::sqrt(static_cast<double>(d));
  const double out_range = 1.0 / std::sqrt(static_cast<double>(h));
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < h; ++r) p.hidden_weights(r, c) = rng.uniform(-in_range, in_range);
  }
  for (Index r = 0; r < h; ++r) p.hidden_bias(r) = rng.uniform(-in_range, in_range);
  for (Index r = 0; r < h; ++r) p.output_weights(r) = rng.uniform(-out_range, out_range);
  p.output_bias = 0.0;

  VectorXd flat = p.flatten();
  VectorXd best = flat;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs));
  MlpParameters work = p;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    work.assign(flat);
    const auto lg = mlp_loss_and_gradient(work, x, y);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
      throw DivergenceError("mlp: loss became non-finite at epoch " + std::to_string(epoch) +
                            "; try a lower learning rate");
    }
    if (lg.loss < best_loss) {
      best_loss = lg.loss;
      best = flat;
    }
    history.push_back(lg.loss);
    const auto e = history.size() - 1;
    if (config.window > 0 && e >= static_cast<std::size_t>(config.window) &&
        history[e] > history[e - static_cast<std::size_t>(config.window)]) {
      break;  // loss rose across the trailing window
    }
    flat -= config.learning_rate * lg.gradient;
  }
  // The final step is never evaluated; keep the best evaluated point.
  p.assign(best);

  TrainedModel model;
  model.params = std::move(mlp);
  model.n_features = d;
  model.seed = config.seed;
  return model;
}

TrainedModel train(const Dataset& data, ModelKind kind, const LearnerConfig& config) {
  switch (kind) {
    case ModelKind::Linear: return train_linear(data, config.linear);
    case ModelKind::ModelTree: return train_model_tree(data, config.tree);
    case ModelKind::Mlp: return train_mlp(data, config.mlp);
  }
  throw ContractError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Prediction

double predict(const TrainedModel& model, const Eigen::Ref<const VectorXd>& features) {
  if (features.size() != model.n_features) {
    throw ContractError("predict: expected " + std::to_string(model.n_features) +
                        " features, got " + std::to_string(features.size()));
  }
  if (!features.allFinite()) throw ContractError("predict: non-finite feature");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return m(features);
        } else if constexpr (std::is_same_v<T, ModelTree>) {
          return m.nodes[m.route(features)].leaf(features);
        } else {
          const VectorXd z = ((features - m.norm.feature_mean).array() /
                              m.norm.feature_scale.array())
                                 .matrix();
          return mlp_forward(m.params, z) * m.norm.target_scale + m.norm.target_mean;
        }
      },
      model.params);
}

VectorXd predict_rows(const TrainedModel& model, const MatrixXd& features) {
  VectorXd out(features.rows());
  for (Index i = 0; i < features.rows(); ++i) out(i) = predict(model, features.row(i).transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation

std::vector<Fold> kfold_split(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ContractError("kfold_split: k must be at least 2");
  if (n_rows < k) {
    throw InsufficientDataError("cross-validation needs at least " + std::to_string(k) +
                                " rows, got " + std::to_string(n_rows));
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<Fold> folds(k);
  const std::size_t base = n_rows / k;
  const std::size_t extra = n_rows % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    auto& fold = folds[f];
    fold.test.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                     order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    fold.train.reserve(n_rows - size);
    fold.train.insert(fold.train.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
    fold.train.insert(fold.train.end(), order.begin() + static_cast<std::ptrdiff_t>(pos + size),
                      order.end());
    std::sort(fold.test.begin(), fold.test.end());
    std::sort(fold.train.begin(), fold.train.end());
    pos += size;
  }
  return folds;
}

EvalMetrics cross_validate(const Dataset& data, const Trainer& trainer, std::size_t k,
                           std::uint64_t seed) {
  data.validate();
  const auto folds = kfold_split(static_cast<std::size_t>(data.rows()), k, seed);
  EvalMetrics metrics;
  metrics.predictions.resize(data.rows());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    TrainedModel model;
    try {
      model = trainer(data.subset(folds[f].train));
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
    }
    for (auto i : folds[f].test) {
      const auto row = static_cast<Index>(i);
      metrics.predictions(row) = predict(model, data.features.row(row).transpose());
    }
  }
  try {
    metrics.correlation_coefficient = pearson(metrics.predictions, data.target);
  } catch (const UndefinedCorrelationError&) {
    if ((data.target.array() == data.target(0)).all()) throw;
    metrics.correlation_coefficient = 0.0;
  }
  metrics.rrse_percent = rrse(metrics.predictions, data.target);
  return metrics;
}

EvalMetrics cross_validate(const Dataset& data, ModelKind kind, std::size_t k,
                           std::uint64_t seed, const LearnerConfig& config) {
  return cross_validate(
      data, [&](const Dataset& train_part) { return train(train_part, kind, config); }, k, seed);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json vector_json(const VectorXd& v) {
  auto arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

VectorXd vector_from(const json& arr, Index expected) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != expected) {
    throw ModelLoadError("model file: vector has wrong length");
  }
  VectorXd v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

ordered_json linear_json(const LinearModel& m) {
  ordered_json obj;
  obj["weights"] = vector_json(m.weights);
  obj["intercept"] = m.intercept;
  return obj;
}

LinearModel linear_from(const json& obj, Index d) {
  return {vector_from(obj.at("weights"), d), obj.at("intercept").get<double>()};
}

}  // namespace

std::string save_model(const TrainedModel& model) {
  ordered_json out;
  out["format_version"] = kModelFormatVersion;
  out["kind"] = std::string(to_string(model.kind()));
  out["n_features"] = model.n_features;
  out["seed"] = model.seed;
  ordered_json params;
  ordered_json norm;  // null unless the model standardizes internally
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          params = linear_json(m);
        } else if constexpr (std::is_same_v<T, ModelTree>) {
          auto nodes = ordered_json::array();
          for (const auto& node : m.nodes) {
            ordered_json n;
            n["samples"] = node.samples;
            if (node.is_leaf()) {
              n["leaf"] = linear_json(node.leaf);
            } else {
              n["feature"] = node.feature;
              n["threshold"] = node.threshold;
              n["left"] = node.left;
              n["right"] = node.right;
            }
            nodes.push_back(std::move(n));
          }
          params["nodes"] = std::move(nodes);
        } else {
          auto rows = ordered_json::array();
          for (Index r = 0; r < m.params.hidden_weights.rows(); ++r) {
            rows.push_back(vector_json(m.params.hidden_weights.row(r).transpose()));
          }
          params["hidden_weights"] = std::move(rows);
          params["hidden_bias"] = vector_json(m.params.hidden_bias);
          params["output_weights"] = vector_json(m.params.output_weights);
          params["output_bias"] = m.params.output_bias;
          norm["feature_mean"] = vector_json(m.norm.feature_mean);
          norm["feature_scale"] = vector_json(m.norm.feature_scale);
          norm["target_mean"] = m.norm.target_mean;
          norm["target_scale"] = m.norm.target_scale;
        }
      },
      model.params);
  out["params"] = std::move(params);
  out["norm"] = std::move(norm);
  return out.dump(2) + '\n';
}

void save_model(const TrainedModel& model, std::ostream& output) {
  output << save_model(model);
  if (!output) throw IoError("write failed");
}

TrainedModel load_model(const std::string& text) {
  TrainedModel model;
  try {
    const auto in = json::parse(text);
    const int version = in.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelLoadError("unsupported model format_version " + std::to_string(version));
    }
    const auto kind = model_kind_from_string(in.at("kind").get<std::string>());
    if (!kind) throw ModelLoadError("unknown model kind");
    const Index d = in.at("n_features").get<Index>();
    if (d <= 0) throw ModelLoadError("model file: n_features must be positive");
    model.n_features = d;
    model.seed = in.at("seed").get<std::uint64_t>();
    const auto& params = in.at("params");
    switch (*kind) {
      case ModelKind::Linear:
        model.params = linear_from(params, d);
        break;
      case ModelKind::ModelTree: {
        ModelTree tree;
        const auto& nodes = params.at("nodes");
        if (!nodes.is_array() || nodes.empty()) throw ModelLoadError("model tree has no nodes");
        const int count = static_cast<int>(nodes.size());
        for (int i = 0; i < count; ++i) {
          const auto& n = nodes[static_cast<std::size_t>(i)];
          TreeNode node;
          node.samples = n.at("samples").get<std::size_t>();
          if (n.contains("leaf")) {
            node.leaf = linear_from(n.at("leaf"), d);
          } else {
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            // Children always follow their parent, which rules out cycles.
            if (node.feature < 0 || node.feature >= d || node.left <= i || node.right <= i ||
                node.left >= count || node.right >= count) {
              throw ModelLoadError("model tree node " + std::to_string(i) + " is malformed");
            }
          }
          tree.nodes.push_back(std::move(node));
        }
        model.params = std::move(tree);
        break;
      }
      case ModelKind::Mlp: {
        MlpModel mlp;
        const auto& rows = params.at("hidden_weights");
        if (!rows.is_array() || rows.empty()) throw ModelLoadError("mlp has no hidden units");
        const auto h = static_cast<Index>(rows.size());
        mlp.params.hidden_weights.resize(h, d);
        for (Index r = 0; r < h; ++r) {
          mlp.params.hidden_weights.row(r) =
              vector_from(rows[static_cast<std::size_t>(r)], d).transpose();
        }
        mlp.params.hidden_bias = vector_from(params.at("hidden_bias"), h);
        mlp.params.output_weights = vector_from(params.at("output_weights"), h);
        mlp.params.output_bias = params.at("output_bias").get<double>();
        const auto& norm = in.at("norm");
        mlp.norm.feature_mean = vector_from(norm.at("feature_mean"), d);
        mlp.norm.feature_scale = vector_from(norm.at("feature_scale"), d);
        mlp.norm.target_mean = norm.at("target_mean").get<double>();
        mlp.norm.target_scale = norm.at("target_scale").get<double>();
        model.params = std::move(mlp);
        break;
      }
    }
  } catch (const json::exception& e) {
    throw ModelLoadError(std::string("corrupt model file: ") + e.what());
  }
  return model;
}

TrainedModel load_model(std::istream& input) {
  std::ostringstream buffer;
  buffer << input.rdbuf();
  if (input.bad()) throw IoError("read failed");
  return load_model(buffer.str());
}

std::string metrics_to_json(ModelKind kind, std::size_t k, std::uint64_t seed,
                            const EvalMetrics& metrics) {
  ordered_json out;
  out["model"] = std::string(to_string(kind));
  out["k"] = k;
  out["seed"] = seed;
  out["n"] = metrics.predictions.size();
  out["correlation_coefficient"] = metrics.correlation_coefficient;
  out["rrse_percent"] = metrics.rrse_percent;
  return out.dump(2) + '\n';
}

}  // namespace debtbugs

#include "debtbugs/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "debtbugs/error.hpp"
#include "debtbugs/features.hpp"
#include "debtbugs/identify.hpp"
#include "debtbugs/ingest.hpp"
#include "debtbugs/learn.hpp"
#include "debtbugs/stats.hpp"
#include "debtbugs/synthgen.hpp"

namespace debtbugs {

namespace {

struct RunConfig {
  std::string in;
  std::string out;
  std::string debt;
  std::string model_path;
  std::string metrics;
  std::string csv;
  std::string truth;

  std::int64_t min_bugs = kDefaultMinBugs;
  std::vector<std::string> tags = {"TODO", "FIXME", "XXX"};
  bool case_insensitive = false;
  std::vector<BugId> allow;
  std::vector<BugId> deny;
  bool include_master_in_freq = false;
  bool freq_over_all_bugs = false;
  std::string model = "linear";
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::string on_malformed = "abort";
  std::vector<std::string> status_aliases;

  LearnerConfig learner;
  SynthSpec synth;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

// Writes `text` to `path`, or to `fallback` when path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    if (!fallback) throw IoError("write to standard output failed");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

IngestConfig ingest_config(const RunConfig& cfg) {
  IngestConfig config;
  config.on_malformed = cfg.on_malformed == "skip" ? MalformedPolicy::Skip : MalformedPolicy::Abort;
  config.source_description = cfg.in;
  for (const auto& alias : cfg.status_aliases) {
    auto eq = alias.find('=');
    auto status = eq == std::string::npos ? std::nullopt : status_from_string(alias.substr(eq + 1));
    if (!status) throw Error(ErrorKind::Usage, "bad --status-alias '" + alias + "', want NAME=STATUS");
    config.status_aliases[alias.substr(0, eq)] = *status;
  }
  return config;
}

RepositorySnapshot load_snapshot(const RunConfig& cfg, std::ostream& err) {
  auto in = open_input(cfg.in);
  auto result = parse_bug_stream(in, ingest_config(cfg));
  for (const auto& issue : result.report.issues) {
    err << "warning: line " << issue.line << ": " << issue.message << '\n';
  }
  if (result.report.skipped > 0) err << "skipped " << result.report.skipped << " malformed line(s)\n";
  return std::move(result.snapshot);
}

std::vector<ProductAttributes> load_features(const std::string& path) {
  auto in = open_input(path);
  return read_feature_table(in);
}

void cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto snapshot = load_snapshot(cfg, err);
  std::ostringstream text;
  auto lines = write_snapshot(snapshot, text);
  emit(cfg.out, text.str(), out);
  err << "ingested " << lines << " bug(s)\n";
}

void cmd_identify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto snapshot = load_snapshot(cfg, err);
  TagRuleSet rules;
  rules.keywords = cfg.tags;
  rules.case_sensitive = !cfg.case_insensitive;
  rules.allowlist.insert(cfg.allow.begin(), cfg.allow.end());
  rules.denylist.insert(cfg.deny.begin(), cfg.deny.end());
  rules.validate();
  auto clusters = resolve_duplicate_masters(snapshot);
  for (auto id : clusters.dangling_masters) {
    err << "warning: duplicate chain ends at bug " << id << ", which is not in the snapshot\n";
  }
  auto marks = classify_debt(snapshot, rules);
  std::ostringstream text;
  write_debt_report(marks, text);
  emit(cfg.out, text.str(), out);
}

void cmd_features(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.debt.empty()) throw Error(ErrorKind::Usage, "features needs --debt");
  auto snapshot = load_snapshot(cfg, err);
  auto debt_in = open_input(cfg.debt);
  auto marks = read_debt_report(debt_in);
  auto clusters = clusters_from_marks(marks);
  FeatureOptions options;
  options.include_master_in_freq = cfg.include_master_in_freq;
  options.frequency_denominator =
      cfg.freq_over_all_bugs ? FrequencyDenominator::AllBugs : FrequencyDenominator::TypeBugs;
  auto rows = aggregate_all(snapshot, marks, clusters, options);
  const auto before = rows.size();
  rows = filter_products(std::move(rows), cfg.min_bugs);
  err << "kept " << rows.size() << " of " << before << " product(s) with >= " << cfg.min_bugs
      << " bugs\n";
  std::ostringstream text;
  write_feature_table(rows, text);
  emit(cfg.out, text.str(), out);
}

void cmd_correlate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  auto report = correlation_report(load_features(cfg.in));
  emit(cfg.out, correlation_to_json(report), out);
  if (!cfg.csv.empty()) emit(cfg.csv, correlation_to_csv(report), out);
}

void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto kind = model_kind_from_string(cfg.model);
  if (!kind) throw Error(ErrorKind::Usage, "unknown --model '" + cfg.model + "'");
  auto data = Dataset::from_rows(load_features(cfg.in));
  LearnerConfig learner = cfg.learner;
  learner.mlp.seed = cfg.seed;
  auto metrics = cross_validate(data, *kind, cfg.folds, cfg.seed, learner);
  auto model = train(data, *kind, learner);
  model.seed = cfg.seed;
  err << to_string(*kind) << ": correlation " << metrics.correlation_coefficient << ", rrse "
      << metrics.rrse_percent << "%\n";
  emit(cfg.out, save_model(model), out);
  if (!cfg.metrics.empty()) emit(cfg.metrics, metrics_to_json(*kind, cfg.folds, cfg.seed, metrics), out);
}

void cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.model_path.empty()) throw Error(ErrorKind::Usage, "predict needs --model");
  auto model_in = open_input(cfg.model_path);
  auto model = load_model(model_in);
  auto rows = load_features(cfg.in);
  std::string text = "product,version,predicted_avg_fix_time\n";
  for (const auto& row : rows) {
    auto f = row.features();
    Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
    text += row.key.name + ',' + row.key.version + ',' + format_double(predict(model, x)) + '\n';
  }
  emit(cfg.out, text, out);
}

void cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SynthSpec spec = cfg.synth;
  spec.seed = cfg.seed;
  auto result = generate(spec);
  std::ostringstream text;
  auto lines = write_snapshot(result.snapshot, text);
  emit(cfg.out, text.str(), out);
  std::string truth = cfg.truth;
  if (truth.empty() && !cfg.out.empty() && cfg.out != "-") {
    truth = (std::filesystem::path(cfg.out).parent_path() / "ground_truth.json").string();
  }
  if (!truth.empty()) emit(truth, ground_truth_to_json(result, spec), out);
  err << "generated " << lines << " bug(s) in " << spec.products << " product(s)\n";
}

void cmd_summary(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  emit(cfg.out, summary_to_json(summarize_repository(load_features(cfg.in))), out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Debt-prone bug analytics: identify, measure, correlate, predict"};
  app.name("debtbugs");
  app.require_subcommand(1);

  const std::vector<std::string> kMalformed = {"skip", "abort"};
  auto add_ingest_flags = [&](CLI::App* cmd) {
    cmd->add_option("--in", cfg.in, "Bug JSON-lines snapshot")->required();
    cmd->add_option("--on-malformed", cfg.on_malformed, "skip | abort")
        ->check(CLI::IsMember(kMalformed));
    cmd->add_option("--status-alias", cfg.status_aliases, "Extra status mapping NAME=STATUS");
  };

  std::function<void()> action;

  auto* ingest = app.add_subcommand("ingest", "Validate and canonicalize a bug snapshot");
  add_ingest_flags(ingest);
  ingest->add_option("--out", cfg.out, "Canonical JSON-lines output");
  ingest->callback([&] { action = [&] { cmd_ingest(cfg, out, err); }; });

  auto* identify = app.add_subcommand("identify", "Classify tag, reopened and duplicate bugs");
  add_ingest_flags(identify);
  identify->add_option("--out", cfg.out, "Debt report JSON-lines output");
  identify->add_option("--tags", cfg.tags, "Tag keywords")->delimiter(',');
  identify->add_flag("--case-insensitive", cfg.case_insensitive, "Match tags ignoring case");
  identify->add_option("--allow", cfg.allow, "Bug ids reviewed as tag bugs")->delimiter(',');
  identify->add_option("--deny", cfg.deny, "Bug ids reviewed as not tag bugs")->delimiter(',');
  identify->callback([&] { action = [&] { cmd_identify(cfg, out, err); }; });

  auto* features = app.add_subcommand("features", "Per-product attribute table");
  add_ingest_flags(features);
  features->add_option("--debt", cfg.debt, "Debt report from `identify`")->required();
  features->add_option("--out", cfg.out, "Feature CSV output");
  features->add_option("--min-bugs", cfg.min_bugs, "Drop products with fewer bugs")
      ->check(CLI::NonNegativeNumber);
  features->add_flag("--include-master-in-freq", cfg.include_master_in_freq,
                     "Count the master bug in duplicate frequency");
  features->add_flag("--freq-over-all-bugs", cfg.freq_over_all_bugs,
                     "Average frequencies over every bug of the product");
  features->callback([&] { action = [&] { cmd_features(cfg, out, err); }; });

  auto* correlate = app.add_subcommand("correlate", "Pearson r of each attribute vs fix time");
  correlate->add_option("--in", cfg.in, "Feature CSV")->required();
  correlate->add_option("--out", cfg.out, "Correlation JSON output");
  correlate->add_option("--csv", cfg.csv, "Also write attribute,r,level,sign CSV");
  correlate->callback([&] { action = [&] { cmd_correlate(cfg, out, err); }; });

  const std::vector<std::string> kModels = {"linear", "mtree", "mlp"};
  auto* train_cmd = app.add_subcommand("train", "Cross-validate and fit a predictor");
  train_cmd->add_option("--in", cfg.in, "Feature CSV")->required();
  train_cmd->add_option("--out", cfg.out, "Model JSON output");
  train_cmd->add_option("--metrics", cfg.metrics, "Metrics JSON output");
  train_cmd->add_option("--model", cfg.model, "linear | mtree | mlp")->check(CLI::IsMember(kModels));
  train_cmd->add_option("--folds", cfg.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  train_cmd->add_option("--seed", cfg.seed, "Fold shuffle and weight init seed");
  train_cmd->add_option("--ridge", cfg.learner.linear.ridge, "Ridge term for least squares")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--min-leaf", cfg.learner.tree.min_leaf, "Model tree minimum leaf size")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--min-sd-reduction", cfg.learner.tree.min_sd_reduction,
                        "Model tree stop threshold, share of root SD");
  train_cmd->add_option("--hidden", cfg.learner.mlp.hidden, "MLP hidden units")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", cfg.learner.mlp.epochs, "MLP epochs")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--learning-rate", cfg.learner.mlp.learning_rate, "MLP learning rate")
      ->check(CLI::PositiveNumber);
  train_cmd->callback([&] {
    cfg.learner.tree.leaf = cfg.learner.linear;
    action = [&] { cmd_train(cfg, out, err); };
  });

  auto* predict_cmd = app.add_subcommand("predict", "Predict average fix time for products");
  predict_cmd->add_option("--model", cfg.model_path, "Model JSON from `train`")->required();
  predict_cmd->add_option("--in", cfg.in, "Feature CSV of products to predict")->required();
  predict_cmd->add_option("--out", cfg.out, "Predictions CSV output");
  predict_cmd->callback([&] { action = [&] { cmd_predict(cfg, out, err); }; });

  auto* synth = app.add_subcommand("synth", "Generate a synthetic bug repository");
  synth->add_option("--seed", cfg.seed, "Generator seed");
  synth->add_option("--out", cfg.out, "Bug JSON-lines output");
  synth->add_option("--truth", cfg.truth, "Ground truth JSON (default: ground_truth.json next to --out)");
  synth->add_option("--products", cfg.synth.products, "Number of products")->check(CLI::PositiveNumber);
  synth->add_option("--min-bug-count", cfg.synth.min_bugs, "Fewest bugs per product");
  synth->add_option("--max-bug-count", cfg.synth.max_bugs, "Most bugs per product");
  synth->add_option("--tag-rate", cfg.synth.tag_rate, "Share of tag bugs");
  synth->add_option("--reopen-rate", cfg.synth.reopen_rate, "Share of reopened bugs");
  synth->add_option("--duplicate-rate", cfg.synth.duplicate_rate, "Share of duplicate bugs");
  synth->add_option("--unassigned-rate", cfg.synth.unassigned_rate, "Share of never-assigned bugs");
  synth->add_option("--noise", cfg.synth.fix_time.noise_sigma, "Fix-time noise sigma, days");
  synth->callback([&] { action = [&] { cmd_synth(cfg, out, err); }; });

  auto* summary = app.add_subcommand("summary", "Product size bands and debt ratios");
  summary->add_option("--in", cfg.in, "Feature CSV")->required();
  summary->add_option("--out", cfg.out, "Summary JSON output");
  summary->callback([&] { action = [&] { cmd_summary(cfg, out, err); }; });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Data);
  }
}

}  // namespace debtbugs

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "debtbugs/cli.hpp"
#include "debtbugs/error.hpp"
#include "debtbugs/features.hpp"
#include "debtbugs/identify.hpp"
#include "debtbugs/learn.hpp"
#include "debtbugs/random.hpp"
#include "debtbugs/stats.hpp"
#include "debtbugs/synthgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace debtbugs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("unexpected exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime %.2fs over %.0fs", secs, time_limit_s);
    o.require(secs < time_limit_s, buf);
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << " (" << timing << ")";
  if (!o.pass) std::cout << ": " << o.detail;
  std::cout << '\n';
  if (!o.pass) ++failures;
}

Dataset make_dataset(Eigen::Index n, Rng& rng, const std::function<double(const Eigen::VectorXd&)>& f,
                     double noise) {
  Dataset d;
  d.features.resize(n, 9);
  d.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 9; ++j) d.features(i, j) = rng.uniform(0, 1);
    d.target(i) = f(d.features.row(i).transpose()) + noise * rng.normal();
  }
  d.keys.resize(static_cast<std::size_t>(n));
  return d;
}

Eigen::VectorXd planted_weights() {
  Eigen::VectorXd w(9);
  w << 2.0, -1.5, 0.25, 4.0, 0.0, -3.0, 1.0, 0.5, 7.0;
  return w;
}

RepositorySnapshot random_forest(Rng& rng, int max_depth) {
  RepositorySnapshot s;
  std::vector<std::pair<BugId, int>> nodes;
  const auto n = rng.integer(1, 60);
  for (BugId id = 1; id <= n; ++id) {
    fixture::BugSpec spec{.id = id};
    std::vector<std::size_t> parents;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].second < max_depth) parents.push_back(i);
    }
    int depth = 0;
    if (!parents.empty() && rng.bernoulli(0.7)) {
      const auto& p = nodes[parents[static_cast<std::size_t>(
          rng.integer(0, static_cast<std::int64_t>(parents.size()) - 1))]];
      spec.duplicate_of = p.first;
      depth = p.second + 1;
    }
    nodes.emplace_back(id, depth);
    s.bugs.emplace(id, fixture::bug(spec));
  }
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  criterion(1, "closed-loop identification on 50 synthetic repositories", 30, [](Outcome& o) {
    std::size_t mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Rng knobs(seed * 7919);
      SynthSpec spec;
      spec.seed = seed;
      spec.products = static_cast<std::size_t>(knobs.integer(1, 12));
      spec.min_bugs = knobs.integer(1, 80);
      spec.max_bugs = std::min<std::int64_t>(spec.min_bugs + knobs.integer(0, 100),
                                             2000 / static_cast<std::int64_t>(spec.products));
      spec.tag_rate = knobs.uniform(0, 0.3);
      spec.reopen_rate = knobs.uniform(0, 0.3);
      spec.duplicate_rate = knobs.uniform(0, 0.4);
      spec.unassigned_rate = knobs.uniform(0, 0.2);
      auto truth = generate(spec);
      o.require(truth.snapshot.bugs.size() <= 2000, "corpus over 2000 bugs");
      auto marks = classify_debt(truth.snapshot);
      for (const auto& [id, want] : truth.marks) {
        auto it = marks.find(id);
        if (it == marks.end() || !(it->second == want)) ++mismatches;
      }
      mismatches += marks.size() != truth.marks.size() ? 1 : 0;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatching marks");
  });

  criterion(2, "duplicate master chains", 0, [](Outcome& o) {
    auto s = fixture::snapshot({fixture::bug({.id = 1}), fixture::bug({.id = 2, .duplicate_of = 1}),
                                fixture::bug({.id = 3, .duplicate_of = 2})});
    auto c = resolve_duplicate_masters(s);
    o.require(c.master_of.at(2) == 1 && c.master_of.at(3) == 1, "chain example masters");
    o.require(c.clusters.size() == 1 && c.clusters.at(1) == std::set<BugId>{2, 3}, "chain example cluster");

    Rng rng(2);
    int wrong = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      auto forest = random_forest(rng, 6);
      auto expected = oracle::masters(oracle::links_of(forest));
      if (!expected || resolve_duplicate_masters(forest).master_of != *expected) ++wrong;
    }
    o.require(wrong == 0, std::to_string(wrong) + " forests differ from the closure oracle");

    int missed = 0;
    for (int trial = 0; trial < 200; ++trial) {
      auto forest = random_forest(rng, 6);
      // Close a loop: point some bug back at a bug on or below its own chain.
      std::vector<BugId> ids;
      for (const auto& [id, b] : forest.bugs) ids.push_back(id);
      const BugId from = ids[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(ids.size()) - 1))];
      BugId root = from;
      while (forest.bugs.at(root).duplicate_of) root = *forest.bugs.at(root).duplicate_of;
      if (root == from) {
        forest.bugs.at(from).duplicate_of = std::nullopt;
        const BugId extra = ids.back() + 1;
        fixture::BugSpec spec{.id = extra, .duplicate_of = from};
        forest.bugs.emplace(extra, fixture::bug(spec));
        forest.bugs.at(from).duplicate_of = extra;
      } else {
        forest.bugs.at(root).duplicate_of = from;
      }
      try {
        resolve_duplicate_masters(forest);
        ++missed;
      } catch (const CycleError&) {
      }
    }
    o.require(missed == 0, std::to_string(missed) + " injected cycles not reported");
  });

  criterion(3, "attribute oracle equivalence on a 10-product fixture", 0, [](Outcome& o) {
    SynthSpec spec;
    spec.seed = 2718;
    spec.products = 10;
    spec.min_bugs = 30;
    spec.max_bugs = 90;
    spec.tag_rate = 0.25;
    spec.reopen_rate = 0.25;
    spec.unassigned_rate = 0.15;
    auto snapshot = generate(spec).snapshot;
    auto marks = classify_debt(snapshot);
    auto rows = aggregate_all(snapshot, marks, resolve_duplicate_masters(snapshot));
    auto want = oracle::attributes(snapshot);
    o.require(rows.size() == 10 && want.size() == 10, "expected 10 products");
    for (std::size_t i = 0; i < std::min(rows.size(), want.size()); ++i) {
      o.require(rows[i].key == want[i].key && rows[i].n_bugs == want[i].n_bugs, "key or n_bugs");
      for (std::size_t t = 0; t < 3; ++t) {
        o.require(rows[i].per_type[t].count == want[i].per_type[t].count, "count");
        o.require(std::fabs(rows[i].per_type[t].frequency - want[i].per_type[t].frequency) <= 1e-10, "freq");
        o.require(std::fabs(rows[i].per_type[t].time - want[i].per_type[t].time) <= 1e-10, "time");
      }
      o.require(std::fabs(rows[i].avg_fix_time - want[i].avg_fix_time) <= 1e-10, "avg_fix_time");
    }
  });

  criterion(4, "pearson and correlation bands", 0, [](Outcome& o) {
    Rng rng(4);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto n = static_cast<std::size_t>(rng.integer(3, 80));
      std::vector<double> x(n), y(n);
      const double mix = rng.uniform(-2, 2);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform(-50, 50);
        y[i] = mix * x[i] + rng.uniform(-50, 50);
      }
      worst = std::max(worst, std::fabs(pearson(x, y) - oracle::pearson(x, y)));
    }
    o.require(worst <= 1e-10, "pearson deviates from the oracle by " + std::to_string(worst));

    for (int i = 0; i <= 10000; ++i) {
      const double r = -1.0 + i * 2.0 / 10000.0;
      const double a = std::fabs(r);
      const int bands = (a <= 0.1) + (a > 0.1 && a <= 0.3) + (a > 0.3 && a <= 0.5) + (a > 0.5 && a <= 1.0);
      const auto got = classify_level(r);
      const auto want = a <= 0.1   ? CorrelationLevel::None
                        : a <= 0.3 ? CorrelationLevel::Weak
                        : a <= 0.5 ? CorrelationLevel::Modest
                                   : CorrelationLevel::Strong;
      o.require(bands == 1 && got.level == want, "grid point " + std::to_string(r));
    }
    o.require(classify_level(0.804) == LevelAndSign{CorrelationLevel::Strong, CorrelationSign::Positive},
              "0.804");
    o.require(classify_level(-0.3) == LevelAndSign{CorrelationLevel::Weak, CorrelationSign::Negative},
              "-0.3");
    o.require(classify_level(0.05).level == CorrelationLevel::None, "0.05");
  });

  criterion(5, "least squares exactness", 0, [](Outcome& o) {
    Rng rng(5);
    const auto w = planted_weights();
    auto data = make_dataset(200, rng, [&](const Eigen::VectorXd& x) { return w.dot(x) + 3.0; }, 0.0);
    auto model = train_linear(data);
    const auto& m = std::get<LinearModel>(model.params);
    o.require((m.weights - w).cwiseAbs().maxCoeff() <= 1e-6 && std::fabs(m.intercept - 3.0) <= 1e-6,
              "planted coefficients not recovered");

    for (int trial = 0; trial < 20; ++trial) {
      auto noisy = make_dataset(rng.integer(12, 200), rng,
                                [&](const Eigen::VectorXd& x) { return w.dot(x) + 3.0; }, 2.0);
      auto fit = train_linear(noisy);
      const auto& lm = std::get<LinearModel>(fit.params);
      std::vector<std::vector<double>> x;
      std::vector<double> y;
      for (Eigen::Index i = 0; i < noisy.rows(); ++i) {
        x.emplace_back(noisy.features.row(i).begin(), noisy.features.row(i).end());
        y.push_back(noisy.target(i));
      }
      auto beta = oracle::normal_equations(x, y);
      double diff = std::fabs(lm.intercept - beta[0]);
      for (int j = 0; j < 9; ++j) diff = std::max(diff, std::fabs(lm.weights(j) - beta[std::size_t(j) + 1]));
      o.require(diff <= 1e-8, "normal-equation mismatch " + std::to_string(diff));
    }
  });

  criterion(6, "MLP gradient check", 0, [](Outcome& o) {
    Rng rng(6);
    Eigen::MatrixXd x(5, 9);
    Eigen::VectorXd y(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 9; ++j) x(i, j) = rng.normal();
      y(i) = rng.normal();
    }
    double worst = 0;
    for (int point = 0; point < 3; ++point) {
      MlpParameters p;
      p.hidden_weights = Eigen::MatrixXd::Zero(8, 9);
      p.hidden_bias = Eigen::VectorXd::Zero(8);
      p.output_weights = Eigen::VectorXd::Zero(8);
      Eigen::VectorXd flat(p.size());
      for (auto& v : flat) v = rng.normal();
      p.assign(flat);
      const auto analytic = mlp_loss_and_gradient(p, x, y).gradient;
      for (Eigen::Index i = 0; i < flat.size(); ++i) {
        const double h = 1e-6;
        MlpParameters up = p, down = p;
        Eigen::VectorXd fu = flat, fd = flat;
        fu(i) += h;
        fd(i) -= h;
        up.assign(fu);
        down.assign(fd);
        const double numeric =
            (mlp_loss_and_gradient(up, x, y).loss - mlp_loss_and_gradient(down, x, y).loss) / (2 * h);
        const double scale = std::max({std::fabs(numeric), std::fabs(analytic(i)), 1e-6});
        worst = std::max(worst, std::fabs(numeric - analytic(i)) / scale);
      }
    }
    o.require(worst <= 1e-4, "relative gradient error " + std::to_string(worst));
  });

  criterion(7, "root relative squared error", 0, [](Outcome& o) {
    Rng rng(7);
    Eigen::VectorXd a(25);
    for (auto& v : a) v = rng.uniform(-10, 10);
    o.require(rrse(a, a) == 0.0, "perfect prediction");
    o.require(rrse(Eigen::VectorXd::Constant(25, a.mean()), a) == 100.0, "mean prediction");
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto n = static_cast<std::size_t>(rng.integer(2, 60));
      std::vector<double> p(n), q(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = rng.uniform(-100, 100);
        q[i] = rng.uniform(-100, 100);
      }
      using Map = Eigen::Map<const Eigen::VectorXd>;
      const auto len = static_cast<Eigen::Index>(n);
      worst = std::max(worst, std::fabs(rrse(Map(p.data(), len), Map(q.data(), len)) - oracle::rrse(p, q)));
    }
    o.require(worst <= 1e-10, "formula mismatch " + std::to_string(worst));
  });

  criterion(8, "cross-validation pipeline", 60, [](Outcome& o) {
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
      const auto n = static_cast<std::size_t>(rng.integer(10, 300));
      auto folds = kfold_split(n, 10, rng.next());
      std::vector<int> seen(n, 0);
      std::size_t lo = n, hi = 0;
      bool disjoint = true;
      for (const auto& f : folds) {
        std::set<std::size_t> train(f.train.begin(), f.train.end());
        for (auto i : f.test) {
          ++seen[i];
          disjoint = disjoint && !train.count(i);
        }
        disjoint = disjoint && train.size() + f.test.size() == n;
        lo = std::min(lo, f.test.size());
        hi = std::max(hi, f.test.size());
      }
      const bool exhaustive = std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
      o.require(folds.size() == 10 && disjoint && exhaustive && hi - lo <= 1,
                "bad partition at n=" + std::to_string(n));
    }

    const auto w = planted_weights();
    auto data = make_dataset(200, rng, [&](const Eigen::VectorXd& x) { return w.dot(x) + 3.0; }, 0.5);
    auto mean_predictor = [](const Dataset& d) {
      return TrainedModel{LinearModel{Eigen::VectorXd::Zero(d.cols()), d.target.mean()}, d.cols(), 0};
    };
    auto baseline = cross_validate(data, mean_predictor, 10, 1);
    o.require(baseline.rrse_percent >= 95.0 && baseline.rrse_percent <= 110.0,
              "mean baseline rrse " + std::to_string(baseline.rrse_percent));
    auto linear = cross_validate(data, ModelKind::Linear, 10, 1);
    o.require(linear.correlation_coefficient >= 0.95, "linear r " + std::to_string(linear.correlation_coefficient));
    o.require(linear.rrse_percent <= 35.0, "linear rrse " + std::to_string(linear.rrse_percent));
  });

  criterion(9, "learner ranking on constructed corpora", 0, [](Outcome& o) {
    Rng rng(9);
    auto two_regime = make_dataset(
        200, rng,
        [](const Eigen::VectorXd& x) { return x(0) < 0.5 ? 5 + 20 * x(1) : 40 - 30 * x(1) + 10 * x(2); },
        0.3);
    const double tree = cross_validate(two_regime, ModelKind::ModelTree, 10, 1).rrse_percent;
    const double line = cross_validate(two_regime, ModelKind::Linear, 10, 1).rrse_percent;
    o.require(tree < line, "two-regime: tree " + std::to_string(tree) + " vs linear " + std::to_string(line));

    // Purely linear corpus straight from the generator and pipeline.
    SynthSpec spec;
    spec.seed = 9;
    spec.products = 200;
    spec.fix_time.noise_sigma = 1.0;
    auto synth = generate(spec);
    auto marks = classify_debt(synth.snapshot);
    auto rows = aggregate_all(synth.snapshot, marks, resolve_duplicate_masters(synth.snapshot));
    auto corpus = Dataset::from_rows(filter_products(rows));
    double best_other = 1e300, linear = 0;
    for (auto kind : {ModelKind::Linear, ModelKind::ModelTree, ModelKind::Mlp}) {
      const double e = cross_validate(corpus, kind, 10, 1).rrse_percent;
      if (kind == ModelKind::Linear) {
        linear = e;
      } else {
        best_other = std::min(best_other, e);
      }
    }
    o.require(linear < best_other,
              "linear corpus: linear " + std::to_string(linear) + " vs best other " + std::to_string(best_other));
  });

  criterion(10, "pipeline determinism", 0, [](Outcome& o) {
    auto run = [](const fs::path& dir) {
      fs::remove_all(dir);
      fs::create_directories(dir);
      auto p = [&](const std::string& f) { return (dir / f).string(); };
      std::ostringstream sink;
      std::vector<std::vector<std::string>> steps = {
          {"synth", "--seed", "10", "--products", "60", "--noise", "2", "--out", p("bugs.jsonl")},
          {"identify", "--in", p("bugs.jsonl"), "--out", p("debt.jsonl")},
          {"features", "--in", p("bugs.jsonl"), "--debt", p("debt.jsonl"), "--out", p("f.csv")},
          {"correlate", "--in", p("f.csv"), "--out", p("corr.json"), "--csv", p("corr.csv")},
          {"train", "--in", p("f.csv"), "--model", "linear", "--out", p("linear.json"), "--metrics", p("linear_m.json")},
          {"train", "--in", p("f.csv"), "--model", "mtree", "--out", p("mtree.json"), "--metrics", p("mtree_m.json")},
          {"train", "--in", p("f.csv"), "--model", "mlp", "--out", p("mlp.json"), "--metrics", p("mlp_m.json")}};
      int worst = 0;
      for (const auto& step : steps) worst = std::max(worst, run_cli(step, sink, sink));
      return worst;
    };
    const auto base = fs::temp_directory_path() / "debtbugs_acceptance";
    o.require(run(base / "a") == 0 && run(base / "b") == 0, "a pipeline step failed");
    for (const auto& f : {"bugs.jsonl", "ground_truth.json", "debt.jsonl", "f.csv", "corr.json", "corr.csv",
                          "linear.json", "linear_m.json", "mtree.json", "mtree_m.json", "mlp.json", "mlp_m.json"}) {
      const auto a = slurp((base / "a" / f).string());
      o.require(!a.empty() && a == slurp((base / "b" / f).string()), std::string(f) + " differs");
    }
    fs::remove_all(base);
  });

  criterion(11, "product filter boundary", 0, [](Outcome& o) {
    std::vector<ProductAttributes> rows(2);
    rows[0].key = {"Small", "trunk"};
    rows[0].n_bugs = 99;
    rows[1].key = {"Edge", "trunk"};
    rows[1].n_bugs = 100;
    auto kept = filter_products(rows);
    o.require(kept.size() == 1 && kept[0].n_bugs == 100, "99 dropped, 100 kept");
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}

#include "debtbugs/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "debtbugs/error.hpp"
#include "debtbugs/random.hpp"
#include "json.hpp"

namespace debtbugs {

namespace {

using namespace std::chrono;

constexpr std::array<const char*, 12> kProductNames = {
    "Core",     "Firefox",  "Thunderbird", "SeaMonkey", "Toolkit", "Calendar",
    "Camino",   "Bugzilla", "NSS",         "NSPR",      "Rhino",   "Tamarin"};

constexpr std::array<const char*, 16> kFiller = {
    "the",    "crash",  "when",   "loading", "layer",   "plugin", "patch",  "review",
    "needs",  "window", "render", "event",   "timeout", "fails",  "again",  "works"};

// Tokens that look like tags but are not whole-token, case-sensitive hits.
constexpr std::array<const char*, 9> kNearMisses = {
    "todos", "TODOs", "FIXMEd", "XXXL", "_TODO", "todo", "fixme", "TODO_list", "xxx"};

constexpr std::array<const char*, 3> kKeywords = {"TODO", "FIXME", "XXX"};

struct PlannedBug {
  BugId id = 0;
  std::optional<BugId> duplicate_of;
  BugId master = 0;
  int tag_hits = 0;
  int reopens = 0;
  bool assigned = true;
  std::int64_t days = 0;
  DebtTypes types;
};

std::string pick(Rng& rng, const auto& words) {
  return words[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(words.size()) - 1))];
}

// Appends filler words (and occasionally a near-miss) to `body`.
void append_filler(Rng& rng, std::string& body, int words) {
  for (int w = 0; w < words; ++w) {
    if (!body.empty()) body += ' ';
    body += rng.bernoulli(0.08) ? pick(rng, kNearMisses) : pick(rng, kFiller);
  }
}

std::string actor(Rng& rng) {
  return "dev" + std::to_string(rng.integer(1, 40)) + "@example.org";
}

std::optional<std::string> maybe_actor(Rng& rng) {
  if (rng.bernoulli(0.1)) return std::nullopt;
  return actor(rng);
}

Timestamp between(Rng& rng, Timestamp lo, Timestamp hi) {
  const auto span = (hi - lo).count();
  return lo + seconds{span > 0 ? rng.integer(0, span) : 0};
}

}  // namespace

void SynthSpec::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(tag_rate) || !rate_ok(reopen_rate) || !rate_ok(duplicate_rate) ||
      !rate_ok(unassigned_rate)) {
    throw ContractError("synth: rates must lie in [0, 1]");
  }
  if (products == 0) throw ContractError("synth: need at least one product");
  if (min_bugs < 1 || max_bugs < min_bugs) throw ContractError("synth: invalid bug-count bounds");
  if (min_cluster < 2 || max_cluster < min_cluster) {
    throw ContractError("synth: cluster sizes must be >= 2");
  }
  if (max_tag_hits < 1 || max_reopens < 1 || max_chain_depth < 1) {
    throw ContractError("synth: per-bug maxima must be positive");
  }
  if (!(fix_time.noise_sigma >= 0.0)) throw ContractError("synth: noise sigma must be >= 0");
  if (!(max_debt_days >= 0.0)) throw ContractError("synth: max_debt_days must be >= 0");
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SynthResult result;
  result.snapshot.source_description = "synthetic seed=" + std::to_string(spec.seed);

  BugId next_id = 1;
  std::vector<std::pair<ProductAttributes, double>> truth;

  for (std::size_t p = 0; p < spec.products; ++p) {
    ProductKey key;
    key.name = kProductNames[p % kProductNames.size()];
    const auto generation = p / kProductNames.size();
    key.version = generation == 0 ? "trunk" : std::to_string(generation) + ".0";

    const auto n = rng.integer(spec.min_bugs, spec.max_bugs);
    std::vector<PlannedBug> bugs(static_cast<std::size_t>(n));
    for (auto& b : bugs) b.id = next_id++;

    // Duplicate clusters, each a small forest of chains hanging off a master.
    std::vector<std::size_t> order(bugs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const auto dup_target = static_cast<std::int64_t>(std::llround(spec.duplicate_rate * static_cast<double>(n)));
    std::int64_t dups = 0;
    std::size_t pos = 0;
    while (dups < dup_target && pos + 2 <= order.size()) {
      auto size = rng.integer(spec.min_cluster, spec.max_cluster);
      size = std::min<std::int64_t>({size, static_cast<std::int64_t>(order.size() - pos),
                                     dup_target - dups + 1});
      auto& master = bugs[order[pos]];
      std::vector<std::pair<std::size_t, int>> members = {{order[pos], 0}};
      for (std::int64_t m = 1; m < size; ++m) {
        std::vector<std::size_t> parents;
        for (std::size_t c = 0; c < members.size(); ++c) {
          if (members[c].second < spec.max_chain_depth) parents.push_back(c);
        }
        const auto& parent = members[parents[static_cast<std::size_t>(
            rng.integer(0, static_cast<std::int64_t>(parents.size()) - 1))]];
        auto& dup = bugs[order[pos + static_cast<std::size_t>(m)]];
        dup.duplicate_of = bugs[parent.first].id;
        dup.master = master.id;
        dup.types.insert(DebtType::Duplicate);
        members.emplace_back(order[pos + static_cast<std::size_t>(m)], parent.second + 1);
      }
      dups += size - 1;
      pos += static_cast<std::size_t>(size);
    }

    std::array<double, 3> pace{};
    for (auto& v : pace) v = rng.uniform(1.0, std::max(1.0, spec.max_debt_days));

    for (auto& b : bugs) {
      if (rng.bernoulli(spec.tag_rate)) {
        b.tag_hits = static_cast<int>(rng.integer(1, spec.max_tag_hits));
        b.types.insert(DebtType::Tag);
      }
      if (rng.bernoulli(spec.reopen_rate)) {
        b.reopens = static_cast<int>(rng.integer(1, spec.max_reopens));
        b.types.insert(DebtType::Reopened);
      }
      b.assigned = !rng.bernoulli(spec.unassigned_rate);
      if (b.assigned && !b.types.empty()) {
        DebtType first = DebtType::Duplicate;
        for (auto t : kDebtTypes) {
          if (b.types.contains(t)) {
            first = t;
            break;
          }
        }
        const double mean = pace[static_cast<int>(first)];
        b.days = rng.integer(0, static_cast<std::int64_t>(std::llround(2.0 * mean)));
      }
    }

    // Planted attributes, computed from the bookkeeping above.
    std::map<BugId, std::size_t> cluster_size;
    for (const auto& b : bugs) {
      if (b.duplicate_of) ++cluster_size[b.master];
    }
    ProductAttributes row;
    row.key = key;
    row.n_bugs = n;
    std::array<double, 3> freq_sum{}, time_sum{};
    std::array<std::int64_t, 3> timed{};
    std::int64_t debt_days = 0, n_timed = 0;
    std::vector<PlannedBug*> pristine;
    for (auto& b : bugs) {
      if (b.assigned) {
        ++n_timed;
        if (b.types.empty()) pristine.push_back(&b);
        else debt_days += b.days;
      }
      for (auto t : kDebtTypes) {
        if (!b.types.contains(t)) continue;
        const auto ti = static_cast<std::size_t>(t);
        ++row[t].count;
        freq_sum[ti] += t == DebtType::Tag        ? b.tag_hits
                        : t == DebtType::Reopened ? b.reopens
                                                  : static_cast<double>(cluster_size[b.master]);
        if (b.assigned) {
          time_sum[ti] += static_cast<double>(b.days);
          ++timed[ti];
        }
      }
    }
    for (auto t : kDebtTypes) {
      const auto ti = static_cast<std::size_t>(t);
      if (row[t].count > 0) row[t].frequency = freq_sum[ti] / static_cast<double>(row[t].count);
      if (timed[ti] > 0) row[t].time = time_sum[ti] / static_cast<double>(timed[ti]);
    }

    const auto feats = row.features();
    double target = spec.fix_time.base_days;
    for (std::size_t j = 0; j < kNumAttributes; ++j) target += spec.fix_time.coefficients[j] * feats[j];
    if (spec.fix_time.noise_sigma > 0.0) target += spec.fix_time.noise_sigma * rng.normal();

    // Pristine bugs absorb whatever total the target requires.
    std::int64_t remaining =
        std::llround(target * static_cast<double>(n_timed)) - debt_days;
    if (pristine.empty() || remaining < 0) remaining = 0;
    if (!pristine.empty()) {
      std::vector<double> weights(pristine.size());
      double total_w = 0.0;
      for (auto& w : weights) total_w += (w = rng.uniform(0.2, 1.8));
      std::int64_t given = 0;
      for (std::size_t i = 0; i < pristine.size(); ++i) {
        pristine[i]->days = static_cast<std::int64_t>(
            std::floor(static_cast<double>(remaining) * weights[i] / total_w));
        given += pristine[i]->days;
      }
      for (std::size_t i = 0; given < remaining; i = (i + 1) % pristine.size(), ++given) {
        ++pristine[i]->days;
      }
      debt_days += remaining;
    }
    if (n_timed > 0) row.avg_fix_time = static_cast<double>(debt_days) / static_cast<double>(n_timed);
    truth.emplace_back(row, target);

    // Materialize the records.
    const auto epoch = sys_days{year{1998} / 1 / 1} + days{rng.integer(0, 12 * 365)};
    for (const auto& b : bugs) {
      BugRecord rec;
      rec.bug_id = b.id;
      rec.product = key;
      rec.summary = "synthetic bug " + std::to_string(b.id);
      rec.duplicate_of = b.duplicate_of;

      const Timestamp created = Timestamp{epoch + days{rng.integer(0, 365)}} +
                                seconds{rng.integer(0, 86399)};
      Timestamp start = created;
      if (b.assigned) {
        const Timestamp assigned = created + seconds{rng.integer(0, 3 * 86400)};
        rec.assigned_date = assigned;
        rec.last_change_date =
            Timestamp{utc_day(assigned) + days{b.days}} + seconds{rng.integer(0, 86399)};
        if (rec.last_change_date < assigned) rec.last_change_date = assigned;
        start = assigned;
      } else {
        rec.last_change_date = created + days{rng.integer(0, 400)} + seconds{rng.integer(0, 86399)};
      }

      std::vector<Status> statuses = {Status::New};
      if (b.assigned) statuses.push_back(Status::Assigned);
      statuses.push_back(Status::Resolved);
      for (int r = 0; r < b.reopens; ++r) {
        statuses.push_back(Status::Reopened);
        statuses.push_back(Status::Resolved);
      }
      if (rng.bernoulli(0.5)) statuses.push_back(Status::Verified);
      const auto span = (rec.last_change_date - start).count();
      for (std::size_t i = 0; i < statuses.size(); ++i) {
        StatusEvent ev;
        if (i == 0) {
          ev.ts = created;
        } else {
          const auto steps = static_cast<std::int64_t>(statuses.size() - 1);
          ev.ts = start + seconds{span * static_cast<std::int64_t>(i) / steps};
        }
        ev.status = statuses[i];
        ev.actor = maybe_actor(rng);
        rec.status_history.push_back(std::move(ev));
      }

      const auto n_comments = static_cast<int>(rng.integer(1, 4));
      std::vector<Timestamp> comment_ts(static_cast<std::size_t>(n_comments));
      for (auto& ts : comment_ts) ts = between(rng, created, rec.last_change_date);
      std::sort(comment_ts.begin(), comment_ts.end());

      DebtMark mark;
      mark.bug_id = b.id;
      mark.types = b.types;
      mark.reopen_count = b.reopens;
      if (b.duplicate_of) mark.master_id = b.master;
      // Hits are planted left to right, so the recorded spans come out sorted.
      std::vector<int> hit_comment(static_cast<std::size_t>(b.tag_hits));
      for (auto& c : hit_comment) c = static_cast<int>(rng.integer(0, n_comments - 1));
      std::sort(hit_comment.begin(), hit_comment.end());
      std::size_t h = 0;
      for (int c = 0; c < n_comments; ++c) {
        std::string body;
        append_filler(rng, body, static_cast<int>(rng.integer(2, 8)));
        while (h < hit_comment.size() && hit_comment[h] == c) {
          const std::string keyword = pick(rng, kKeywords);
          body += ' ';
          const auto begin = body.size();
          body += keyword;
          mark.tag_hits.push_back({c, keyword, begin, body.size(), false});
          body += rng.bernoulli(0.5) ? ": " : " ";
          append_filler(rng, body, static_cast<int>(rng.integer(1, 5)));
          ++h;
        }
        Comment comment;
        comment.index = c;
        comment.ts = comment_ts[static_cast<std::size_t>(c)];
        comment.author = maybe_actor(rng);
        comment.body = std::move(body);
        rec.comments.push_back(std::move(comment));
      }

      result.marks.emplace(b.id, std::move(mark));
      result.snapshot.bugs.emplace(b.id, std::move(rec));
    }
  }

  std::sort(truth.begin(), truth.end(),
            [](const auto& a, const auto& b) { return a.first.key < b.first.key; });
  for (auto& [row, target] : truth) {
    result.products.push_back(std::move(row));
    result.model_target.push_back(target);
  }
  return result;
}

std::string ground_truth_to_json(const SynthResult& result, const SynthSpec& spec) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json out;
  out["seed"] = spec.seed;
  auto marks = ordered_json::array();
  for (const auto& [id, mark] : result.marks) {
    if (mark.types.empty()) continue;
    marks.push_back(ordered_json::parse(debt_mark_to_json_line(mark)));
  }
  out["marks"] = std::move(marks);
  auto products = ordered_json::array();
  for (std::size_t i = 0; i < result.products.size(); ++i) {
    const auto& row = result.products[i];
    ordered_json p;
    p["product"] = row.key.name;
    p["version"] = row.key.version;
    p["n_bugs"] = row.n_bugs;
    const auto feats = row.features();
    for (std::size_t j = 0; j < kNumAttributes; ++j) p[std::string(kAttributeNames[j])] = feats[j];
    p["avg_fix_time"] = row.avg_fix_time;
    p["model_target"] = result.model_target[i];
    products.push_back(std::move(p));
  }
  out["products"] = std::move(products);
  return out.dump(2) + '\n';
}

}  // namespace debtbugs

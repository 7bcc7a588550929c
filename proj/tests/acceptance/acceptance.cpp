// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "revmatch/pipeline.hpp"
#include "revmatch/util/io.hpp"
#include "revmatch/util/rng.hpp"
#include "support/builders.hpp"
#include "support/mmoe_oracle.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace revmatch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(REVMATCH_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

const fs::path kConfig = fs::path(REVMATCH_SOURCE_DIR) / "configs" / "synthetic.conf";

// ------------------------------------------------------------------ 1

Outcome gradient_check() {
  const auto t0 = Clock::now();
  const int n_configs = 24;
  double worst = 0.0;
  for (int i = 0; i < n_configs; ++i) {
    const oracle::GradCheckCase c = oracle::random_case(static_cast<std::uint64_t>(5000 + i));
    worst = std::max({worst, oracle::max_gradient_error(c, Objective::kConfidence),
                      oracle::max_gradient_error(c, Objective::kRanking)});
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 60.0, std::to_string(n_configs) + " configs, max relative error " +
                                        sci(worst) + ", " + fmt(t, 1) + " s"};
}

// ------------------------------------------------------------------ 2

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  Rng rng(7);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng.between(1, 10));
    const int n_gt = static_cast<int>(rng.between(1, std::min(4, n)));
    std::vector<ScoredCandidate> c;
    for (int i = 0; i < n; ++i) {
      c.push_back({testing::gid("S" + std::to_string(rng.below(100))), static_cast<double>(rng.below(5)) / 4.0,
                   i < n_gt});
    }
    const oracle::Metrics want = oracle::ranking_metrics(oracle::ordered_relevance(c));
    sort_ranking(c);
    const RankingMetrics got = task3_ranking_metrics(c);
    for (auto [a, b] : {std::pair{got.average_precision, want.ap}, {got.r_precision, want.r_prec},
                        {got.reciprocal_rank, want.rr}, {got.ndcg, want.ndcg}, {got.success_at_5, want.success5}}) {
      worst = std::max(worst, std::abs(a - b));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 10.0, "200 instances, max deviation " + sci(worst) + ", " + fmt(t, 2) + " s"};
}

// ------------------------------------------------------------------ 3

bool blocks_equal(const MmoeParams& a, const MmoeParams& b, const std::function<bool(ParamGroup)>& which) {
  MmoeParams x = a, y = b;
  const auto px = oracle::flat_params(x), py = oracle::flat_params(y);
  std::vector<ParamGroup> groups;
  for_each_block(x, [&](ParamGroup g, const std::string&, auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) groups.push_back(g);
  });
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (which(groups[i]) && std::bit_cast<std::uint64_t>(*px[i]) != std::bit_cast<std::uint64_t>(*py[i])) return false;
  }
  return true;
}

Outcome freezing() {
  Rng rng(3);
  TrainingData data;
  const int in = 6, n = 120;
  data.features = Eigen::MatrixXd(in, n);
  for (int j = 0; j < n; ++j) {
    const int y = j % 3 == 0;
    for (int i = 0; i < in; ++i) data.features(i, j) = (y ? 0.8 : -0.4) + rng.normal();
    data.labels.push_back(y);
  }
  for (int j = 0; j + 1 < n; j += 3) data.ranking_pairs.emplace_back(j, j + 1);
  MmoeModel model = init_model({in, 8, 6, 4}, 3, 11);
  const MmoeModel initial = model;
  TrainConfig cfg;
  cfg.epochs_total = 10;
  cfg.stage_boundary = 5;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.05;
  MmoeModel after_stage1;
  train_two_stage(model, data, cfg, [&](const EpochLoss& e, const MmoeModel& m) {
    if (e.epoch == cfg.stage_boundary) after_stage1 = m;
  });
  auto ranking_block = [](ParamGroup g) { return g == ParamGroup::kRankingGate || g == ParamGroup::kRankingTower; };
  auto other_block = [&](ParamGroup g) { return !ranking_block(g); };
  const bool stage1_frozen = blocks_equal(initial.params, after_stage1.params, ranking_block);
  const bool stage2_frozen = blocks_equal(after_stage1.params, model.params, other_block);
  // Guard against a trainer that moves nothing at all.
  const bool stage1_moved = !blocks_equal(initial.params, after_stage1.params, other_block);
  const bool stage2_moved = !blocks_equal(after_stage1.params, model.params, ranking_block);
  return {stage1_frozen && stage2_frozen && stage1_moved && stage2_moved,
          std::string("ranking blocks after stage 1 ") + (stage1_frozen ? "unchanged" : "CHANGED") +
              ", shared and confidence blocks after stage 2 " + (stage2_frozen ? "unchanged" : "CHANGED")};
}

// ------------------------------------------------------------------ 4

Outcome linkage() {
  const auto t0 = Clock::now();
  std::size_t false_merges = 0, disagreements = 0, linked = 0, largest = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const LinkageFixture f = generate_linkage_fixture(60 + 2 * seed, seed);
    largest = std::max({largest, f.source_a.scholars().size(), f.source_b.scholars().size()});
    const LinkTable t = link_sources(f.source_a, f.source_b);
    std::set<std::pair<SourceId, SourceId>> got;
    for (const LinkEntry& e : t.entries) {
      got.emplace(e.left, e.right);
      false_merges += !f.planted.count({e.left, e.right});
    }
    disagreements += got != oracle::link_all_pairs(f.source_a, f.source_b);
    linked += got.size();
  }
  const double t = seconds_since(t0);
  return {false_merges == 0 && disagreements == 0 && largest <= 200 && t < 30.0,
          "50 fixtures (largest side " + std::to_string(largest) + " scholars), " + std::to_string(linked) +
              " links, " + std::to_string(disagreements) + " oracle disagreements, " + std::to_string(false_merges) +
              " false merges, " + fmt(t, 1) + " s"};
}

// ------------------------------------------------------------------ 5

std::vector<ReviewRecord> load_records(const fs::path& path) {
  std::vector<ReviewRecord> out;
  read_jsonl(path, [&](const json& j, std::size_t) { out.push_back(j.get<ReviewRecord>()); });
  return out;
}

Outcome pool_soundness(const fs::path& stages) {
  const Taxonomy taxonomy = load_taxonomy(default_taxonomy_path());
  const Corpus corpus = load_corpus(stages / "link");
  AssignmentMap assignments;
  for (const SubjectAssignment& a : load_assignments(stages / "classify" / "assignments.jsonl")) {
    assignments[a.publication_id] = a;
  }
  std::map<SourceId, ScholarSubjects> subjects;
  for (ScholarSubjects& s : build_scholar_subjects(corpus, assignments)) subjects[s.scholar_id] = std::move(s);

  const std::vector<ReviewRecord> records = load_records(stages / "build-pools" / "records.jsonl");
  std::size_t sound = 0;
  for (const ReviewRecord& r : records) {
    std::set<std::string> target = descendants(r.l3_category, taxonomy);
    target.insert(r.l3_category);
    auto in_target = [&](const SourceId& id) {
      int n = 0;
      for (const std::string& c : target) n += subjects.at(id).count_in(c);
      return n;
    };
    bool ok = !r.unqualified_ids.empty() && !r.potential_ids.empty();
    for (const SourceId& id : r.unqualified_ids) ok = ok && in_target(id) == 0;
    for (const SourceId& id : r.potential_ids) ok = ok && in_target(id) >= 1;
    const std::set<SourceId> u(r.unqualified_ids.begin(), r.unqualified_ids.end());
    for (const SourceId& id : r.potential_ids) ok = ok && !u.count(id);
    sound += ok;
  }
  return {!records.empty() && sound == records.size() && records.size() == 200,
          std::to_string(sound) + " of " + std::to_string(records.size()) + " records sound"};
}

// ------------------------------------------------------------------ 6, 7

struct Scores {
  double rrc, ucc, ndcg, tfidf_ndcg;
  std::size_t n_records;
};

Scores read_scores(const fs::path& stages) {
  const json j = json::parse(read_file(stages / "report" / "report.json"));
  return {j["mmoe"]["rrc"], j["mmoe"]["ucc"], j["mmoe"]["ndcg"], j["tfidf"]["ndcg"], j["mmoe"]["n_records"]};
}

Outcome end_to_end(const fs::path& stages, double seconds, int status) {
  if (status != 0) return {false, "pipeline exited with status " + std::to_string(status)};
  const Scores s = read_scores(stages);
  const bool ok = s.rrc - s.ucc >= 0.3 && s.ndcg >= s.tfidf_ndcg + 0.05 && seconds < 300.0;
  return {ok, "RRC " + fmt(s.rrc) + " - UCC " + fmt(s.ucc) + " = " + fmt(s.rrc - s.ucc) + ", NDCG " + fmt(s.ndcg) +
                  " vs TF-IDF " + fmt(s.tfidf_ndcg) + " over " + std::to_string(s.n_records) + " test records, " +
                  fmt(seconds, 1) + " s"};
}

Outcome ablation(const fs::path& stages, const fs::path& scratch) {
  const fs::path single = scratch / "one-expert";
  fs::copy(stages, single, fs::copy_options::recursive);
  const std::string args = "--config " + kConfig.string() + " --stage-dir " + single.string() +
                           " --set model.n_experts=1";
  for (const char* stage : {"train", "evaluate", "report"}) {
    const int status = run_cli(std::string(stage) + " " + args, scratch / "ablation.log");
    if (status != 0) return {false, std::string(stage) + " with one expert exited with status " + std::to_string(status)};
  }
  const double three = read_scores(stages).ndcg, one = read_scores(single).ndcg;
  return {three >= one, "NDCG with 3 experts " + fmt(three) + ", with 1 expert " + fmt(one)};
}

// ------------------------------------------------------------------ 8

Outcome calibration() {
  Rng rng(8);
  bool monotone = true;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> pos(rng.between(1, 20)), neg(rng.between(1, 20));
    for (double& v : pos) v = rng.uniform(0.0, 1.0);
    for (double& v : neg) v = rng.uniform(0.0, 1.0);
    const IsotonicCalibrator c = isotonic_calibrate(pos, neg);
    std::vector<double> queries(50);
    for (double& q : queries) q = rng.uniform(-0.2, 1.2);
    std::sort(queries.begin(), queries.end());
    for (std::size_t i = 1; i < queries.size(); ++i) monotone = monotone && c(queries[i - 1]) <= c(queries[i]);
  }
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.between(1, 12));
    std::vector<double> xs(n), ys(n), ws(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = static_cast<double>(i) + rng.uniform(0.0, 0.9);
      ys[i] = rng.below(3) == 0 ? static_cast<double>(rng.below(2)) : rng.uniform(0.0, 1.0);
    }
    const IsotonicCalibrator c = fit_isotonic(xs, ys);
    const std::vector<double> want = oracle::isotonic_brute_force(ys, ws);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(c(xs[i]) - want[i]));
  }
  return {monotone && worst <= 1e-9, std::string(monotone ? "monotone" : "NOT monotone") +
                                         " on 1000 fits, max deviation from brute force " + sci(worst)};
}

// ------------------------------------------------------------------ 9

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

Outcome determinism(const fs::path& first, const fs::path& second, int status) {
  if (status != 0) return {false, "second run exited with status " + std::to_string(status)};
  const auto a = tree_contents(first), b = tree_contents(second);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  return {differing == 0 && !a.empty(),
          std::to_string(a.size()) + " artifacts compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  testing::TempDir scratch;
  const fs::path run_a = scratch / "run-a", run_b = scratch / "run-b";
  const std::string base = "all --config " + kConfig.string() + " --stage-dir ";

  std::vector<std::pair<int, std::function<Outcome()>>> checks;
  checks.emplace_back(1, gradient_check);
  checks.emplace_back(2, metric_oracle);
  checks.emplace_back(3, freezing);
  checks.emplace_back(4, linkage);

  const auto t0 = Clock::now();
  const int status_a = run_cli(base + run_a.string(), scratch / "run-a.log");
  const double pipeline_seconds = seconds_since(t0);
  if (status_a != 0) std::cerr << read_file(scratch / "run-a.log");
  checks.emplace_back(5, [&] {
    return status_a == 0 ? pool_soundness(run_a) : Outcome{false, "pipeline failed"};
  });
  checks.emplace_back(6, [&] { return end_to_end(run_a, pipeline_seconds, status_a); });
  checks.emplace_back(7, [&] {
    return status_a == 0 ? ablation(run_a, scratch.path()) : Outcome{false, "pipeline failed"};
  });
  checks.emplace_back(8, calibration);
  checks.emplace_back(9, [&] {
    const int status_b = run_cli(base + run_b.string(), scratch / "run-b.log");
    return determinism(run_a, run_b, status_b);
  });

  int failures = 0;
  for (auto& [id, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

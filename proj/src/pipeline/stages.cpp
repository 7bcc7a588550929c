#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "revmatch/pipeline.hpp"
#include "revmatch/taxonomy.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/parallel.hpp"

namespace fs = std::filesystem;

namespace revmatch {
namespace {

constexpr const char* kCorpusFiles[] = {"publications.jsonl", "scholars.jsonl", "records.jsonl"};

// Bookkeeping for one stage run: declared inputs, the configuration slice
// that affects the outputs, and the manifest written at the end.
class StageRun {
 public:
  StageRun(const PipelineConfig& cfg, std::string name, json config_slice)
      : cfg_(cfg), name_(std::move(name)), dir_(cfg.stage_dir / name_), slice_(std::move(config_slice)) {}

  const fs::path& dir() const { return dir_; }

  /// Registers an input, failing with exit status 2 when it is absent.
  fs::path require(const fs::path& path, const std::string& key = "") {
    if (!fs::exists(path)) throw MissingArtifactError(path);
    inputs_[key.empty() ? relative_name(path) : key] = path;
    return path;
  }

  fs::path stage_input(const std::string& stage, const std::string& file) {
    return require(cfg_.stage_dir / stage / file);
  }

  void output(const std::string& file) { outputs_.push_back(file); }

  bool up_to_date() const {
    const fs::path mpath = dir_ / "manifest.json";
    if (!fs::exists(mpath)) return false;
    Manifest old;
    try {
      old = manifest_from_json(json::parse(read_file(mpath)));
    } catch (const std::exception&) {
      return false;
    }
    if (!(old.inputs == input_hashes() && old.seed == cfg_.seed && old.config_hash == config_hash())) return false;
    if (old.outputs.size() != outputs_.size()) return false;
    for (const std::string& f : outputs_) {
      auto it = old.outputs.find(f);
      if (it == old.outputs.end() || !fs::exists(dir_ / f) || file_sha256(dir_ / f) != it->second) return false;
    }
    return true;
  }

  void finish() const {
    Manifest m;
    m.stage = name_;
    m.seed = cfg_.seed;
    m.config_hash = config_hash();
    m.inputs = input_hashes();
    for (const std::string& f : outputs_) m.outputs[f] = file_sha256(dir_ / f);
    write_file_atomic(dir_ / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  }

 private:
  std::string relative_name(const fs::path& p) const {
    const fs::path rel = p.lexically_relative(cfg_.stage_dir);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return p.filename().generic_string();
  }
  std::map<std::string, std::string> input_hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, p] : inputs_) out[k] = file_sha256(p);
    return out;
  }
  std::string config_hash() const { return sha256_hex(slice_.dump()); }

  const PipelineConfig& cfg_;
  std::string name_;
  fs::path dir_;
  json slice_;
  std::map<std::string, fs::path> inputs_;
  std::vector<std::string> outputs_;
};

json provider_slice(const ProviderConfig& p) {
  // Only settings that change embeddings or summaries.
  return {{"endpoint", p.stub_mode ? "" : p.endpoint},
          {"model_name", p.model_name},
          {"chat_model_name", p.chat_model_name},
          {"stub_mode", p.stub_mode},
          {"stub_dim", p.stub_dim},
          {"embedding_dim", p.embedding_dim}};
}

ProviderConfig client_config(const PipelineConfig& cfg, bool cached) {
  ProviderConfig p = cfg.provider;
  p.cache_dir = cached ? cfg.effective_cache_dir() : fs::path();
  return p;
}

fs::path taxonomy_path(const PipelineConfig& cfg) {
  return cfg.taxonomy_path.empty() ? default_taxonomy_path() : cfg.taxonomy_path;
}

void require_corpus(StageRun& run, const fs::path& dir, const std::string& prefix) {
  for (const char* f : kCorpusFiles) run.require(dir / f, prefix + f);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += s + "\n";
  return out;
}

std::vector<ReviewRecord> load_records(const fs::path& p) {
  std::vector<ReviewRecord> out;
  read_jsonl(p, [&](const json& j, std::size_t) { out.push_back(j.get<ReviewRecord>()); });
  return out;
}

std::vector<ReviewRecord> select_records(const std::vector<ReviewRecord>& all, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const ReviewRecord*> by_id;
  for (const ReviewRecord& r : all) by_id[r.record_id()] = &r;
  std::vector<ReviewRecord> out;
  for (const std::string& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw std::runtime_error("split lists unknown record " + id);
    out.push_back(*it->second);
  }
  return out;
}

Taxonomy load_embedded_taxonomy(const PipelineConfig& cfg, const fs::path& tax_path, const fs::path& sidecar) {
  Taxonomy taxonomy = load_taxonomy(tax_path);
  ProviderClient client(client_config(cfg, false));
  const std::size_t n = load_node_embeddings(taxonomy, client.embedder_id(), sidecar);
  if (n != taxonomy.nodes().size()) {
    throw std::runtime_error("taxonomy embeddings in " + sidecar.string() + " do not match the taxonomy; rerun classify");
  }
  return taxonomy;
}

AssignmentMap load_assignment_map(const fs::path& p) {
  AssignmentMap out;
  for (SubjectAssignment& a : load_assignments(p)) out.emplace(a.publication_id, std::move(a));
  return out;
}

// ---------------------------------------------------------------------------

StageStatus stage_synth(const PipelineConfig& cfg) {
  json slice = {{"n_records", cfg.synth.n_records},
                {"n_categories", cfg.synth.n_categories},
                {"experts_per_category", cfg.synth.experts_per_category},
                {"residents_per_category", cfg.synth.residents_per_category},
                {"cross_per_category", cfg.synth.cross_per_category},
                {"registry_fraction", cfg.synth.registry_fraction},
                {"provider", provider_slice(cfg.provider)}};
  StageRun run(cfg, "synth", slice);
  const fs::path tax = run.require(taxonomy_path(cfg), "taxonomy.jsonl");
  for (const char* f : kCorpusFiles) run.output(f);
  if (run.up_to_date()) return StageStatus::kSkipped;

  Taxonomy taxonomy = load_taxonomy(tax);
  ProviderClient client(client_config(cfg, false));
  taxonomy.embed_nodes(client);
  SyntheticConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  const Corpus corpus = generate_synthetic_corpus(sc, taxonomy, client);
  save_corpus(corpus, run.dir());
  run.finish();
  spdlog::info("synth: {} publications, {} scholars, {} records", corpus.publications().size(),
               corpus.scholars().size(), corpus.records().size());
  return StageStatus::kRan;
}

StageStatus stage_ingest(const PipelineConfig& cfg) {
  StageRun run(cfg, "ingest", json::object());
  const fs::path src = cfg.effective_corpus_dir();
  require_corpus(run, src, "corpus/");
  for (const char* f : kCorpusFiles) run.output(f);
  if (run.up_to_date()) return StageStatus::kSkipped;

  const Corpus corpus = load_corpus(src);
  std::vector<std::string> problems;
  for (const ReviewRecord& r : corpus.records()) {
    for (const RecordViolation& v : validate_record(r, corpus)) {
      problems.push_back(r.record_id() + ": " + v.rule + (v.subject.empty() ? "" : " (" + v.subject + ")"));
    }
  }
  if (!problems.empty()) throw IntegrityError(std::move(problems));
  save_corpus(corpus, run.dir());
  run.finish();
  return StageStatus::kRan;
}

StageStatus stage_link(const PipelineConfig& cfg) {
  StageRun run(cfg, "link", json::object());
  require_corpus(run, cfg.stage_dir / "ingest", "");
  run.output("links.jsonl");
  for (const char* f : kCorpusFiles) run.output(f);
  if (run.up_to_date()) return StageStatus::kSkipped;

  const Corpus corpus = load_corpus(cfg.stage_dir / "ingest");
  const Corpus a = corpus.subset([](SourceTag t) { return t != SourceTag::kGraph; });
  const Corpus b = corpus.subset([](SourceTag t) { return t == SourceTag::kGraph; });
  LinkOptions opts;
  opts.jobs = cfg.jobs;
  const LinkTable links = link_sources(a, b, opts);
  save_links(links, run.dir() / "links.jsonl");
  save_corpus(merge_linked_identities(corpus, links), run.dir());
  run.finish();
  spdlog::info("link: {} verified identities", links.entries.size());
  return StageStatus::kRan;
}

StageStatus stage_classify(const PipelineConfig& cfg) {
  StageRun run(cfg, "classify", {{"provider", provider_slice(cfg.provider)}});
  const fs::path tax = run.require(taxonomy_path(cfg), "taxonomy.jsonl");
  run.stage_input("link", "publications.jsonl");
  run.output("assignments.jsonl");
  run.output("taxonomy_embeddings.jsonl");
  if (run.up_to_date()) return StageStatus::kSkipped;

  Taxonomy taxonomy = load_taxonomy(tax);
  ProviderClient client(client_config(cfg, true));
  taxonomy.embed_nodes(client);
  std::vector<Publication> pubs;
  read_jsonl(cfg.stage_dir / "link" / "publications.jsonl",
             [&](const json& j, std::size_t) { pubs.push_back(j.get<Publication>()); });
  std::vector<SubjectAssignment> out(pubs.size());
  parallel_for(pubs.size(), cfg.jobs, [&](std::size_t i) { out[i] = classify_publication(pubs[i], taxonomy, client); });
  save_assignments(out, run.dir() / "assignments.jsonl");
  save_node_embeddings(taxonomy, client.embedder_id(), run.dir() / "taxonomy_embeddings.jsonl");
  run.finish();
  return StageStatus::kRan;
}

StageStatus stage_build_pools(const PipelineConfig& cfg) {
  json slice = {{"min_pubs_in_cstar", cfg.pool.min_pubs_in_cstar},
                {"h_index_threshold", cfg.pool.h_index_threshold},
                {"pool_size", cfg.pool.pool_size},
                {"split_ratios", cfg.split_ratios},
                {"negatives_per_positive", cfg.negatives_per_positive},
                {"unqualified_share", cfg.unqualified_share},
                {"provider", provider_slice(cfg.provider)}};
  StageRun run(cfg, "build-pools", slice);
  const fs::path tax = run.require(taxonomy_path(cfg), "taxonomy.jsonl");
  require_corpus(run, cfg.stage_dir / "link", "link/");
  run.stage_input("classify", "assignments.jsonl");
  run.stage_input("classify", "taxonomy_embeddings.jsonl");
  for (const char* f : {"records.jsonl", "train.txt", "val.txt", "test.txt", "pairs.jsonl"}) run.output(f);
  if (run.up_to_date()) return StageStatus::kSkipped;

  const Corpus corpus = load_corpus(cfg.stage_dir / "link");
  const Taxonomy taxonomy =
      load_embedded_taxonomy(cfg, tax, cfg.stage_dir / "classify" / "taxonomy_embeddings.jsonl");
  const AssignmentMap assignments = load_assignment_map(cfg.stage_dir / "classify" / "assignments.jsonl");
  const std::vector<ScholarSubjects> subjects = build_scholar_subjects(corpus, assignments);
  PoolConfig pool = cfg.pool;
  pool.seed = cfg.seed;
  std::vector<ReviewRecord> records = corpus.records();
  build_pools(records, PoolContext{corpus, taxonomy, subjects}, pool, cfg.jobs);
  for (const ReviewRecord& r : records) {
    const auto v = validate_record(r, corpus);
    if (!v.empty()) throw std::runtime_error("record " + r.record_id() + " violates: " + v.front().rule);
  }
  const SplitResult split = stratified_split(records, cfg.split_ratios, cfg.seed);
  const std::vector<ReviewRecord> train = select_records(records, split.train);
  const auto pairs = build_training_pairs(train, cfg.negatives_per_positive, cfg.seed, cfg.unqualified_share);

  write_file_atomic(run.dir() / "records.jsonl", to_jsonl(records));
  write_file_atomic(run.dir() / "train.txt", join_lines(split.train));
  write_file_atomic(run.dir() / "val.txt", join_lines(split.val));
  write_file_atomic(run.dir() / "test.txt", join_lines(split.test));
  save_pairs(pairs, run.dir() / "pairs.jsonl");
  run.finish();
  spdlog::info("build-pools: {} records ({} train, {} val, {} test), {} training pairs", records.size(),
               split.train.size(), split.val.size(), split.test.size(), pairs.size());
  return StageStatus::kRan;
}

StageStatus stage_profile(const PipelineConfig& cfg) {
  StageRun run(cfg, "profile", {{"provider", provider_slice(cfg.provider)}});
  require_corpus(run, cfg.stage_dir / "link", "link/");
  run.stage_input("build-pools", "records.jsonl");
  run.output("papers.jsonl");
  run.output("candidates.jsonl");
  if (run.up_to_date()) return StageStatus::kSkipped;

  const Corpus corpus = load_corpus(cfg.stage_dir / "link");
  const auto records = load_records(cfg.stage_dir / "build-pools" / "records.jsonl");
  std::set<SourceId> paper_ids, scholar_ids;
  for (const ReviewRecord& r : records) {
    paper_ids.insert(r.paper_id);
    for (const auto* ids : {&r.reviewer_ids, &r.unqualified_ids, &r.potential_ids}) {
      for (const SourceId& id : *ids) {
        const ScholarProfile* s = corpus.find_scholar(id);
        if (!s) throw std::runtime_error("unknown scholar " + id.key());
        scholar_ids.insert(s->primary_id());
      }
    }
  }
  ProviderClient client(client_config(cfg, true));
  const std::vector<SourceId> papers(paper_ids.begin(), paper_ids.end());
  const std::vector<SourceId> scholars(scholar_ids.begin(), scholar_ids.end());
  std::vector<std::string> paper_lines(papers.size()), cand_lines(scholars.size());
  parallel_for(papers.size(), cfg.jobs, [&](std::size_t i) {
    const PaperProfile p = profile_paper(client, *corpus.find_publication(papers[i]));
    paper_lines[i] = json{{"paper_id", p.paper_id}, {"summary", p.summary.text}, {"vector", p.vector}}.dump();
  });
  parallel_for(scholars.size(), cfg.jobs, [&](std::size_t i) {
    const ScholarProfile& s = *corpus.find_scholar(scholars[i]);
    const CandidateProfile c = profile_candidate(client, s.primary_id(), corpus.publications_of(s));
    cand_lines[i] = json{{"scholar_id", c.scholar_id},
                         {"representative_ids", c.representative_ids},
                         {"content_hash", c.content_hash},
                         {"summary", c.summary.text},
                         {"vector", c.vector}}
                        .dump();
  });
  write_file_atomic(run.dir() / "papers.jsonl", join_lines(paper_lines));
  write_file_atomic(run.dir() / "candidates.jsonl", join_lines(cand_lines));
  run.finish();
  return StageStatus::kRan;
}

// Paper and candidate vectors keyed by id, with scholar lookups resolved
// through the corpus so that any linked id works.
struct Profiles {
  std::unordered_map<SourceId, EmbeddingVector, SourceIdHash> papers;
  std::unordered_map<SourceId, EmbeddingVector, SourceIdHash> candidates;
  const Corpus* corpus = nullptr;

  static Profiles load(const fs::path& dir, const Corpus& corpus) {
    Profiles p;
    p.corpus = &corpus;
    read_jsonl(dir / "papers.jsonl", [&](const json& j, std::size_t) {
      p.papers[j.at("paper_id").get<SourceId>()] = j.at("vector").get<EmbeddingVector>();
    });
    read_jsonl(dir / "candidates.jsonl", [&](const json& j, std::size_t) {
      p.candidates[j.at("scholar_id").get<SourceId>()] = j.at("vector").get<EmbeddingVector>();
    });
    return p;
  }

  std::vector<double> features(const SourceId& paper, const SourceId& candidate) const {
    const ScholarProfile* s = corpus->find_scholar(candidate);
    auto pi = papers.find(paper);
    auto ci = s ? candidates.find(s->primary_id()) : candidates.end();
    if (pi == papers.end()) throw std::runtime_error("no profile for paper " + paper.key());
    if (ci == candidates.end()) throw std::runtime_error("no profile for candidate " + candidate.key());
    return joint_embedding(pi->second, ci->second);
  }

  int input_dim() const {
    if (papers.empty()) throw std::runtime_error("no paper profiles");
    return static_cast<int>(2 * papers.begin()->second.dim());
  }
};

json train_slice(const PipelineConfig& cfg) {
  return {{"train", cfg.train}, {"dims", cfg.model_dims}, {"n_experts", cfg.n_experts}};
}

StageStatus stage_train(const PipelineConfig& cfg) {
  StageRun run(cfg, "train", train_slice(cfg));
  require_corpus(run, cfg.stage_dir / "link", "link/");
  run.stage_input("profile", "papers.jsonl");
  run.stage_input("profile", "candidates.jsonl");
  run.stage_input("build-pools", "records.jsonl");
  run.stage_input("build-pools", "pairs.jsonl");
  run.stage_input("build-pools", "train.txt");
  run.output("model.ckpt");
  run.output("trace.json");
  if (run.up_to_date()) return StageStatus::kSkipped;

  const Corpus corpus = load_corpus(cfg.stage_dir / "link");
  const Profiles profiles = Profiles::load(cfg.stage_dir / "profile", corpus);
  const auto records = select_records(load_records(cfg.stage_dir / "build-pools" / "records.jsonl"),
                                      read_lines(cfg.stage_dir / "build-pools" / "train.txt"));
  const auto pairs = load_pairs(cfg.stage_dir / "build-pools" / "pairs.jsonl");
  const auto ranking = build_ranking_pairs(records);

  std::vector<std::vector<double>> columns;
  TrainingData data;
  for (const LabeledPair& p : pairs) {
    columns.push_back(profiles.features(p.paper_id, p.candidate_id));
    data.labels.push_back(p.positive ? 1 : 0);
  }
  std::map<std::pair<SourceId, SourceId>, int> column_of;
  auto column = [&](const SourceId& paper, const SourceId& cand) {
    auto [it, fresh] = column_of.emplace(std::make_pair(paper, cand), static_cast<int>(columns.size()));
    if (fresh) columns.push_back(profiles.features(paper, cand));
    return it->second;
  };
  for (const RankingPair& rp : ranking) {
    data.ranking_pairs.emplace_back(column(rp.paper_id, rp.positive_id), column(rp.paper_id, rp.negative_id));
  }
  const int dim = profiles.input_dim();
  data.features.resize(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    data.features.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(columns[j].data(), dim);
  }

  MmoeDims dims = cfg.model_dims;
  dims.input_dim = dim;
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  MmoeModel model = init_model(dims, cfg.n_experts, cfg.seed);
  const LossTrace trace = train_two_stage(model, data, tc);
  save_checkpoint(model, tc, run.dir() / "model.ckpt");
  json tj = trace;
  write_file_atomic(run.dir() / "trace.json", tj.dump(2) + "\n");
  run.finish();
  spdlog::info("train: {} labeled samples, {} ranking pairs, final loss {:.4f}", data.labels.size(),
               data.ranking_pairs.size(), trace.epochs.empty() ? 0.0 : trace.epochs.back().loss);
  return StageStatus::kRan;
}

StageStatus stage_evaluate(const PipelineConfig& cfg) {
  json slice = {{"n_experts", cfg.n_experts}, {"pool_size", cfg.pool.pool_size}};
  StageRun run(cfg, "evaluate", slice);
  const fs::path ckpt = run.stage_input("train", "model.ckpt");
  const fs::path tax = run.require(taxonomy_path(cfg), "taxonomy.jsonl");
  require_corpus(run, cfg.stage_dir / "link", "link/");
  run.stage_input("profile", "papers.jsonl");
  run.stage_input("profile", "candidates.jsonl");
  run.stage_input("build-pools", "records.jsonl");
  run.stage_input("build-pools", "train.txt");
  run.stage_input("build-pools", "test.txt");
  run.stage_input("classify", "assignments.jsonl");
  run.stage_input("classify", "taxonomy_embeddings.jsonl");
  run.output("report.json");
  run.output("tfidf_report.json");
  run.output("tfidf_calibration.json");
  if (run.up_to_date()) return StageStatus::kSkipped;

  const LoadedCheckpoint loaded = load_checkpoint(ckpt, cfg.n_experts);
  const Corpus corpus = load_corpus(cfg.stage_dir / "link");
  const Profiles profiles = Profiles::load(cfg.stage_dir / "profile", corpus);
  const auto all = load_records(cfg.stage_dir / "build-pools" / "records.jsonl");
  const auto train = select_records(all, read_lines(cfg.stage_dir / "build-pools" / "train.txt"));
  const auto test = select_records(all, read_lines(cfg.stage_dir / "build-pools" / "test.txt"));
  if (test.empty()) throw std::runtime_error("test split is empty");

  const MmoeModel& model = loaded.model;
  const Scorer model_scorer = [&](const SourceId& paper, const SourceId& cand) {
    const ForwardResult f = forward(model, profiles.features(paper, cand));
    return CandidateScore{f.confidence, f.rank_score};
  };
  const EvalReport model_report = evaluate_suite(model_scorer, test, cfg.jobs);

  const Taxonomy taxonomy =
      load_embedded_taxonomy(cfg, tax, cfg.stage_dir / "classify" / "taxonomy_embeddings.jsonl");
  const auto subjects =
      build_scholar_subjects(corpus, load_assignment_map(cfg.stage_dir / "classify" / "assignments.jsonl"));
  const TfidfIndex index(corpus);
  const auto limit = static_cast<std::size_t>(cfg.pool.pool_size);
  const TfidfBaseline baseline = fit_tfidf_baseline(index, corpus, train, [&](const ReviewRecord& r) {
    return distant_candidates(r, taxonomy, subjects, limit, cfg.seed);
  });
  const Scorer tfidf_scorer = [&](const SourceId& paper, const SourceId& cand) { return baseline.score(paper, cand); };
  const EvalReport tfidf_report = evaluate_suite(tfidf_scorer, test, cfg.jobs);

  write_file_atomic(run.dir() / "report.json", report_to_json(model_report, true).dump(2) + "\n");
  write_file_atomic(run.dir() / "tfidf_report.json", report_to_json(tfidf_report, true).dump(2) + "\n");
  json cal = baseline.calibrator;
  write_file_atomic(run.dir() / "tfidf_calibration.json", cal.dump() + "\n");
  run.finish();
  spdlog::info("evaluate: model NDCG {:.4f}, TF-IDF NDCG {:.4f}", model_report.ndcg, tfidf_report.ndcg);
  return StageStatus::kRan;
}

StageStatus stage_report(const PipelineConfig& cfg) {
  StageRun run(cfg, "report", json::object());
  const fs::path m = run.stage_input("evaluate", "report.json");
  const fs::path t = run.stage_input("evaluate", "tfidf_report.json");
  run.output("report.txt");
  run.output("report.json");
  if (run.up_to_date()) return StageStatus::kSkipped;

  const EvalReport model = report_from_json(json::parse(read_file(m)));
  const EvalReport tfidf = report_from_json(json::parse(read_file(t)));
  const std::vector<std::pair<std::string, EvalReport>> rows = {{"tfidf", tfidf}, {"mmoe", model}};
  std::string text = format_report_table(rows);
  text += "Records evaluated: " + std::to_string(model.n_records) + "\n";
  write_file_atomic(run.dir() / "report.txt", text);
  json j = {{"tfidf", report_to_json(tfidf)}, {"mmoe", report_to_json(model)}};
  write_file_atomic(run.dir() / "report.json", j.dump(2) + "\n");
  run.finish();
  std::fputs(text.c_str(), stdout);
  return StageStatus::kRan;
}

}  // namespace

StageStatus run_stage(const std::string& stage, const PipelineConfig& config_in) {
  PipelineConfig cfg = config_in;
  cfg.propagate_seed();
  cfg.provider.validate();
  cfg.pool.validate();
  cfg.train.validate();
  if (stage == "synth") return stage_synth(cfg);
  if (stage == "ingest") return stage_ingest(cfg);
  if (stage == "link") return stage_link(cfg);
  if (stage == "classify") return stage_classify(cfg);
  if (stage == "build-pools") return stage_build_pools(cfg);
  if (stage == "profile") return stage_profile(cfg);
  if (stage == "train") return stage_train(cfg);
  if (stage == "evaluate") return stage_evaluate(cfg);
  if (stage == "report") return stage_report(cfg);
  throw ConfigError("unknown stage '" + stage + "'");
}

}  // namespace revmatch

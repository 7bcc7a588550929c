#include <cstdio>
#include <stdexcept>

#include "revmatch/eval.hpp"
#include "revmatch/util/parallel.hpp"

namespace revmatch {
namespace {

double confidence_of(const CandidateScore& s, const SourceId& id) {
  if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
    throw std::invalid_argument("confidence for " + id.key() + " is outside [0, 1]");
  }
  return s.confidence;
}

RecordEval evaluate_record(const Scorer& scorer, const ReviewRecord& r) {
  if (r.reviewer_ids.empty()) throw std::invalid_argument("record " + r.record_id() + " has no ground truth");
  if (r.unqualified_ids.empty()) throw std::invalid_argument("record " + r.record_id() + " has an empty unqualified pool");
  RecordEval out;
  out.record_id = r.record_id();
  std::vector<ScoredCandidate> ranking;
  double sum = 0.0;
  for (const SourceId& id : r.reviewer_ids) {
    const CandidateScore s = scorer(r.paper_id, id);
    sum += confidence_of(s, id);
    ranking.push_back({id, s.rank_score, true});
  }
  out.rrc = sum / static_cast<double>(r.reviewer_ids.size());
  sum = 0.0;
  for (const SourceId& id : r.unqualified_ids) sum += confidence_of(scorer(r.paper_id, id), id);
  out.ucc = sum / static_cast<double>(r.unqualified_ids.size());
  for (const SourceId& id : r.potential_ids) ranking.push_back({id, scorer(r.paper_id, id).rank_score, false});
  sort_ranking(ranking);
  out.ranking = task3_ranking_metrics(ranking);
  return out;
}

}  // namespace

EvalReport evaluate_suite(const Scorer& scorer, std::span<const ReviewRecord> records, std::size_t jobs) {
  if (records.empty()) throw std::invalid_argument("evaluate_suite: empty test set");
  EvalReport rep;
  rep.per_record.resize(records.size());
  parallel_for(records.size(), jobs, [&](std::size_t i) { rep.per_record[i] = evaluate_record(scorer, records[i]); });
  // Fixed-order sums keep reports byte-identical across job counts.
  for (const RecordEval& e : rep.per_record) {
    rep.rrc += e.rrc;
    rep.ucc += e.ucc;
    rep.map += e.ranking.average_precision;
    rep.r_prec += e.ranking.r_precision;
    rep.recip_rank += e.ranking.reciprocal_rank;
    rep.ndcg += e.ranking.ndcg;
    rep.success_at_5 += e.ranking.success_at_5;
  }
  rep.n_records = records.size();
  const double n = static_cast<double>(records.size());
  for (double* f : {&rep.rrc, &rep.ucc, &rep.map, &rep.r_prec, &rep.recip_rank, &rep.ndcg, &rep.success_at_5}) *f /= n;
  return rep;
}

json report_to_json(const EvalReport& r, bool include_per_record) {
  json j = {{"rrc", r.rrc},
            {"ucc", r.ucc},
            {"map", r.map},
            {"r_prec", r.r_prec},
            {"recip_rank", r.recip_rank},
            {"ndcg", r.ndcg},
            {"success_at_5", r.success_at_5},
            {"n_records", r.n_records},
            {"ndcg_variant", "binary gains, log2(rank+1) discount, full list"}};
  if (include_per_record) {
    j["per_record"] = json::array();
    for (const RecordEval& e : r.per_record) {
      j["per_record"].push_back({{"record_id", e.record_id},
                                 {"rrc", e.rrc},
                                 {"ucc", e.ucc},
                                 {"ap", e.ranking.average_precision},
                                 {"r_prec", e.ranking.r_precision},
                                 {"rr", e.ranking.reciprocal_rank},
                                 {"ndcg", e.ranking.ndcg},
                                 {"success_at_5", e.ranking.success_at_5}});
    }
  }
  return j;
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.rrc = j.at("rrc").get<double>();
  r.ucc = j.at("ucc").get<double>();
  r.map = j.at("map").get<double>();
  r.r_prec = j.at("r_prec").get<double>();
  r.recip_rank = j.at("recip_rank").get<double>();
  r.ndcg = j.at("ndcg").get<double>();
  r.success_at_5 = j.at("success_at_5").get<double>();
  r.n_records = j.at("n_records").get<std::size_t>();
  return r;
}

std::string format_report_table(std::span<const std::pair<std::string, EvalReport>> rows) {
  std::size_t name_width = 6;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  const char* headers[] = {"RRC", "UCC", "MAP", "R-prec", "Recip-rank", "NDCG", "Success@5"};
  std::string out = "Method" + std::string(name_width - 6, ' ');
  char buf[64];
  for (const char* h : headers) {
    std::snprintf(buf, sizeof buf, "  %10s", h);
    out += buf;
  }
  out += '\n';
  for (const auto& [name, r] : rows) {
    out += name + std::string(name_width - name.size(), ' ');
    for (double v : {r.rrc, r.ucc, r.map, r.r_prec, r.recip_rank, r.ndcg, r.success_at_5}) {
      std::snprintf(buf, sizeof buf, "  %10.4f", v);
      out += buf;
    }
    out += '\n';
  }
  out += "NDCG: binary gains, log2(rank+1) discount, full list (no cutoff).\n";
  return out;
}

}  // namespace revmatch

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "revmatch/eval.hpp"
#include "revmatch/linkage.hpp"

namespace revmatch {
namespace {

std::string document_text(const Publication& p) {
  return p.abstract ? p.title + " " + *p.abstract : p.title;
}

}  // namespace

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [_, v] : a) na += v * v;
  for (const auto& [_, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      dot += a[i++].second * b[j++].second;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

TfidfIndex::TfidfIndex(const Corpus& corpus) : corpus_(corpus) {
  // Term ids follow lexicographic order so vectors do not depend on corpus order.
  std::map<std::string, int> df;
  std::vector<std::vector<std::string>> docs;
  for (const Publication& p : corpus.publications()) {
    docs.push_back(normalize_title(document_text(p)).words);
    for (const std::string& t : std::set<std::string>(docs.back().begin(), docs.back().end())) ++df[t];
  }
  const double n = static_cast<double>(corpus.publications().size());
  for (const auto& [term, count] : df) {
    vocab_.emplace(term, static_cast<int>(idf_.size()));
    idf_.push_back(std::log(n / count));
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    pub_vectors_.emplace(corpus.publications()[i].id, vectorize(document_text(corpus.publications()[i])));
  }
}

double TfidfIndex::idf(const std::string& term) const {
  auto it = vocab_.find(term);
  return it == vocab_.end() ? 0.0 : idf_[static_cast<std::size_t>(it->second)];
}

SparseVector TfidfIndex::vectorize(std::string_view text) const {
  const std::vector<std::string> words = normalize_title(text).words;
  std::map<int, int> counts;
  for (const std::string& w : words) {
    auto it = vocab_.find(w);
    if (it != vocab_.end()) ++counts[it->second];
  }
  SparseVector v;
  for (const auto& [id, count] : counts) {
    v.emplace_back(id, static_cast<double>(count) / static_cast<double>(words.size()) *
                           idf_[static_cast<std::size_t>(id)]);
  }
  return v;
}

const SparseVector& TfidfIndex::publication_vector(const SourceId& pub_id) const {
  auto it = pub_vectors_.find(pub_id);
  if (it == pub_vectors_.end()) throw std::out_of_range("publication " + pub_id.key() + " is not indexed");
  return it->second;
}

SparseVector TfidfIndex::candidate_vector(const ScholarProfile& scholar) const {
  std::map<int, double> sum;
  for (const SourceId& p : scholar.publication_ids) {
    for (const auto& [id, v] : publication_vector(p)) sum[id] += v;
  }
  SparseVector out;
  const double n = static_cast<double>(scholar.publication_ids.size());
  for (const auto& [id, v] : sum) out.emplace_back(id, v / n);
  return out;
}

std::vector<double> TfidfIndex::tfidf_scores(const Publication& query,
                                             std::span<const ScholarProfile* const> candidates) const {
  const SparseVector q = vectorize(document_text(query));
  std::vector<double> out;
  for (const ScholarProfile* c : candidates) {
    if (c->publication_ids.empty()) {
      spdlog::warn("candidate {} has no publications; TF-IDF score is 0", c->primary_id().key());
      out.push_back(0.0);
      continue;
    }
    out.push_back(cosine(q, candidate_vector(*c)));
  }
  return out;
}

CandidateScore TfidfBaseline::score(const SourceId& paper_id, const SourceId& candidate_id) const {
  const Publication* paper = corpus->find_publication(paper_id);
  const ScholarProfile* cand = corpus->find_scholar(candidate_id);
  if (!paper) throw std::out_of_range("unknown paper " + paper_id.key());
  if (!cand) throw std::out_of_range("unknown candidate " + candidate_id.key());
  const ScholarProfile* one[] = {cand};
  const double raw = index->tfidf_scores(*paper, one).front();
  return {calibrator(raw), raw};
}

TfidfBaseline fit_tfidf_baseline(const TfidfIndex& index, const Corpus& corpus,
                                 std::span<const ReviewRecord> records,
                                 const std::function<std::vector<SourceId>(const ReviewRecord&)>& distant_candidates) {
  std::vector<double> pos, neg;
  for (const ReviewRecord& r : records) {
    const Publication* paper = corpus.find_publication(r.paper_id);
    if (!paper) throw std::out_of_range("unknown paper " + r.paper_id.key());
    auto collect = [&](const std::vector<SourceId>& ids, std::vector<double>& into) {
      std::vector<const ScholarProfile*> cands;
      for (const SourceId& id : ids) {
        if (const ScholarProfile* s = corpus.find_scholar(id)) cands.push_back(s);
      }
      for (double s : index.tfidf_scores(*paper, cands)) into.push_back(s);
    };
    collect(r.reviewer_ids, pos);
    collect(distant_candidates(r), neg);
  }
  TfidfBaseline b;
  b.index = &index;
  b.corpus = &corpus;
  b.calibrator = isotonic_calibrate(pos, neg);
  return b;
}

}  // namespace revmatch

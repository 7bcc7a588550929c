#pragma once

// Independent reference implementations. They favour obviousness over speed
// and share no code with the library beyond the data types and the tested
// primitives (title and name normalization).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "revmatch/corpus.hpp"
#include "revmatch/eval.hpp"
#include "revmatch/linkage.hpp"

namespace revmatch::oracle {

// ---------------------------------------------------------------- metrics

struct Metrics {
  double ap, r_prec, rr, ndcg, success5;
};

/// `relevant[k]` says whether the candidate at rank k+1 is ground truth.
inline Metrics ranking_metrics(const std::vector<bool>& relevant) {
  const int n = static_cast<int>(relevant.size());
  int R = 0;
  for (bool r : relevant) R += r;
  Metrics m{};
  // AP: precision at each relevant rank, averaged over relevant items.
  double ap_sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (!relevant[k - 1]) continue;
    int hits = 0;
    for (int j = 1; j <= k; ++j) hits += relevant[j - 1];
    ap_sum += static_cast<double>(hits) / k;
  }
  m.ap = ap_sum / R;
  int top_r = 0;
  for (int j = 0; j < R; ++j) top_r += relevant[j];
  m.r_prec = static_cast<double>(top_r) / R;
  m.rr = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (relevant[k - 1]) {
      m.rr = 1.0 / k;
      break;
    }
  }
  double dcg = 0.0, idcg = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (relevant[k - 1]) dcg += std::log(2.0) / std::log(k + 1.0);
  }
  for (int k = 1; k <= R; ++k) idcg += std::log(2.0) / std::log(k + 1.0);
  m.ndcg = dcg / idcg;
  m.success5 = 0.0;
  for (int k = 0; k < std::min(n, 5); ++k) {
    if (relevant[k]) m.success5 = 1.0;
  }
  return m;
}

/// Orders by score descending, equal scores by smaller scholar id, using a
/// selection procedure rather than a library sort.
inline std::vector<bool> ordered_relevance(std::vector<ScoredCandidate> c) {
  std::vector<bool> out;
  while (!c.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].score > c[best].score || (c[i].score == c[best].score && c[i].scholar_id < c[best].scholar_id)) {
        best = i;
      }
    }
    out.push_back(c[best].is_ground_truth);
    c.erase(c.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

// --------------------------------------------------------------- isotonic

/// Least-squares non-decreasing fit at strictly increasing xs, by trying every
/// split of the sequence into contiguous constant blocks (2^(n-1) of them).
inline std::vector<double> isotonic_brute_force(const std::vector<double>& ys, const std::vector<double>& ws) {
  const std::size_t n = ys.size();
  double best_err = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    std::vector<double> fit(n);
    std::size_t start = 0;
    double prev = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t i = 0; i < n && monotone; ++i) {
      const bool cut = i == n - 1 || ((mask >> i) & 1);
      if (!cut) continue;
      double sw = 0.0, swy = 0.0;
      for (std::size_t j = start; j <= i; ++j) {
        sw += ws[j];
        swy += ws[j] * ys[j];
      }
      const double v = swy / sw;
      if (v < prev - 1e-15) monotone = false;
      for (std::size_t j = start; j <= i; ++j) fit[j] = v;
      prev = v;
      start = i + 1;
    }
    if (!monotone) continue;
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) err += ws[j] * (ys[j] - fit[j]) * (ys[j] - fit[j]);
    if (err < best_err - 1e-15) {
      best_err = err;
      best = fit;
    }
  }
  return best;
}

// ---------------------------------------------------------------- linkage

inline std::set<std::string> token_set(const std::string& name) {
  const auto t = normalize_name(name).tokens;
  return {t.begin(), t.end()};
}

inline std::multiset<char> initial_multiset(const std::string& name) {
  std::multiset<char> out;
  for (const auto& t : normalize_name(name).tokens) out.insert(t[0]);
  return out;
}

// Normalization is memoized only because the all-pairs scan asks for the
// same titles millions of times; the comparison itself is unchanged.
inline const std::vector<std::string>& title_words(const std::string& title) {
  static std::map<std::string, std::vector<std::string>> memo;
  auto it = memo.find(title);
  if (it == memo.end()) it = memo.emplace(title, normalize_title(title).words).first;
  return it->second;
}

inline bool same_title(const std::string& x, const std::string& y) {
  const auto& a = title_words(x);
  return !a.empty() && a == title_words(y);
}

/// All-pairs linkage: scans every (a, b) scholar pair and every publication
/// pair without indexes. Returns (left primary id, right primary id).
inline std::set<std::pair<SourceId, SourceId>> link_all_pairs(const Corpus& A, const Corpus& B) {
  std::set<std::pair<SourceId, SourceId>> out;
  for (const ScholarProfile& a : A.scholars()) {
    if (a.publication_ids.empty()) continue;
    const auto a_pubs = A.publications_of(a);
    // Every B publication whose title equals one of a's titles.
    std::vector<const Publication*> matched;
    for (const Publication& q : B.publications()) {
      for (const Publication* p : a_pubs) {
        if (same_title(p->title, q.title)) {
          matched.push_back(&q);
          break;
        }
      }
    }
    if (matched.empty()) continue;
    // Scholars of B who author every matched publication.
    std::vector<const ScholarProfile*> common;
    for (const ScholarProfile& b : B.scholars()) {
      bool all = true;
      for (const Publication* q : matched) {
        bool authored = false;
        for (const SourceId& id : q->author_ids) authored = authored || B.find_scholar(id) == &b;
        all = all && authored;
      }
      if (all) common.push_back(&b);
    }
    if (common.empty()) continue;
    const auto ta = token_set(a.display_name);
    std::size_t best_score = 0;
    for (const auto* c : common) {
      std::size_t s = 0;
      for (const auto& t : token_set(c->display_name)) s += ta.count(t);
      best_score = std::max(best_score, s);
    }
    std::vector<const ScholarProfile*> best;
    for (const auto* c : common) {
      std::size_t s = 0;
      for (const auto& t : token_set(c->display_name)) s += ta.count(t);
      if (s == best_score) best.push_back(c);
    }
    const ScholarProfile* winner = nullptr;
    if (best_score > 0 && best.size() == 1) {
      winner = best[0];
    } else {
      std::vector<const ScholarProfile*> by_initials;
      const auto ia = initial_multiset(a.display_name);
      for (const auto* c : best) {
        if (!ia.empty() && initial_multiset(c->display_name) == ia) by_initials.push_back(c);
      }
      if (by_initials.size() == 1) winner = by_initials[0];
    }
    if (!winner || winner->publication_ids.empty()) continue;
    bool verified = false;
    for (const Publication* p : a_pubs) {
      for (const Publication* q : B.publications_of(*winner)) verified = verified || same_title(p->title, q->title);
    }
    if (verified) out.emplace(a.primary_id(), winner->primary_id());
  }
  return out;
}

}  // namespace revmatch::oracle

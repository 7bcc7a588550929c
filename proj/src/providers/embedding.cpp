#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

#include "revmatch/providers.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

constexpr double kWholeTextWeight = 0.05;

std::vector<double> unit_gaussian(std::uint64_t seed, int dim) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

// Token vectors are pure functions of (model, dim, token); memoized because
// corpora repeat tokens heavily.
const std::vector<double>& token_vector(std::string_view model_name, int dim, const std::string& token) {
  static std::mutex mutex;
  static std::unordered_map<std::string, std::vector<double>> memo;
  std::string key(model_name);
  key += '\x1f' + std::to_string(dim) + '\x1f' + token;
  std::lock_guard lock(mutex);
  auto it = memo.find(key);
  if (it == memo.end()) {
    it = memo.emplace(key, unit_gaussian(derive_seed(fnv1a64(model_name), "tok:" + token), dim)).first;
  }
  return it->second;
}

// Code point starting at text[i]; advances i. Malformed bytes decode as
// themselves so that tokenization never fails.
char32_t next_code_point(std::string_view text, std::size_t& i) {
  const auto b = static_cast<unsigned char>(text[i]);
  const int extra = b >= 0xF0 ? 3 : b >= 0xE0 ? 2 : b >= 0xC0 ? 1 : 0;
  if (extra == 0 || i + extra >= text.size()) {
    ++i;
    return b;
  }
  char32_t cp = b & (0x3F >> extra);
  for (int k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
  i += static_cast<std::size_t>(extra) + 1;
  return cp;
}

// Latin-1 symbols, general punctuation and CJK punctuation separate words
// like ASCII punctuation does; other non-ASCII code points are word characters.
bool is_word_code_point(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp >= 0xA0 && cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

std::vector<std::string> stub_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const char32_t cp = next_code_point(text, i);
    if (is_word_code_point(cp)) {
      if (cp < 0x80) {
        cur.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
      } else {
        cur.append(text.substr(start, i - start));
      }
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  double norm2 = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw ContractError("embedding contains non-finite values");
    norm2 += x * x;
  }
  if (values.empty() || norm2 <= 0.0) throw ContractError("embedding has zero norm");
  // Already unit length (e.g. read back from disk): keep the exact bits so
  // a save/load round trip is lossless.
  if (std::abs(norm2 - 1.0) > 1e-12) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : values) x *= inv;
  }
  EmbeddingVector v;
  v.values_ = std::move(values);
  return v;
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  if (other.dim() != dim()) throw ContractError("embedding dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

SummaryText SummaryText::from(std::string text) {
  SummaryText s;
  s.word_count = count_words(text);
  s.text = std::move(text);
  return s;
}

void ProviderConfig::validate() const {
  if (stub_mode && stub_dim < 8) throw std::invalid_argument("stub_dim must be >= 8 in stub mode");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (timeout_seconds <= 0) throw std::invalid_argument("timeout must be positive");
}

std::vector<double> stub_embedding_values(std::string_view text, int dim, std::string_view model_name) {
  std::vector<double> bag(static_cast<std::size_t>(dim), 0.0);
  bool any = false;
  for (const auto& token : stub_tokens(text)) {
    const auto& tv = token_vector(model_name, dim, token);
    for (int i = 0; i < dim; ++i) bag[i] += tv[i];
    any = true;
  }
  double norm2 = 0.0;
  for (double x : bag) norm2 += x * x;
  const std::vector<double> whole = unit_gaussian(derive_seed(fnv1a64(model_name), text), dim);
  if (!any || norm2 <= 0.0) return whole;
  const double inv = 1.0 / std::sqrt(norm2);
  for (int i = 0; i < dim; ++i) bag[i] = bag[i] * inv + kWholeTextWeight * whole[i];
  return bag;
}

std::vector<double> joint_embedding(const EmbeddingVector& paper_vec, const EmbeddingVector& cand_vec) {
  std::vector<double> out;
  out.reserve(paper_vec.dim() + cand_vec.dim());
  out.insert(out.end(), paper_vec.values().begin(), paper_vec.values().end());
  out.insert(out.end(), cand_vec.values().begin(), cand_vec.values().end());
  return out;
}

std::vector<const Publication*> select_representative_pubs(std::span<const Publication* const> pubs) {
  if (pubs.empty()) throw std::invalid_argument("scholar has no publications");
  constexpr std::size_t kTop = 5;
  std::vector<const Publication*> by_cites(pubs.begin(), pubs.end());
  std::sort(by_cites.begin(), by_cites.end(), [](const Publication* a, const Publication* b) {
    if (a->citation_count != b->citation_count) return a->citation_count > b->citation_count;
    if (a->year != b->year) return a->year > b->year;
    return a->id < b->id;
  });
  std::vector<const Publication*> by_year(pubs.begin(), pubs.end());
  std::sort(by_year.begin(), by_year.end(), [](const Publication* a, const Publication* b) {
    if (a->year != b->year) return a->year > b->year;
    if (a->citation_count != b->citation_count) return a->citation_count > b->citation_count;
    return a->id < b->id;
  });
  std::vector<const Publication*> out;
  std::set<SourceId> seen;
  for (const auto* list : {&by_cites, &by_year}) {
    for (std::size_t i = 0; i < std::min(kTop, list->size()); ++i) {
      if (seen.insert((*list)[i]->id).second) out.push_back((*list)[i]);
    }
  }
  return out;
}

void to_json(json& j, const EmbeddingVector& v) { j = v.values(); }

void from_json(const json& j, EmbeddingVector& v) {
  v = EmbeddingVector::normalized(j.get<std::vector<double>>());
}

}  // namespace revmatch

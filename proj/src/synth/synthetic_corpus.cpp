#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "revmatch/linkage.hpp"
#include "revmatch/synth.hpp"
#include "revmatch/util/hash.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ren", "tor", "vex", "dal", "pim", "sor", "qua",
                                      "zen", "bri", "flo", "gan", "hul", "jor", "lek", "mar", "nov", "pex",
                                      "ruk", "sil", "tam", "ul", "vor", "wen", "yel", "zor", "bex", "cas",
                                      "dro", "fen", "gil", "hok", "ith", "jum", "kel", "lun", "mot", "nir"};

constexpr const char* kFillers[] = {"analysis", "method",   "approach",   "novel",      "study",     "results",
                                    "framework", "data",    "model",      "evaluation", "based",     "towards",
                                    "improved", "efficient", "robust",    "general",    "new",       "case",
                                    "effects",  "review",   "application", "design",    "theory",    "observations",
                                    "properties", "structure", "performance", "estimation", "behavior", "dynamics"};

constexpr const char* kGivenNames[] = {"Maria", "John",  "Wei",    "Anna",  "Luis",   "Chen",  "Fatima", "Ivan",
                                       "Sara",  "Peter", "Yuki",   "Omar",  "Elena",  "David", "Li",     "Grace",
                                       "Hans",  "Amara", "Jorge",  "Nina",  "Ravi",   "Sofia", "Tomas",  "Mei",
                                       "Kwame", "Laura", "Andrei", "Priya", "Daniel", "Hana",  "Marco",  "Zainab"};

constexpr int kVocabSize = 8;
constexpr int kMaxAttempts = 500;

std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

class Generator {
 public:
  Generator(const SyntheticConfig& config, const Taxonomy& taxonomy, TextEmbedder& embedder)
      : config_(config), taxonomy_(taxonomy), embedder_(embedder) {
    // Fillers that also occur in node labels would pull papers toward
    // whichever leaf happens to share them.
    std::set<std::string> label_words;
    for (const TaxonomyNode& n : taxonomy.nodes()) {
      for (const std::string& w : normalize_title(n.label).words) label_words.insert(w);
    }
    for (const char* f : kFillers) {
      if (!label_words.count(f)) fillers_.emplace_back(f);
    }
  }

  Corpus run();

 private:
  enum class Role { kExpert, kResident, kCross };

  std::string pseudo_word(Rng& rng) {
    for (;;) {
      std::string w;
      const int n = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < n; ++i) w += kSyllables[rng.below(std::size(kSyllables))];
      if (used_words_.insert(w).second) return w;
    }
  }

  const std::vector<std::string>& vocab(const std::string& leaf) {
    auto it = vocab_.find(leaf);
    if (it != vocab_.end()) return it->second;
    Rng rng(derive_seed(config_.seed, "vocab:" + leaf));
    std::vector<std::string> words;
    for (int i = 0; i < kVocabSize; ++i) words.push_back(pseudo_word(rng));
    return vocab_.emplace(leaf, std::move(words)).first->second;
  }

  std::string filler(Rng& rng) { return fillers_[rng.below(fillers_.size())]; }

  // Title and abstract built from the leaf's vocabulary, its label and
  // shared filler words; redrawn until classification agrees.
  Publication make_publication(const std::string& leaf, Rng& rng) {
    const auto& v = vocab(leaf);
    const std::string& label = taxonomy_.node(leaf).label;
    std::string path = taxonomy_.node(taxonomy_.ancestor_at(leaf, 1)).label;
    path += ", " + taxonomy_.node(taxonomy_.ancestor_at(leaf, 2)).label + ", " + label;
    auto word = [&] { return capitalize(v[rng.below(v.size())]); };
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Publication p;
      p.title = word() + " " + word() + " " + capitalize(filler(rng)) + " in " + label + ": " + word() + " " +
                capitalize(filler(rng));
      std::string abstract = "Work in " + path + ".";
      for (int s = 0; s < 3; ++s) {
        std::vector<std::string> words;
        for (int k = 0; k < 4; ++k) words.push_back(v[rng.below(v.size())]);
        for (int k = 0; k < 5; ++k) words.push_back(filler(rng));
        rng.shuffle(words);
        words.front() = capitalize(words.front());
        for (std::size_t k = 0; k < words.size(); ++k) abstract += " " + words[k];
        abstract += ".";
      }
      p.abstract = abstract + " Keywords: " + label + ".";
      const std::string key = normalize_title(p.title).joined();
      if (titles_.count(key)) continue;
      if (classify_publication(p, taxonomy_, embedder_).l3_node != leaf) continue;
      titles_.insert(key);
      p.id = {SourceTag::kGraph, "P" + pad(++pub_counter_, 6)};
      return p;
    }
    throw std::runtime_error("could not generate a publication classified into " + leaf);
  }

  static std::string pad(std::size_t n, int width) {
    std::string s = std::to_string(n);
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
  }

  std::string surname(Rng& rng) {
    for (;;) {
      std::string w;
      const int n = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < n; ++i) w += kSyllables[rng.below(std::size(kSyllables))];
      w = capitalize(w);
      if (surnames_.insert(w).second) return w;
    }
  }

  ScholarProfile& new_scholar(Rng& rng) {
    ScholarProfile s;
    s.ids.push_back({SourceTag::kGraph, "S" + pad(scholars_.size() + 1, 5)});
    s.display_name = std::string(kGivenNames[rng.below(std::size(kGivenNames))]) + " " + surname(rng);
    scholars_.push_back(std::move(s));
    return scholars_.back();
  }

  void add_pub(ScholarProfile& s, const std::string& leaf, Rng& rng, bool recent, bool well_cited) {
    Publication p = make_publication(leaf, rng);
    p.year = recent ? static_cast<int>(rng.between(2018, 2024)) : static_cast<int>(rng.between(1992, 2007));
    p.citation_count = well_cited ? rng.between(12, 90) : rng.between(0, 3);
    p.author_ids.push_back(s.primary_id());
    s.publication_ids.push_back(p.id);
    pubs_.push_back(std::move(p));
  }

  std::size_t make_scholar(Role role, const std::string& c_p, const std::string& c_star, std::size_t index) {
    static const char* kRoleNames[] = {"expert", "resident", "cross"};
    const std::string key = std::string(kRoleNames[static_cast<int>(role)]) + ":" + c_p + ":" + std::to_string(index);
    Rng rng(derive_seed(config_.seed, key));
    new_scholar(rng);
    const std::size_t slot = scholars_.size() - 1;
    switch (role) {
      case Role::kExpert: {
        for (int i = 0; i < 5; ++i) add_pub(scholars_[slot], c_p, rng, true, true);
        std::string other;
        do {
          other = taxonomy_.leaves()[rng.below(taxonomy_.leaves().size())];
        } while (other == c_p || other == c_star);
        const auto drift = rng.between(2, 12);
        for (int i = 0; i < drift; ++i) add_pub(scholars_[slot], other, rng, false, false);
        break;
      }
      case Role::kResident: {
        const auto n = rng.between(6, 9);
        for (int i = 0; i < n; ++i) {
          add_pub(scholars_[slot], c_p, rng, rng.uniform() < 0.5, true);
          pubs_.back().citation_count = rng.between(4, 40);
        }
        break;
      }
      case Role::kCross: {
        const auto core = rng.between(5, 6);
        for (int i = 0; i < core; ++i) add_pub(scholars_[slot], c_star, rng, true, true);
        const auto side = rng.between(3, 6);
        for (int i = 0; i < side; ++i) add_pub(scholars_[slot], c_p, rng, false, false);
        break;
      }
    }
    return slot;
  }

  void mirror_into_registry(std::size_t slot, Rng& rng);

  const SyntheticConfig& config_;
  const Taxonomy& taxonomy_;
  TextEmbedder& embedder_;
  std::map<std::string, std::vector<std::string>> vocab_;
  std::set<std::string> used_words_;
  std::vector<std::string> fillers_;
  std::set<std::string> surnames_;
  std::set<std::string> titles_;
  std::vector<Publication> pubs_;
  std::vector<ScholarProfile> scholars_;
  std::size_t pub_counter_ = 0;
  std::size_t registry_scholars_ = 0;
  std::size_t registry_pubs_ = 0;
};

// Safe variants only: they change case, punctuation or diacritics, or add a
// middle initial, so normalization and token overlap still identify the
// person.
std::string name_variant(const std::string& name, Rng& rng) {
  const auto space = name.find(' ');
  const std::string given = name.substr(0, space);
  const std::string family = name.substr(space + 1);
  switch (rng.below(4)) {
    case 0: {
      std::string up = name;
      for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return up;
    }
    case 1: return given + " " + static_cast<char>('A' + rng.below(26)) + ". " + family;
    case 2: return family + ", " + given;
    default: {
      std::string g = given;
      const auto pos = g.find_first_of("aeiou");
      if (pos == std::string::npos) return g + " " + family;
      static const char* kAccented[] = {"á", "é", "í", "ó", "ú"};
      const std::string vowels = "aeiou";
      return g.substr(0, pos) + kAccented[vowels.find(g[pos])] + g.substr(pos + 1) + " " + family;
    }
  }
}

std::string title_variant(const std::string& title, Rng& rng) {
  switch (rng.below(3)) {
    case 0: {
      std::string low = title;
      for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return low;
    }
    case 1: {
      std::string t = title;
      t.erase(std::remove(t.begin(), t.end(), ':'), t.end());
      return t;
    }
    default: return title + ".";
  }
}

void Generator::mirror_into_registry(std::size_t slot, Rng& rng) {
  ScholarProfile& g = scholars_[slot];
  ScholarProfile r;
  r.ids.push_back({SourceTag::kRegistry, "R" + pad(++registry_scholars_, 5)});
  r.display_name = name_variant(g.display_name, rng);
  const std::size_t n = std::min<std::size_t>(g.publication_ids.size(), 1 + rng.below(3));
  for (std::size_t k : rng.sample_indices(g.publication_ids.size(), n)) {
    const SourceId& pid = g.publication_ids[k];
    auto it = std::find_if(pubs_.begin(), pubs_.end(), [&](const Publication& p) { return p.id == pid; });
    Publication copy = *it;
    copy.id = {SourceTag::kRegistry, "RP" + pad(++registry_pubs_, 6)};
    copy.title = title_variant(copy.title, rng);
    copy.author_ids = {r.primary_id()};
    r.publication_ids.push_back(copy.id);
    pubs_.push_back(std::move(copy));
  }
  scholars_.push_back(std::move(r));
}

Corpus Generator::run() {
  if (config_.n_records < 1) throw std::invalid_argument("n_records must be at least 1");
  const auto& leaves = taxonomy_.leaves();
  if (leaves.size() < 3) throw std::invalid_argument("synthetic corpus needs at least three level-3 nodes");
  const std::size_t k = std::min(config_.n_categories, leaves.size());
  if (k < 1) throw std::invalid_argument("n_categories must be at least 1");

  Rng top(derive_seed(config_.seed, "categories"));
  std::vector<std::string> targets;
  for (std::size_t i : top.sample_indices(leaves.size(), k)) targets.push_back(leaves[i]);
  std::sort(targets.begin(), targets.end());
  std::map<std::string, std::string> sibling;
  for (const auto& c : targets) sibling[c] = nearest_sibling_category(c, taxonomy_);

  std::map<std::string, std::vector<std::size_t>> experts;
  std::vector<std::size_t> established;
  for (const auto& c : targets) {
    for (int i = 0; i < config_.experts_per_category; ++i) {
      experts[c].push_back(make_scholar(Role::kExpert, c, sibling[c], static_cast<std::size_t>(i)));
    }
    established.insert(established.end(), experts[c].begin(), experts[c].end());
  }
  std::set<std::string> sibling_set;
  for (const auto& [_, s] : sibling) sibling_set.insert(s);
  for (const auto& s : sibling_set) {
    for (int i = 0; i < config_.residents_per_category; ++i) {
      established.push_back(make_scholar(Role::kResident, s, s, static_cast<std::size_t>(i)));
    }
  }
  for (const auto& c : targets) {
    for (int i = 0; i < config_.cross_per_category; ++i) {
      established.push_back(make_scholar(Role::kCross, c, sibling[c], static_cast<std::size_t>(i)));
    }
  }

  std::vector<ReviewRecord> records;
  for (std::size_t r = 0; r < config_.n_records; ++r) {
    const std::string& c_p = targets[r % targets.size()];
    Rng rng(derive_seed(config_.seed, "record:" + std::to_string(r)));
    Publication paper = make_publication(c_p, rng);
    paper.year = static_cast<int>(rng.between(2022, 2025));
    paper.citation_count = rng.between(0, 2);
    const auto n_authors = rng.between(1, 3);
    for (int a = 0; a < n_authors; ++a) {
      ScholarProfile& s = new_scholar(rng);
      s.publication_ids.push_back(paper.id);
      paper.author_ids.push_back(s.primary_id());
    }
    ReviewRecord rec;
    rec.paper_id = paper.id;
    pubs_.push_back(std::move(paper));
    const auto& pool = experts[c_p];
    const auto n_gt = static_cast<std::size_t>(rng.between(1, 3));
    auto picks = rng.sample_indices(pool.size(), std::min(n_gt + 1, pool.size()));
    for (std::size_t i = 0; i < std::min(n_gt, picks.size()); ++i) {
      rec.reviewer_ids.push_back(scholars_[pool[picks[i]]].primary_id());
    }
    if (picks.size() > n_gt && rng.uniform() < 0.5) rec.editor_id = scholars_[pool[picks[n_gt]]].primary_id();
    rec.l3_category = c_p;
    rec.l1_category = taxonomy_.ancestor_at(c_p, 1);
    records.push_back(std::move(rec));
  }

  Rng reg(derive_seed(config_.seed, "registry"));
  for (std::size_t slot : established) {
    if (reg.uniform() < config_.registry_fraction) mirror_into_registry(slot, reg);
  }
  return Corpus(std::move(pubs_), std::move(scholars_), std::move(records));
}

}  // namespace

Corpus generate_synthetic_corpus(const SyntheticConfig& config, const Taxonomy& taxonomy, TextEmbedder& embedder) {
  Generator g(config, taxonomy, embedder);
  return g.run();
}

}  // namespace revmatch

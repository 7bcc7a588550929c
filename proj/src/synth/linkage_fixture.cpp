#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "revmatch/synth.hpp"
#include "revmatch/util/rng.hpp"

namespace revmatch {
namespace {

constexpr const char* kTail[] = {"a", "o", "en", "ar", "is", "el", "un", "or", "ia", "ez", "in", "ul"};
constexpr const char* kTitleWords[] = {"adaptive", "sparse", "graph",   "quantum",  "neural",   "stochastic",
                                       "optimal",  "robust", "spectral", "kernel",  "bayesian", "distributed",
                                       "learning", "control", "networks", "inference", "dynamics", "systems",
                                       "signals",  "models", "estimation", "sampling", "coding",  "geometry"};

struct Person {
  std::string given;
  std::string family;
  bool in_a = true;
  bool in_b = true;
  std::string b_name;
};

// Every person gets a distinct (given initial, family initial) pair and
// tokens no other person uses, so only the intended identity can ever win a
// name comparison.
class NameBook {
 public:
  explicit NameBook(Rng& rng) : rng_(rng) {
    for (char g = 'a'; g <= 'z'; ++g) {
      for (char f = 'a'; f <= 'z'; ++f) pairs_.emplace_back(g, f);
    }
    rng_.shuffle(pairs_);
  }

  std::pair<std::string, std::string> next() {
    if (next_ >= pairs_.size()) throw std::invalid_argument("linkage fixture supports at most 676 names");
    const auto [g, f] = pairs_[next_++];
    return {word(g), word(f)};
  }

 private:
  std::string word(char initial) {
    for (;;) {
      std::string w(1, static_cast<char>(std::toupper(initial)));
      const int n = 1 + static_cast<int>(rng_.below(2));
      for (int i = 0; i < n; ++i) w += kTail[rng_.below(std::size(kTail))];
      w += static_cast<char>('a' + rng_.below(26));
      std::string low = w;
      for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (used_.insert(low).second) return w;
    }
  }

  Rng& rng_;
  std::vector<std::pair<char, char>> pairs_;
  std::size_t next_ = 0;
  std::set<std::string> used_;
};

std::string safe_variant(const Person& p, Rng& rng) {
  switch (rng.below(5)) {
    case 0: return p.given + " " + p.family;
    case 1: {
      std::string up = p.given + " " + p.family;
      for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return up;
    }
    case 2: return p.given + " " + static_cast<char>('A' + rng.below(26)) + ". " + p.family;
    case 3: return p.family + ", " + p.given;
    default: return p.given + " " + p.family + " III";
  }
}

std::string pad(std::size_t n) {
  std::string s = std::to_string(n);
  return std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

}  // namespace

LinkageFixture generate_linkage_fixture(std::size_t n_persons, std::uint64_t seed) {
  if (n_persons < 1) throw std::invalid_argument("linkage fixture needs at least one person");
  Rng rng(seed);
  NameBook names(rng);
  std::vector<Person> people(n_persons);
  for (Person& p : people) {
    std::tie(p.given, p.family) = names.next();
    const double u = rng.uniform();
    p.in_a = u >= 0.15;
    p.in_b = u < 0.85;
    if (p.in_a && p.in_b && rng.uniform() < 0.05) {
      // Rewritten beyond recognition: new tokens and new initials.
      const auto [g, f] = names.next();
      p.b_name = g + " " + f;
    } else {
      p.b_name = safe_variant(p, rng);
    }
  }

  struct Work {
    std::string title;
    std::vector<std::size_t> authors;
  };
  std::vector<Work> works;
  std::set<std::string> titles;
  for (std::size_t i = 0; i < n_persons * 2; ++i) {
    Work w;
    do {
      w.title.clear();
      const int n = 4 + static_cast<int>(rng.below(4));
      for (int k = 0; k < n; ++k) {
        std::string t = kTitleWords[rng.below(std::size(kTitleWords))];
        if (k == 0) t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
        w.title += (k ? " " : "") + t;
      }
    } while (!titles.insert(w.title).second);
    w.authors.push_back(i % n_persons);
    const auto extra = rng.below(3);
    for (std::uint64_t k = 0; k < extra; ++k) {
      const std::size_t a = rng.below(n_persons);
      if (std::find(w.authors.begin(), w.authors.end(), a) == w.authors.end()) w.authors.push_back(a);
    }
    works.push_back(std::move(w));
  }

  auto build = [&](bool side_a) {
    const SourceTag tag = side_a ? SourceTag::kRegistry : SourceTag::kGraph;
    std::vector<ScholarProfile> scholars(n_persons);
    std::vector<Publication> pubs;
    for (std::size_t i = 0; i < n_persons; ++i) {
      scholars[i].ids.push_back({tag, "A" + pad(i)});
      scholars[i].display_name = side_a ? people[i].given + " " + people[i].family : people[i].b_name;
    }
    for (std::size_t w = 0; w < works.size(); ++w) {
      Publication p;
      p.id = {tag, "W" + pad(w)};
      p.title = side_a ? works[w].title : works[w].title + ".";
      p.year = 2000 + static_cast<int>(w % 24);
      for (std::size_t a : works[w].authors) {
        if (side_a ? people[a].in_a : people[a].in_b) {
          p.author_ids.push_back(scholars[a].primary_id());
          scholars[a].publication_ids.push_back(p.id);
        }
      }
      if (!p.author_ids.empty()) pubs.push_back(std::move(p));
    }
    std::vector<ScholarProfile> present;
    for (std::size_t i = 0; i < n_persons; ++i) {
      if (side_a ? people[i].in_a : people[i].in_b) present.push_back(std::move(scholars[i]));
    }
    return Corpus(std::move(pubs), std::move(present), {});
  };

  LinkageFixture f;
  f.source_a = build(true);
  f.source_b = build(false);
  for (std::size_t i = 0; i < n_persons; ++i) {
    if (people[i].in_a && people[i].in_b) {
      f.planted.emplace(SourceId{SourceTag::kRegistry, "A" + pad(i)}, SourceId{SourceTag::kGraph, "A" + pad(i)});
    }
  }
  return f;
}

}  // namespace revmatch

#include <gtest/gtest.h>

#include "revmatch/linkage.hpp"
#include "revmatch/synth.hpp"
#include "revmatch/util/rng.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

namespace revmatch {
namespace {

using testing::gid;
using testing::pub;
using testing::rid;
using testing::scholar;
using testing::TempDir;

std::vector<std::string> words(std::string_view t) { return normalize_title(t).words; }
std::vector<std::string> name(std::string_view n) { return normalize_name(n).tokens; }

TEST(NormalizeTitle, Examples) {
  EXPECT_EQ(words("Deep Learning, for CATS!"), (std::vector<std::string>{"deep", "learning", "for", "cats"}));
  EXPECT_TRUE(words("").empty());
  EXPECT_TRUE(words("  ...  ").empty());
  EXPECT_EQ(words("Graphs and trees"), (std::vector<std::string>{"graphs", "and", "trees"}));
  EXPECT_EQ(words("Étude « globale »"), (std::vector<std::string>{"étude", "globale"}));
  EXPECT_EQ(words("x+y=z ≤ 1"), (std::vector<std::string>{"xyz", "1"}));
}

TEST(NormalizeTitle, NfcComposesBeforeComparing) {
  EXPECT_EQ(words("Café"), words("Café"));
}

std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {"a", "B", "c", "Ü", "é", " ", "  ", ",", "!", "-", "'", "\u2014",
                                                  "¿", "Ω", "5", "\t", "$", "–", "q", "Z", " "};
  std::string s;
  const auto n = rng.below(25);
  for (std::uint64_t i = 0; i < n; ++i) s += pieces[rng.below(pieces.size())];
  return s;
}

TEST(NormalizeTitle, PropertiesOnRandomText) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::string t = random_text(rng);
    const NormalizedTitle n = normalize_title(t);
    for (const auto& w : n.words) {
      ASSERT_FALSE(w.empty());
      for (unsigned char c : w) {
        ASSERT_FALSE(c < 0x80 && (std::ispunct(c) || std::isupper(c) || std::isspace(c))) << t;
      }
      ASSERT_EQ(w.find("Ü"), std::string::npos);
      ASSERT_EQ(w.find("\u2014"), std::string::npos);
      ASSERT_EQ(w.find("¿"), std::string::npos);
    }
    EXPECT_EQ(normalize_title(n.joined()), n) << t;
  }
}

TEST(TitlesMatch, Examples) {
  EXPECT_TRUE(titles_match("A Study of X", "a study, of x"));
  EXPECT_FALSE(titles_match("a study of", "a study of x"));
  EXPECT_FALSE(titles_match("of study a", "a study of"));
}

TEST(TitlesMatch, ReflexiveAndSymmetric) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string a = random_text(rng);
    const std::string b = random_text(rng);
    EXPECT_TRUE(titles_match(a, a));
    EXPECT_EQ(titles_match(a, b), titles_match(b, a));
  }
}

TEST(NormalizeName, Examples) {
  EXPECT_EQ(name("Lǚ Wei"), (std::vector<std::string>{"lu", "wei"}));
  EXPECT_EQ(name("John Smith III"), (std::vector<std::string>{"john", "smith", "third"}));
  EXPECT_EQ(name("MARIA A. ZULUAGA"), (std::vector<std::string>{"maria", "a", "zuluaga"}));
  EXPECT_EQ(name("Zhāng Sān"), (std::vector<std::string>{"zhang", "san"}));
}

TEST(NormalizeName, RomanNumeralsOnlyInSuffixPosition) {
  EXPECT_EQ(name("Henry VIII"), (std::vector<std::string>{"henry", "eighth"}));
  EXPECT_EQ(name("Vi Nguyen"), (std::vector<std::string>{"vi", "nguyen"}));
  EXPECT_EQ(name("Li IV Chen"), (std::vector<std::string>{"li", "iv", "chen"}));
  RomanNumeralTable custom{{"IX", "ninth"}};
  EXPECT_EQ(normalize_name("Karl IX", custom).tokens, (std::vector<std::string>{"karl", "ninth"}));
}

// A two-source corpus where `b` holds co-authors of `title`.
struct MatchSetup {
  Corpus b;
  std::vector<const Publication*> matched;
};

MatchSetup co_authors(const std::vector<std::string>& names) {
  std::vector<SourceId> ids;
  std::vector<ScholarProfile> s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    ids.push_back(gid("B" + std::to_string(i)));
    s.push_back(scholar(ids.back(), names[i], {gid("Q1")}));
  }
  MatchSetup m{Corpus({pub(gid("Q1"), "Shared Title", ids)}, s, {}), {}};
  m.matched = {&m.b.publications()[0]};
  return m;
}

TEST(MatchScholar, LargestOverlapWins) {
  auto m = co_authors({"Maria A. Zuluaga", "Mario Rossi"});
  const auto a = scholar(rid("X"), "Maria Zuluaga", {});
  EXPECT_EQ(match_scholar(a, m.matched, m.b), gid("B0"));
}

TEST(MatchScholar, EmptyCandidateSet) {
  const Corpus empty;
  EXPECT_FALSE(match_scholar(scholar(rid("X"), "Anyone", {}), {}, empty).has_value());
}

TEST(MatchScholar, TieResolvedByInitialsOrRefused) {
  auto m = co_authors({"Maria Zuluaga", "Marta Zuluaga"});
  EXPECT_FALSE(match_scholar(scholar(rid("X"), "M. Zuluaga", {}), m.matched, m.b).has_value());
  auto m2 = co_authors({"Maria Zuluaga", "Karl Zuluaga"});
  EXPECT_EQ(match_scholar(scholar(rid("X"), "M. Zuluaga", {}), m2.matched, m2.b), gid("B0"));
}

TEST(MatchScholar, ZeroOverlapFallsBackToInitials) {
  auto m = co_authors({"Jianhua Wu", "Peter Klein"});
  EXPECT_EQ(match_scholar(scholar(rid("X"), "J. W.", {}), m.matched, m.b), gid("B0"));
  EXPECT_FALSE(match_scholar(scholar(rid("X"), "Q. R.", {}), m.matched, m.b).has_value());
}

TEST(MatchScholar, OnlyCommonCoAuthorsAreCandidates) {
  std::vector<ScholarProfile> s = {scholar(gid("B0"), "Maria Zuluaga", {gid("Q1")}),
                                   scholar(gid("B1"), "Maria Zuluaga Lopez", {gid("Q1"), gid("Q2")})};
  const Corpus b({pub(gid("Q1"), "One", {gid("B0"), gid("B1")}), pub(gid("Q2"), "Two", {gid("B1")})}, s, {});
  std::vector<const Publication*> matched = {&b.publications()[0], &b.publications()[1]};
  EXPECT_EQ(match_scholar(scholar(rid("X"), "Maria Zuluaga", {}), matched, b), gid("B1"));
}

TEST(VerifyMatch, EvidenceCounts) {
  const Corpus a({pub(rid("p1"), "Shared One", {rid("a")}), pub(rid("p2"), "Shared Two", {rid("a")}),
                  pub(rid("p3"), "Mine Only", {rid("a")})},
                 {scholar(rid("a"), "A", {rid("p1"), rid("p2"), rid("p3")})}, {});
  const Corpus b1({pub(gid("q1"), "shared one.", {gid("b")})}, {scholar(gid("b"), "B", {gid("q1")})}, {});
  const Corpus b2({pub(gid("q1"), "Shared One", {gid("b")}), pub(gid("q2"), "SHARED two", {gid("b")})},
                  {scholar(gid("b"), "B", {gid("q1"), gid("q2")})}, {});
  const Corpus b3({pub(gid("q1"), "Other", {gid("b")})}, {scholar(gid("b"), "B", {gid("q1")})}, {});
  auto r1 = verify_match(a.scholars()[0], a, b1.scholars()[0], b1);
  EXPECT_TRUE(r1.matched);
  ASSERT_EQ(r1.evidence.size(), 1u);
  EXPECT_EQ(r1.evidence[0].right_title, "shared one.");
  EXPECT_EQ(verify_match(a.scholars()[0], a, b2.scholars()[0], b2).evidence.size(), 2u);
  EXPECT_FALSE(verify_match(a.scholars()[0], a, b3.scholars()[0], b3).matched);
}

TEST(LinkSources, SinglePlantedIdentity) {
  const Corpus a({pub(rid("p1"), "Robust Kernel Methods", {rid("a1")}), pub(rid("p2"), "Unrelated", {rid("a2")})},
                 {scholar(rid("a1"), "Ana Torres", {rid("p1")}), scholar(rid("a2"), "Ben Okafor", {rid("p2")})}, {});
  const Corpus b({pub(gid("q1"), "Robust kernel methods.", {gid("b1"), gid("b2")})},
                 {scholar(gid("b1"), "A. Torres", {gid("q1")}), scholar(gid("b2"), "Lee Park", {gid("q1")})}, {});
  const LinkTable t = link_sources(a, b);
  ASSERT_EQ(t.entries.size(), 1u);
  EXPECT_EQ(t.entries[0].left, rid("a1"));
  EXPECT_EQ(t.entries[0].right, gid("b1"));
  EXPECT_EQ((oracle::link_all_pairs(a, b)), (std::set<std::pair<SourceId, SourceId>>{{rid("a1"), gid("b1")}}));
}

TEST(LinkSources, NoSharedTitles) {
  const Corpus a({pub(rid("p1"), "Alpha", {rid("a1")})}, {scholar(rid("a1"), "Ana Torres", {rid("p1")})}, {});
  const Corpus b({pub(gid("q1"), "Beta", {gid("b1")})}, {scholar(gid("b1"), "Ana Torres", {gid("q1")})}, {});
  EXPECT_TRUE(link_sources(a, b).entries.empty());
}

TEST(LinkSources, UnrecognisableNameIsNotLinked) {
  const Corpus a({pub(rid("p1"), "Alpha", {rid("a1")})}, {scholar(rid("a1"), "Ana Torres", {rid("p1")})}, {});
  const Corpus b({pub(gid("q1"), "Alpha", {gid("b1")})}, {scholar(gid("b1"), "Kwame Mensah", {gid("q1")})}, {});
  EXPECT_TRUE(link_sources(a, b).entries.empty());
}

TEST(LinkSources, AgreesWithAllPairsOracleOnFixtures) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const LinkageFixture f = generate_linkage_fixture(60, seed);
    LinkOptions opts;
    opts.jobs = 2;
    const LinkTable t = link_sources(f.source_a, f.source_b, opts);
    std::set<std::pair<SourceId, SourceId>> got;
    for (const auto& e : t.entries) {
      got.emplace(e.left, e.right);
      EXPECT_TRUE(f.planted.count({e.left, e.right})) << "false merge " << e.left.key() << " " << e.right.key();
      const auto v = verify_match(*f.source_a.find_scholar(e.left), f.source_a, *f.source_b.find_scholar(e.right),
                                  f.source_b);
      EXPECT_TRUE(v.matched);
      EXPECT_EQ(v.evidence, e.evidence);
    }
    EXPECT_EQ(got, oracle::link_all_pairs(f.source_a, f.source_b)) << "seed " << seed;
    EXPECT_FALSE(got.empty());
  }
}

TEST(LinkSources, JobCountDoesNotChangeOutput) {
  const LinkageFixture f = generate_linkage_fixture(80, 3);
  LinkOptions one, four;
  four.jobs = 4;
  EXPECT_EQ(link_sources(f.source_a, f.source_b, one), link_sources(f.source_a, f.source_b, four));
}

TEST(LinkTable, SaveLoadRoundTrip) {
  TempDir dir;
  const LinkageFixture f = generate_linkage_fixture(30, 5);
  const LinkTable t = link_sources(f.source_a, f.source_b);
  save_links(t, dir / "links.jsonl");
  EXPECT_EQ(load_links(dir / "links.jsonl"), t);
}

}  // namespace
}  // namespace revmatch

#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>

#include "revmatch/corpus.hpp"
#include "revmatch/util/io.hpp"
#include "revmatch/util/rng.hpp"
#include "support/builders.hpp"

namespace revmatch {
namespace {

using testing::gid;
using testing::pub;
using testing::scholar;
using testing::TempDir;

int h(std::vector<std::int64_t> v) { return compute_h_index(v); }

TEST(HIndex, Examples) {
  EXPECT_EQ(h({10, 8, 5, 4, 3}), 4);
  EXPECT_EQ(h({}), 0);
  EXPECT_EQ(h({1, 1, 1}), 1);
  EXPECT_EQ(h({0, 0}), 0);
  EXPECT_EQ(h({100}), 1);
}

// Definition checked directly: the largest h with at least h entries >= h.
int h_oracle(const std::vector<std::int64_t>& v) {
  int best = 0;
  for (int cand = 0; cand <= static_cast<int>(v.size()); ++cand) {
    const auto n = std::count_if(v.begin(), v.end(), [&](std::int64_t c) { return c >= cand; });
    if (n >= cand) best = cand;
  }
  return best;
}

TEST(HIndex, PermutationInvariantAndMonotone) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::int64_t> v(rng.below(15));
    for (auto& c : v) c = rng.between(0, 20);
    const int base = h(v);
    EXPECT_EQ(base, h_oracle(v));
    rng.shuffle(v);
    EXPECT_EQ(h(v), base);
    v.push_back(rng.between(0, 20));
    EXPECT_GE(h(v), base);
  }
}

Corpus tiny_corpus() {
  std::vector<Publication> pubs = {pub(gid("P1"), "Alpha", {gid("A1")}, 2019, 5),
                                   pub(gid("P2"), "Beta", {gid("A1")}, 2020, 3),
                                   pub(gid("P3"), "Gamma", {gid("A1")}, 2021, 1)};
  pubs[0].abstract = "About alpha.";
  pubs[1].venue = "Venue";
  std::vector<ScholarProfile> s = {scholar(gid("A1"), "Ada Lovelace", {gid("P1"), gid("P2"), gid("P3")})};
  return Corpus(std::move(pubs), std::move(s), {});
}

TEST(LoadCorpus, ThreePublicationsOneScholar) {
  TempDir dir;
  save_corpus(tiny_corpus(), dir.path());
  const Corpus c = load_corpus(dir.path());
  EXPECT_EQ(c.publications().size(), 3u);
  ASSERT_EQ(c.scholars().size(), 1u);
  EXPECT_EQ(c.scholars()[0].h_index, 2);
}

TEST(LoadCorpus, RoundTripIsFieldIdentical) {
  TempDir dir;
  Corpus c = tiny_corpus();
  ReviewRecord r;
  r.paper_id = gid("P1");
  r.reviewer_ids = {gid("A1")};
  r.l1_category = "110";
  r.l3_category = "1101010";
  std::vector<Publication> pubs = c.publications();
  std::vector<ScholarProfile> sch = c.scholars();
  sch.push_back(scholar(gid("A2"), "Bob", {}));
  pubs[0].author_ids = {gid("A2")};
  c = Corpus(pubs, sch, {r});
  save_corpus(c, dir.path());
  const Corpus back = load_corpus(dir.path());
  EXPECT_EQ(back, c);
  TempDir dir2;
  save_corpus(back, dir2.path());
  for (const auto* f : {"publications.jsonl", "scholars.jsonl", "records.jsonl"}) {
    EXPECT_EQ(read_file(dir.path() / f), read_file(dir2.path() / f)) << f;
  }
}

TEST(LoadCorpus, DanglingReferenceListsOffender) {
  TempDir dir;
  save_corpus(tiny_corpus(), dir.path());
  std::ofstream(dir.path() / "scholars.jsonl", std::ios::app)
      << R"({"ids":[{"tag":"graph-source","local_id":"A9"}],"display_name":"X","publication_ids":[{"tag":"graph-source","local_id":"P404"}]})"
      << "\n";
  try {
    load_corpus(dir.path());
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    ASSERT_EQ(e.offenders().size(), 1u);
    EXPECT_NE(e.offenders()[0].find(gid("P404").key()), std::string::npos);
  }
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  TempDir dir;
  save_corpus(tiny_corpus(), dir.path());
  std::ofstream(dir.path() / "publications.jsonl", std::ios::app) << "{not json\n";
  try {
    load_corpus(dir.path());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(LoadCorpus, EmptyFileSetGivesEmptyCorpus) {
  TempDir dir;
  const Corpus c = load_corpus(dir.path());
  EXPECT_TRUE(c.publications().empty());
  EXPECT_TRUE(c.scholars().empty());
  EXPECT_TRUE(c.records().empty());
}

TEST(Corpus, RejectsBrokenPublications) {
  EXPECT_THROW(Corpus({pub(gid("P1"), "  ", {gid("A1")})}, {scholar(gid("A1"), "A", {})}, {}), IntegrityError);
  EXPECT_THROW(Corpus({pub(gid("P1"), "T", {})}, {}, {}), IntegrityError);
  EXPECT_THROW(Corpus({pub(gid("P1"), "T", {gid("A1")}, 2020, -1)}, {scholar(gid("A1"), "A", {})}, {}),
               IntegrityError);
}

TEST(Corpus, ScholarIdsMustHaveDistinctTags) {
  ScholarProfile s = scholar(gid("A1"), "A", {});
  s.ids.push_back(gid("A2"));
  EXPECT_THROW(Corpus({}, {s}, {}), IntegrityError);
}

TEST(SourceId, KeyRoundTrip) {
  const SourceId id{SourceTag::kReviewPlatform, "x:y"};
  EXPECT_EQ(SourceId::parse_key(id.key()), id);
  EXPECT_THROW(parse_source_tag("nope"), std::invalid_argument);
}

struct RecordFixture {
  Corpus corpus;
  ReviewRecord record;
};

RecordFixture record_fixture() {
  std::vector<Publication> pubs = {pub(gid("P1"), "Paper", {gid("AU")})};
  std::vector<ScholarProfile> s = {scholar(gid("AU"), "Author", {gid("P1")}), scholar(gid("R1"), "Rev", {}),
                                   scholar(gid("U1"), "Unq", {}), scholar(gid("Q1"), "Pot", {})};
  ReviewRecord r;
  r.paper_id = gid("P1");
  r.reviewer_ids = {gid("R1")};
  r.unqualified_ids = {gid("U1")};
  r.potential_ids = {gid("Q1")};
  r.l1_category = "110";
  r.l3_category = "1101010";
  return {Corpus(pubs, s, {}), r};
}

TEST(ValidateRecord, ConsistentRecordHasNoViolations) {
  const auto f = record_fixture();
  EXPECT_TRUE(validate_record(f.record, f.corpus).empty());
}

TEST(ValidateRecord, ReviewerInUnqualifiedPool) {
  auto f = record_fixture();
  f.record.unqualified_ids.push_back(gid("R1"));
  const auto v = validate_record(f.record, f.corpus);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].subject, gid("R1").key());
}

TEST(ValidateRecord, EmptyReviewers) {
  auto f = record_fixture();
  f.record.reviewer_ids.clear();
  EXPECT_EQ(validate_record(f.record, f.corpus).size(), 1u);
}

TEST(ValidateRecord, OverlappingPoolsAndAuthors) {
  auto f = record_fixture();
  f.record.potential_ids.push_back(gid("U1"));
  f.record.reviewer_ids.push_back(gid("AU"));
  const auto v = validate_record(f.record, f.corpus);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].subject, gid("U1").key());
  EXPECT_EQ(v[1].subject, gid("AU").key());
}

}  // namespace
}  // namespace revmatch

#include <gtest/gtest.h>

#include "revmatch/pipeline.hpp"
#include "revmatch/synth.hpp"
#include "revmatch/util/io.hpp"
#include "support/builders.hpp"

namespace revmatch {
namespace {

using testing::TempDir;

struct SynthWorld {
  ProviderClient client{[] {
    ProviderConfig c;
    c.stub_mode = true;
    return c;
  }()};
  Taxonomy taxonomy = load_taxonomy(default_taxonomy_path());

  SynthWorld() { taxonomy.embed_nodes(client); }

  Corpus generate(std::uint64_t seed, std::size_t n_records = 30, std::size_t n_categories = 3) {
    SyntheticConfig c;
    c.seed = seed;
    c.n_records = n_records;
    c.n_categories = n_categories;
    return generate_synthetic_corpus(c, taxonomy, client);
  }
};

TEST(Synthetic, RecordsAreValidAndSized) {
  SynthWorld w;
  const Corpus c = w.generate(5);
  EXPECT_EQ(c.records().size(), 30u);
  for (const ReviewRecord& r : c.records()) {
    EXPECT_TRUE(validate_record(r, c).empty()) << r.record_id();
    EXPECT_TRUE(w.taxonomy.contains(r.l3_category));
    EXPECT_EQ(w.taxonomy.node(r.l3_category).level, 3);
    EXPECT_EQ(w.taxonomy.ancestor_at(r.l3_category, 1), r.l1_category);
  }
}

TEST(Synthetic, PublicationsClassifyIntoTheirCategory) {
  SynthWorld w;
  const Corpus c = w.generate(6, 20, 2);
  std::set<std::string> categories;
  for (const ReviewRecord& r : c.records()) categories.insert(r.l3_category);
  // Every reviewer has classified work in the record's category.
  for (const ReviewRecord& r : c.records()) {
    for (const SourceId& id : r.reviewer_ids) {
      const ScholarProfile* s = c.find_scholar(id);
      ASSERT_NE(s, nullptr);
      int in_cp = 0;
      for (const Publication* p : c.publications_of(*s)) {
        in_cp += classify_publication(*p, w.taxonomy, w.client).l3_node == r.l3_category;
      }
      EXPECT_GE(in_cp, 1) << id.key();
    }
  }
  EXPECT_EQ(categories.size(), 2u);
}

TEST(Synthetic, SameSeedSameBytes) {
  SynthWorld w;
  TempDir a, b;
  save_corpus(w.generate(11), a.path());
  save_corpus(w.generate(11), b.path());
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename().string())) << entry.path();
  }
  TempDir other;
  save_corpus(w.generate(12), other.path());
  EXPECT_NE(read_file(a / "records.jsonl"), read_file(other / "records.jsonl"));
}

TEST(LinkageFixtureTest, PlantedPairsReferToBothSides) {
  const LinkageFixture f = generate_linkage_fixture(40, 3);
  EXPECT_FALSE(f.planted.empty());
  for (const auto& [a, b] : f.planted) {
    EXPECT_NE(f.source_a.find_scholar(a), nullptr);
    EXPECT_NE(f.source_b.find_scholar(b), nullptr);
  }
  const LinkageFixture again = generate_linkage_fixture(40, 3);
  EXPECT_EQ(again.source_a, f.source_a);
  EXPECT_EQ(again.planted, f.planted);
}

}  // namespace
}  // namespace revmatch

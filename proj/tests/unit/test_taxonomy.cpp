#include <gtest/gtest.h>

#include "revmatch/pipeline.hpp"
#include "revmatch/taxonomy.hpp"
#include "revmatch/util/rng.hpp"
#include "support/builders.hpp"

namespace revmatch {
namespace {

using testing::gid;
using testing::pub;
using testing::TempDir;

TaxonomyNode node(std::string id, int level, std::string label, std::optional<std::string> parent = {}) {
  return {std::move(id), level, std::move(label), std::move(parent), std::nullopt};
}

// 1 ─┬─ 11 ─┬─ 111
//    │      └─ 112
//    └─ 12 ─── 121
// 2 ─── 21 ─── 211
Taxonomy small_tree() {
  return Taxonomy({node("1", 1, "Science"), node("11", 2, "Physics", "1"), node("111", 3, "Optics", "11"),
                   node("112", 3, "Acoustics", "11"), node("12", 2, "Biology", "1"), node("121", 3, "Botany", "12"),
                   node("2", 1, "Arts"), node("21", 2, "Music", "2"), node("211", 3, "Harmony", "21")});
}

ProviderClient stub_client() {
  ProviderConfig c;
  c.stub_mode = true;
  c.stub_dim = 64;
  return ProviderClient(c);
}

TEST(Taxonomy, StructureQueries) {
  const Taxonomy t = small_tree();
  EXPECT_EQ(t.leaves(), (std::vector<std::string>{"111", "112", "121", "211"}));
  EXPECT_EQ(t.children("11"), (std::vector<std::string>{"111", "112"}));
  EXPECT_TRUE(t.children("111").empty());
  EXPECT_EQ(t.label_path("112"), "Science › Physics › Acoustics");
  EXPECT_EQ(t.ancestor_at("112", 1), "1");
  EXPECT_EQ(t.ancestor_at("112", 3), "112");
  EXPECT_THROW(t.node("999"), TaxonomyError);
}

TEST(Taxonomy, RejectsMalformedTrees) {
  EXPECT_THROW(Taxonomy({node("1", 1, "A", "0")}), TaxonomyError);
  EXPECT_THROW(Taxonomy({node("1", 1, "A"), node("2", 3, "B", "1")}), TaxonomyError);
  EXPECT_THROW(Taxonomy({node("1", 1, "A"), node("1", 1, "B")}), TaxonomyError);
  EXPECT_THROW(Taxonomy({node("1", 1, "A"), node("2", 2, "B")}), TaxonomyError);
  EXPECT_THROW(Taxonomy({node("1", 4, "A")}), TaxonomyError);
}

TEST(Descendants, Examples) {
  const Taxonomy t = small_tree();
  EXPECT_TRUE(descendants("111", t).empty());
  EXPECT_EQ(descendants("1", t), (std::set<std::string>{"11", "111", "112", "12", "121"}));
  EXPECT_THROW(descendants("nope", t), TaxonomyError);
}

TEST(Descendants, SubtreeSizesAndSiblingDisjointnessOnBundledTaxonomy) {
  const Taxonomy t = load_taxonomy(default_taxonomy_path());
  for (const TaxonomyNode& n : t.nodes()) {
    // Count the subtree by walking ancestors of every node.
    std::size_t subtree = 0;
    for (const TaxonomyNode& m : t.nodes()) {
      if (m.level >= n.level && t.ancestor_at(m.node_id, n.level) == n.node_id) ++subtree;
    }
    EXPECT_EQ(descendants(n.node_id, t).size(), subtree - 1) << n.node_id;
    const auto& kids = t.children(n.node_id);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        const auto a = descendants(kids[i], t), b = descendants(kids[j], t);
        for (const auto& x : a) EXPECT_FALSE(b.count(x));
      }
    }
  }
}

TEST(BundledTaxonomy, HasThreeLevelsAndUniqueLeafAncestors) {
  const Taxonomy t = load_taxonomy(default_taxonomy_path());
  EXPECT_GE(t.leaves().size(), 20u);
  std::set<int> levels;
  for (const auto& n : t.nodes()) levels.insert(n.level);
  EXPECT_EQ(levels, (std::set<int>{1, 2, 3}));
  for (const auto& leaf : t.leaves()) EXPECT_EQ(t.node(t.ancestor_at(leaf, 1)).level, 1);
}

TEST(LoadTaxonomy, MissingFileIsAnError) {
  EXPECT_THROW(load_taxonomy("/nonexistent/taxonomy.jsonl"), TaxonomyError);
}

TEST(Classify, LabelPathTextHitsItsNodeWithScoreOne) {
  Taxonomy t = small_tree();
  auto client = stub_client();
  t.embed_nodes(client);
  for (const auto& leaf : t.leaves()) {
    Publication p = pub(gid("P"), t.label_path(leaf), {gid("A")});
    const SubjectAssignment a = classify_publication(p, t, client);
    EXPECT_EQ(a.l3_node, leaf);
    EXPECT_NEAR(a.score, 1.0, 1e-12);
  }
}

TEST(Classify, UsesTitleAndAbstract) {
  Publication p = pub(gid("P"), "Title", {gid("A")});
  EXPECT_EQ(publication_text(p), "Title");
  p.abstract = "Abstract.";
  EXPECT_EQ(publication_text(p), "Title Abstract.");
}

TEST(Classify, ScaleInvarianceAndTieBreak) {
  Taxonomy t = small_tree();
  Rng rng(5);
  auto random_unit = [&] {
    std::vector<double> v(6);
    for (double& x : v) x = rng.normal();
    return v;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::vector<double>> raw;
    for (const auto& leaf : t.leaves()) {
      raw[leaf] = random_unit();
      t.set_embedding(leaf, EmbeddingVector::normalized(raw[leaf]));
    }
    const auto q = EmbeddingVector::normalized(random_unit());
    const std::string before = classify_embedding(gid("P"), q, t).l3_node;
    for (auto& [leaf, v] : raw) {
      for (double& x : v) x *= 3.0;
      t.set_embedding(leaf, EmbeddingVector::normalized(v));
    }
    EXPECT_EQ(classify_embedding(gid("P"), q, t).l3_node, before);
  }
  const auto same = EmbeddingVector::normalized({1, 0, 0});
  for (const auto& leaf : t.leaves()) t.set_embedding(leaf, EmbeddingVector::normalized({0, 1, 0}));
  t.set_embedding("112", same);
  t.set_embedding("211", same);
  EXPECT_EQ(classify_embedding(gid("P"), same, t).l3_node, "112");
}

TEST(Classify, EmptyTaxonomyIsAnError) {
  const Taxonomy t({node("1", 1, "Only")});
  auto client = stub_client();
  EXPECT_THROW(classify_publication(pub(gid("P"), "x", {gid("A")}), t, client), TaxonomyError);
}

TEST(SubjectProfile, Examples) {
  const Taxonomy t = small_tree();
  AssignmentMap m;
  m[gid("P1")] = {gid("P1"), "111", 0.5};
  m[gid("P2")] = {gid("P2"), "111", 0.4};
  m[gid("P3")] = {gid("P3"), "121", 0.4};
  const std::vector<SourceId> same = {gid("P1"), gid("P2")};
  EXPECT_EQ(scholar_subject_profile(same, m, t).l3, (std::set<std::string>{"111"}));
  const std::vector<SourceId> two = {gid("P1"), gid("P3")};
  const SubjectProfile p = scholar_subject_profile(two, m, t);
  EXPECT_EQ(p.l3.size(), 2u);
  EXPECT_EQ(p.l2, (std::set<std::string>{"11", "12"}));
  EXPECT_EQ(p.l1, (std::set<std::string>{"1"}));
  EXPECT_EQ(scholar_subject_profile({}, m, t), SubjectProfile{});
  const std::vector<SourceId> missing = {gid("P9")};
  EXPECT_THROW(scholar_subject_profile(missing, m, t), TaxonomyError);
}

TEST(SubjectProfile, MonotoneUnderAddedPublications) {
  const Taxonomy t = small_tree();
  Rng rng(8);
  AssignmentMap m;
  std::vector<SourceId> all;
  for (int i = 0; i < 30; ++i) {
    all.push_back(gid("P" + std::to_string(i)));
    m[all.back()] = {all.back(), t.leaves()[rng.below(t.leaves().size())], 0.0};
  }
  for (std::size_t k = 0; k < all.size(); ++k) {
    const auto a = scholar_subject_profile(std::span(all).first(k), m, t);
    const auto b = scholar_subject_profile(std::span(all).first(k + 1), m, t);
    EXPECT_TRUE(std::includes(b.l3.begin(), b.l3.end(), a.l3.begin(), a.l3.end()));
    EXPECT_TRUE(std::includes(b.l2.begin(), b.l2.end(), a.l2.begin(), a.l2.end()));
    EXPECT_TRUE(std::includes(b.l1.begin(), b.l1.end(), a.l1.begin(), a.l1.end()));
  }
}

TEST(NearestSibling, ArgmaxExcludingSelf) {
  Taxonomy t = small_tree();
  // Cosines from 111: 112 -> 0.9, 121 -> 0.2, 211 -> 0.
  t.set_embedding("111", EmbeddingVector::normalized({1, 0, 0}));
  t.set_embedding("112", EmbeddingVector::normalized({0.9, std::sqrt(1 - 0.81), 0}));
  t.set_embedding("121", EmbeddingVector::normalized({0.2, 0, std::sqrt(1 - 0.04)}));
  t.set_embedding("211", EmbeddingVector::normalized({0, 1, 0}));
  EXPECT_EQ(nearest_sibling_category("111", t), "112");
  EXPECT_EQ(most_distant_category("111", t), "211");
  for (const auto& leaf : t.leaves()) EXPECT_NE(nearest_sibling_category(leaf, t), leaf);
  EXPECT_THROW(nearest_sibling_category("11", t), TaxonomyError);
  const Taxonomy single({node("1", 1, "A"), node("11", 2, "B", "1"), node("111", 3, "C", "11")});
  EXPECT_THROW(nearest_sibling_category("111", single), TaxonomyError);
}

TEST(NodeEmbeddings, SidecarRoundTripAndInvalidation) {
  TempDir dir;
  Taxonomy t = small_tree();
  auto client = stub_client();
  t.embed_nodes(client);
  save_node_embeddings(t, client.embedder_id(), dir / "emb.jsonl");
  Taxonomy fresh = small_tree();
  EXPECT_EQ(load_node_embeddings(fresh, client.embedder_id(), dir / "emb.jsonl"), t.nodes().size());
  for (const auto& n : t.nodes()) EXPECT_EQ(fresh.node(n.node_id).embedding, n.embedding);
  Taxonomy other = small_tree();
  EXPECT_EQ(load_node_embeddings(other, "another-model", dir / "emb.jsonl"), 0u);
  Taxonomy relabeled({node("1", 1, "Sciences"), node("11", 2, "Physics", "1"), node("111", 3, "Optics", "11"),
                      node("112", 3, "Acoustics", "11"), node("12", 2, "Biology", "1"),
                      node("121", 3, "Botany", "12"), node("2", 1, "Arts"), node("21", 2, "Music", "2"),
                      node("211", 3, "Harmony", "21")});
  // Every node under "1" has a new label path; the Arts branch survives.
  EXPECT_EQ(load_node_embeddings(relabeled, client.embedder_id(), dir / "emb.jsonl"), 3u);
}

TEST(Assignments, SaveLoadRoundTrip) {
  TempDir dir;
  std::vector<SubjectAssignment> v = {{gid("P1"), "111", 0.25}, {gid("P2"), "211", -0.5}};
  save_assignments(v, dir / "a.jsonl");
  EXPECT_EQ(load_assignments(dir / "a.jsonl"), v);
}

}  // namespace
}  // namespace revmatch

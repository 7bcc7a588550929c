#include "revmatch/taxonomy.hpp"

namespace revmatch {
namespace {

const EmbeddingVector& embedding_of(const Taxonomy& taxonomy, const std::string& node_id) {
  const TaxonomyNode& n = taxonomy.node(node_id);
  if (!n.embedding) throw TaxonomyError("taxonomy node " + node_id + " has no embedding");
  return *n.embedding;
}

// Leaves are sorted, so a strict comparison keeps the smallest id on ties.
template <typename Better>
std::string pick_leaf(const Taxonomy& taxonomy, const std::string& exclude, const EmbeddingVector& ref,
                      Better better, double* score_out) {
  std::string best;
  double best_score = 0.0;
  for (const std::string& id : taxonomy.leaves()) {
    if (id == exclude) continue;
    const double s = ref.dot(embedding_of(taxonomy, id));
    if (best.empty() || better(s, best_score)) {
      best = id;
      best_score = s;
    }
  }
  if (score_out) *score_out = best_score;
  return best;
}

}  // namespace

std::string publication_text(const Publication& pub) {
  if (!pub.abstract || pub.abstract->empty()) return pub.title;
  return pub.title + " " + *pub.abstract;
}

SubjectAssignment classify_embedding(const SourceId& pub_id, const EmbeddingVector& v,
                                     const Taxonomy& taxonomy) {
  if (taxonomy.leaves().empty()) throw TaxonomyError("taxonomy has no level-3 nodes");
  SubjectAssignment a;
  a.publication_id = pub_id;
  a.l3_node = pick_leaf(taxonomy, "", v, [](double s, double b) { return s > b; }, &a.score);
  return a;
}

SubjectAssignment classify_publication(const Publication& pub, const Taxonomy& taxonomy,
                                       TextEmbedder& embedder) {
  if (taxonomy.leaves().empty()) throw TaxonomyError("taxonomy has no level-3 nodes");
  return classify_embedding(pub.id, embedder.embed_text(publication_text(pub)), taxonomy);
}

SubjectProfile scholar_subject_profile(std::span<const SourceId> publication_ids,
                                       const AssignmentMap& assignments, const Taxonomy& taxonomy) {
  SubjectProfile p;
  for (const SourceId& id : publication_ids) {
    auto it = assignments.find(id);
    if (it == assignments.end()) throw TaxonomyError("publication " + id.key() + " has no subject assignment");
    const std::string& l3 = it->second.l3_node;
    p.l3.insert(l3);
    p.l2.insert(taxonomy.ancestor_at(l3, 2));
    p.l1.insert(taxonomy.ancestor_at(l3, 1));
  }
  return p;
}

std::string nearest_sibling_category(const std::string& c_p, const Taxonomy& taxonomy) {
  if (taxonomy.node(c_p).level != 3) throw TaxonomyError(c_p + " is not a level-3 node");
  if (taxonomy.leaves().size() < 2) throw TaxonomyError("need at least two level-3 nodes");
  return pick_leaf(taxonomy, c_p, embedding_of(taxonomy, c_p), [](double s, double b) { return s > b; }, nullptr);
}

std::string most_distant_category(const std::string& c_p, const Taxonomy& taxonomy) {
  if (taxonomy.node(c_p).level != 3) throw TaxonomyError(c_p + " is not a level-3 node");
  if (taxonomy.leaves().size() < 2) throw TaxonomyError("need at least two level-3 nodes");
  return pick_leaf(taxonomy, c_p, embedding_of(taxonomy, c_p), [](double s, double b) { return s < b; }, nullptr);
}

void save_assignments(std::span<const SubjectAssignment> assignments, const std::filesystem::path& path) {
  std::string out;
  for (const SubjectAssignment& a : assignments) {
    out += json{{"publication_id", a.publication_id.key()}, {"l3_node", a.l3_node}, {"score", a.score}}.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<SubjectAssignment> load_assignments(const std::filesystem::path& path) {
  std::vector<SubjectAssignment> out;
  read_jsonl(path, [&](const json& j, std::size_t) {
    SubjectAssignment a;
    a.publication_id = SourceId::parse_key(j.at("publication_id").get<std::string>());
    a.l3_node = j.at("l3_node").get<std::string>();
    a.score = j.at("score").get<double>();
    out.push_back(std::move(a));
  });
  return out;
}

}  // namespace revmatch

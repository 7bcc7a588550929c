#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "revmatch/corpus.hpp"
#include "revmatch/providers.hpp"

namespace revmatch {

/// Unknown node, empty taxonomy, missing embeddings.
class TaxonomyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaxonomyNode {
  std::string node_id;
  int level = 1;
  std::string label;
  std::optional<std::string> parent;
  std::optional<EmbeddingVector> embedding;
};

/// Three-level discipline tree (L1 broad domain, L3 specialized topic).
class Taxonomy {
 public:
  Taxonomy() = default;
  /// Checks levels and parent links; nodes are kept in input order.
  explicit Taxonomy(std::vector<TaxonomyNode> nodes);

  const std::vector<TaxonomyNode>& nodes() const { return nodes_; }
  const TaxonomyNode& node(const std::string& node_id) const;
  bool contains(const std::string& node_id) const { return index_.count(node_id) > 0; }
  const std::vector<std::string>& children(const std::string& node_id) const;
  /// Level-3 node ids in lexicographic order.
  const std::vector<std::string>& leaves() const { return leaves_; }

  /// "L1 › L2 › L3" labels from the root down to `node_id`.
  std::string label_path(const std::string& node_id) const;
  /// Ancestor at `level` (the node itself when its level matches).
  std::string ancestor_at(const std::string& node_id, int level) const;

  /// Embeds every node's label path with `embedder`.
  void embed_nodes(TextEmbedder& embedder);
  void set_embedding(const std::string& node_id, EmbeddingVector v);

 private:
  std::vector<TaxonomyNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::string>> children_;
  std::vector<std::string> leaves_;
};

/// taxonomy.jsonl: {node_id, level, label, parent?}
Taxonomy load_taxonomy(const std::filesystem::path& path);

/// Embedding sidecar: {node_id, embedder, content_hash, vector} per line.
/// Entries whose embedder or content hash no longer match are ignored.
void save_node_embeddings(const Taxonomy& taxonomy, const std::string& embedder_id,
                          const std::filesystem::path& path);
std::size_t load_node_embeddings(Taxonomy& taxonomy, const std::string& embedder_id,
                                 const std::filesystem::path& path);

struct SubjectAssignment {
  SourceId publication_id;
  std::string l3_node;
  double score = 0.0;  // cosine similarity

  bool operator==(const SubjectAssignment&) const = default;
};

/// Text embedded for a publication: title, plus " " and abstract if present.
std::string publication_text(const Publication& pub);

/// Level-3 node with maximal cosine to the publication text; ties go to the
/// lexicographically smallest node id.
SubjectAssignment classify_publication(const Publication& pub, const Taxonomy& taxonomy,
                                       TextEmbedder& embedder);
/// Same, for an already embedded publication.
SubjectAssignment classify_embedding(const SourceId& pub_id, const EmbeddingVector& v,
                                     const Taxonomy& taxonomy);

using AssignmentMap = std::unordered_map<SourceId, SubjectAssignment, SourceIdHash>;

struct SubjectProfile {
  std::set<std::string> l1;
  std::set<std::string> l2;
  std::set<std::string> l3;

  bool operator==(const SubjectProfile&) const = default;
};

/// Union of the scholar's publication assignments with ancestor closure.
SubjectProfile scholar_subject_profile(std::span<const SourceId> publication_ids,
                                       const AssignmentMap& assignments, const Taxonomy& taxonomy);

/// Most similar other level-3 node; ties go to the smallest node id.
std::string nearest_sibling_category(const std::string& c_p, const Taxonomy& taxonomy);
/// Least similar other level-3 node; ties go to the smallest node id.
std::string most_distant_category(const std::string& c_p, const Taxonomy& taxonomy);

/// Transitive children of `node_id`, excluding the node itself.
std::set<std::string> descendants(const std::string& node_id, const Taxonomy& taxonomy);

void save_assignments(std::span<const SubjectAssignment> assignments, const std::filesystem::path& path);
std::vector<SubjectAssignment> load_assignments(const std::filesystem::path& path);

}  // namespace revmatch

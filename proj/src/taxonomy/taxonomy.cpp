#include <algorithm>

#include "revmatch/taxonomy.hpp"
#include "revmatch/util/hash.hpp"

namespace revmatch {

Taxonomy::Taxonomy(std::vector<TaxonomyNode> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TaxonomyNode& n = nodes_[i];
    if (n.node_id.empty()) throw TaxonomyError("taxonomy node with empty id");
    if (n.level < 1 || n.level > 3) throw TaxonomyError("node " + n.node_id + ": level must be 1, 2 or 3");
    if (!index_.emplace(n.node_id, i).second) throw TaxonomyError("duplicate node id " + n.node_id);
  }
  for (const TaxonomyNode& n : nodes_) {
    if (n.level == 1) {
      if (n.parent) throw TaxonomyError("level-1 node " + n.node_id + " has a parent");
    } else {
      if (!n.parent) throw TaxonomyError("node " + n.node_id + " has no parent");
      auto it = index_.find(*n.parent);
      if (it == index_.end()) throw TaxonomyError("node " + n.node_id + ": unknown parent " + *n.parent);
      if (nodes_[it->second].level != n.level - 1) {
        throw TaxonomyError("node " + n.node_id + ": parent " + *n.parent + " is not one level up");
      }
      children_[*n.parent].push_back(n.node_id);
    }
    if (n.level == 3) leaves_.push_back(n.node_id);
  }
  for (auto& [id, kids] : children_) std::sort(kids.begin(), kids.end());
  std::sort(leaves_.begin(), leaves_.end());
}

const TaxonomyNode& Taxonomy::node(const std::string& node_id) const {
  auto it = index_.find(node_id);
  if (it == index_.end()) throw TaxonomyError("unknown taxonomy node " + node_id);
  return nodes_[it->second];
}

const std::vector<std::string>& Taxonomy::children(const std::string& node_id) const {
  static const std::vector<std::string> kNone;
  node(node_id);
  auto it = children_.find(node_id);
  return it == children_.end() ? kNone : it->second;
}

std::string Taxonomy::label_path(const std::string& node_id) const {
  std::vector<const TaxonomyNode*> chain;
  for (const TaxonomyNode* n = &node(node_id);; n = &node(*n->parent)) {
    chain.push_back(n);
    if (!n->parent) break;
  }
  std::string out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if (!out.empty()) out += " › ";
    out += (*it)->label;
  }
  return out;
}

std::string Taxonomy::ancestor_at(const std::string& node_id, int level) const {
  const TaxonomyNode* n = &node(node_id);
  if (level > n->level || level < 1) {
    throw TaxonomyError("node " + node_id + " has no ancestor at level " + std::to_string(level));
  }
  while (n->level > level) n = &node(*n->parent);
  return n->node_id;
}

void Taxonomy::embed_nodes(TextEmbedder& embedder) {
  for (TaxonomyNode& n : nodes_) n.embedding = embedder.embed_text(label_path(n.node_id));
}

void Taxonomy::set_embedding(const std::string& node_id, EmbeddingVector v) {
  node(node_id);
  nodes_[index_.at(node_id)].embedding = std::move(v);
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw TaxonomyError("taxonomy file not found: " + path.string());
  std::vector<TaxonomyNode> nodes;
  read_jsonl(path, [&](const json& j, std::size_t) {
    TaxonomyNode n;
    n.node_id = j.at("node_id").get<std::string>();
    n.level = j.at("level").get<int>();
    n.label = j.at("label").get<std::string>();
    if (j.contains("parent") && !j["parent"].is_null()) n.parent = j["parent"].get<std::string>();
    nodes.push_back(std::move(n));
  });
  if (nodes.empty()) throw TaxonomyError("taxonomy is empty: " + path.string());
  return Taxonomy(std::move(nodes));
}

void save_node_embeddings(const Taxonomy& taxonomy, const std::string& embedder_id,
                          const std::filesystem::path& path) {
  std::string out;
  for (const TaxonomyNode& n : taxonomy.nodes()) {
    if (!n.embedding) continue;
    json j = {{"node_id", n.node_id},
              {"embedder", embedder_id},
              {"content_hash", sha256_hex(taxonomy.label_path(n.node_id))},
              {"vector", *n.embedding}};
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

std::size_t load_node_embeddings(Taxonomy& taxonomy, const std::string& embedder_id,
                                 const std::filesystem::path& path) {
  std::size_t loaded = 0;
  read_jsonl(path, [&](const json& j, std::size_t) {
    const std::string id = j.at("node_id").get<std::string>();
    if (!taxonomy.contains(id) || j.at("embedder").get<std::string>() != embedder_id) return;
    if (j.at("content_hash").get<std::string>() != sha256_hex(taxonomy.label_path(id))) return;
    taxonomy.set_embedding(id, j.at("vector").get<EmbeddingVector>());
    ++loaded;
  });
  return loaded;
}

std::set<std::string> descendants(const std::string& node_id, const Taxonomy& taxonomy) {
  std::set<std::string> out;
  std::vector<std::string> stack = taxonomy.children(node_id);
  while (!stack.empty()) {
    std::string id = std::move(stack.back());
    stack.pop_back();
    for (const std::string& c : taxonomy.children(id)) stack.push_back(c);
    out.insert(std::move(id));
  }
  return out;
}

}  // namespace revmatch

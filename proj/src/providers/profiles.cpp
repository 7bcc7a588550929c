#include "revmatch/providers.hpp"
#include "revmatch/util/hash.hpp"

namespace revmatch {

PaperProfile profile_paper(ProviderClient& client, const Publication& paper) {
  PaperProfile p;
  p.paper_id = paper.id;
  p.summary = client.summarize_paper(paper.title, paper.abstract.value_or(""));
  p.vector = client.embed_text(p.summary.text);
  return p;
}

CandidateProfile profile_candidate(ProviderClient& client, const SourceId& scholar_id,
                                   std::span<const Publication* const> publications) {
  CandidateProfile c;
  c.scholar_id = scholar_id;
  std::string material;
  std::vector<SummaryText> article_summaries;
  for (const Publication* p : select_representative_pubs(publications)) {
    c.representative_ids.push_back(p->id);
    material += p->id.key() + '\x1f' + p->title + '\x1e';
    article_summaries.push_back(client.summarize_paper(p->title, p->abstract.value_or("")));
  }
  c.content_hash = sha256_hex(material);
  c.summary = client.summarize_candidate(article_summaries);
  c.vector = client.embed_text(c.summary.text);
  return c;
}

}  // namespace revmatch

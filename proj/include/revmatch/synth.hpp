#pragma once

#include <cstdint>
#include <set>
#include <utility>

#include "revmatch/corpus.hpp"
#include "revmatch/providers.hpp"
#include "revmatch/taxonomy.hpp"

namespace revmatch {

/// Desk-scale benchmark corpus. Each target category gets its own
/// pseudo-word vocabulary, and four scholar populations are planted:
///
///  - experts of c_p: recent, well-cited work in c_p plus older, rarely cited
///    work in an unrelated category (they supply the ground truth);
///  - residents of c*, the nearest sibling of c_p: work in c* only;
///  - cross-disciplinary scholars: recent, well-cited work in c* and older,
///    rarely cited work in c_p;
///  - paper authors with a single publication.
///
/// The older side work makes an expert's full publication list a poor
/// summary of current expertise while the representative publications stay
/// on topic. Every publication is regenerated until the embedder classifies
/// it into its intended category. About `registry_fraction` of the
/// established scholars are mirrored as registry profiles with name and
/// title variants so that linkage has something to do.
struct SyntheticConfig {
  std::size_t n_records = 200;
  std::uint64_t seed = 42;
  std::size_t n_categories = 10;
  int experts_per_category = 12;
  int residents_per_category = 12;
  int cross_per_category = 12;
  double registry_fraction = 0.15;
};

/// `taxonomy` must have embedded nodes. Records carry empty pools.
Corpus generate_synthetic_corpus(const SyntheticConfig& config, const Taxonomy& taxonomy, TextEmbedder& embedder);

/// Two sources describing overlapping sets of people. `planted` holds every
/// true (source_a id, source_b id) identity, including ones whose names were
/// rewritten beyond recognition and are not expected to link.
struct LinkageFixture {
  Corpus source_a;
  Corpus source_b;
  std::set<std::pair<SourceId, SourceId>> planted;
};

LinkageFixture generate_linkage_fixture(std::size_t n_persons, std::uint64_t seed);

}  // namespace revmatch

#include <stdexcept>

#include "revmatch/corpus.hpp"
#include "revmatch/util/hash.hpp"

namespace revmatch {

std::string_view to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::kGraph:
      return "graph-source";
    case SourceTag::kReviewPlatform:
      return "review-platform";
    case SourceTag::kRegistry:
      return "registry";
  }
  return "unknown";
}

SourceTag parse_source_tag(std::string_view text) {
  if (text == "graph-source") return SourceTag::kGraph;
  if (text == "review-platform") return SourceTag::kReviewPlatform;
  if (text == "registry") return SourceTag::kRegistry;
  throw std::invalid_argument("unknown source tag '" + std::string(text) + "'");
}

std::string SourceId::key() const {
  std::string out(to_string(tag));
  out.push_back(':');
  out += local_id;
  return out;
}

SourceId SourceId::parse_key(std::string_view key) {
  const auto colon = key.find(':');
  if (colon == std::string_view::npos || colon + 1 == key.size()) {
    throw std::invalid_argument("malformed id key '" + std::string(key) + "'");
  }
  return SourceId{parse_source_tag(key.substr(0, colon)), std::string(key.substr(colon + 1))};
}

std::size_t SourceIdHash::operator()(const SourceId& id) const noexcept {
  return static_cast<std::size_t>(mix64(fnv1a64(id.local_id) ^ static_cast<std::uint64_t>(id.tag)));
}

}  // namespace revmatch

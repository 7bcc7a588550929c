#include "revmatch/providers.hpp"
#include "revmatch/util/hash.hpp"

namespace revmatch {

std::string ResponseCache::key_for(std::string_view model_name, std::string_view payload) {
  std::string material(model_name);
  material.push_back('\n');
  material.append(payload);
  return sha256_hex(material);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<json> ResponseCache::get(const std::string& key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    return json::parse(read_file(path));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed and overwritten
  }
}

void ResponseCache::put(const std::string& key, const json& value) const {
  write_file_atomic(path_for(key), value.dump());
}

}  // namespace revmatch

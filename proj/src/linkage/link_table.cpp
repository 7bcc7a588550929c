#include "revmatch/linkage.hpp"

namespace revmatch {

void save_links(const LinkTable& table, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : table.entries) {
    json evidence = json::array();
    for (const auto& ev : e.evidence) {
      evidence.push_back({{"left_title", ev.left_title}, {"right_title", ev.right_title}});
    }
    out += json{{"left", e.left}, {"right", e.right}, {"evidence", evidence}}.dump();
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

LinkTable load_links(const std::filesystem::path& path) {
  LinkTable table;
  read_jsonl(path, [&](const json& j, std::size_t line) {
    LinkEntry e{j.at("left").get<SourceId>(), j.at("right").get<SourceId>(), {}};
    for (const auto& ev : j.at("evidence")) {
      e.evidence.push_back({ev.at("left_title").get<std::string>(), ev.at("right_title").get<std::string>()});
    }
    if (e.evidence.empty()) throw ParseError(path.string(), line, "link entry without evidence");
    table.entries.push_back(std::move(e));
  });
  return table;
}

}  // namespace revmatch

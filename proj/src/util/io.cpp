#include "revmatch/util/io.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "revmatch/util/hash.hpp"

namespace revmatch {

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) return;
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!obj.is_object()) throw ParseError(path.string(), line_no, "expected a JSON object");
    try {
      fn(obj, line_no);
    } catch (const ParseError&) {
      throw;
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  auto tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string file_sha256(const std::filesystem::path& path) {
  return sha256_hex(read_file(path));
}

}  // namespace revmatch

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace revmatch {

using json = nlohmann::json;

/// Malformed input at a known location.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Calls `fn(object, line_number)` for every non-blank line. A missing file is
/// treated as empty. Lines are 1-based.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace revmatch

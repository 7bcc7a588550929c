#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revmatch/corpus.hpp"
#include "revmatch/util/io.hpp"

namespace revmatch {

/// Service failure that survived every retry, or a non-retriable HTTP error.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The service answered but the answer is unusable (empty, unparsable).
class MalformedResponseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// The answer violates a configured contract (e.g. embedding dimension).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit-norm embedding. Construction normalizes; zero or non-finite input is
/// rejected.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  static EmbeddingVector normalized(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double dot(const EmbeddingVector& other) const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

struct SummaryText {
  std::string text;
  std::size_t word_count = 0;

  static SummaryText from(std::string text);
  bool operator==(const SummaryText&) const = default;
};

std::size_t count_words(std::string_view text);

struct ProviderConfig {
  std::string endpoint = "http://127.0.0.1:8000/v1";
  std::string model_name = "stub-hash-embedding";  // embedding model
  std::string chat_model_name = "stub-template-chat";
  std::string api_key_env = "REVMATCH_API_KEY";
  double timeout_seconds = 30.0;
  int max_retries = 3;
  int retry_backoff_ms = 250;  // doubled after every failed attempt
  std::filesystem::path cache_dir;  // empty disables the persistent cache
  bool stub_mode = false;  // true: offline deterministic stand-ins, no network
  int stub_dim = 256;
  int embedding_dim = 0;  // expected service dimension; 0 accepts any

  /// Throws std::invalid_argument when stub_mode is set with stub_dim < 8.
  void validate() const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Connection-level failure (refused, timed out); always retriable.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// POSTs `body` as application/json to `path` (relative to the endpoint).
  virtual HttpResponse post_json(const std::string& path, const std::string& body,
                                 const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// cpp-httplib transport for "scheme://host[:port][/prefix]" endpoints.
std::unique_ptr<HttpTransport> make_http_transport(const std::string& endpoint,
                                                   double timeout_seconds);

/// One JSON file per key under `dir`. Writes are atomic renames, so
/// concurrent readers never observe partial entries.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::optional<json> get(const std::string& key) const;
  void put(const std::string& key, const json& value) const;

  static std::string key_for(std::string_view model_name, std::string_view payload);

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

/// Anything that maps text to a unit vector.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual EmbeddingVector embed_text(std::string_view text) = 0;
  /// Identifies the embedding space (model and dimension) for cache keys.
  virtual std::string embedder_id() const = 0;
};

/// Offline embedding: hashed bag of words. Each lowercase token gets a
/// seed-derived Gaussian unit vector; the count-weighted sum is normalized and
/// a small whole-text component is mixed in so that distinct strings never
/// share a vector. Texts with overlapping vocabulary land close together.
std::vector<double> stub_embedding_values(std::string_view text, int dim, std::string_view model_name);

inline constexpr std::size_t kPaperSummaryWordLimit = 180;
inline constexpr std::size_t kCandidateSummaryWordLimit = 200;

struct ChatPrompt {
  std::string system;
  std::string user;
};

ChatPrompt paper_summary_prompt(std::string_view title, std::string_view abstract);
ChatPrompt candidate_summary_prompt(std::span<const SummaryText> article_summaries);

/// Embedding and summarization client. Thread-safe.
class ProviderClient : public TextEmbedder {
 public:
  explicit ProviderClient(ProviderConfig config, std::unique_ptr<HttpTransport> transport = nullptr);

  EmbeddingVector embed_text(std::string_view text) override;
  std::string embedder_id() const override;

  SummaryText summarize_paper(std::string_view title, std::string_view abstract);
  SummaryText summarize_candidate(std::span<const SummaryText> article_summaries);

  const ProviderConfig& config() const { return config_; }

 private:
  json post_with_retries(const std::string& path, const json& request);
  std::string chat(const ChatPrompt& prompt);
  HttpResponse send(const std::string& path, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers);

  ProviderConfig config_;
  std::optional<ResponseCache> cache_;
  std::unique_ptr<HttpTransport> transport_;  // injected; requests are serialized
  std::vector<std::unique_ptr<HttpTransport>> idle_transports_;
  std::mutex transport_mutex_;
};

/// Union (deduplicated by id) of the five most-cited and the five newest
/// publications. Citation ties favour newer work, year ties favour more
/// citations, and remaining ties the smaller id. Most-cited entries come first.
std::vector<const Publication*> select_representative_pubs(std::span<const Publication* const> pubs);

/// [paper | candidate]; no renormalization.
std::vector<double> joint_embedding(const EmbeddingVector& paper_vec, const EmbeddingVector& cand_vec);

struct PaperProfile {
  SourceId paper_id;
  SummaryText summary;
  EmbeddingVector vector;
};

struct CandidateProfile {
  SourceId scholar_id;
  std::vector<SourceId> representative_ids;
  std::string content_hash;  // changes whenever the representative set does
  SummaryText summary;
  EmbeddingVector vector;
};

PaperProfile profile_paper(ProviderClient& client, const Publication& paper);
CandidateProfile profile_candidate(ProviderClient& client, const SourceId& scholar_id,
                                   std::span<const Publication* const> publications);

void to_json(json& j, const EmbeddingVector& v);
void from_json(const json& j, EmbeddingVector& v);

}  // namespace revmatch

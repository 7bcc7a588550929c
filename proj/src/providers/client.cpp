#include <spdlog/spdlog.h>

#include <cctype>
#include <cstdlib>
#include <thread>

#include "prompt_assets.hpp"
#include "revmatch/providers.hpp"

namespace revmatch {
namespace {

constexpr std::size_t kStubTitleWords = 40;
constexpr std::size_t kStubAbstractWords = 120;

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_words(const std::vector<std::string>& words, std::size_t limit) {
  std::string out;
  for (std::size_t i = 0; i < std::min(limit, words.size()); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string first_sentence(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      return join_words(split_words(text.substr(0, i + 1)), std::string::npos);
    }
  }
  return join_words(split_words(text), std::string::npos);
}

std::string fill_placeholders(std::string_view tmpl, std::initializer_list<std::string_view> values) {
  std::string out;
  auto it = values.begin();
  std::size_t pos = 0;
  while (true) {
    const auto next = tmpl.find("{}", pos);
    if (next == std::string_view::npos || it == values.end()) break;
    out.append(tmpl.substr(pos, next - pos));
    out.append(*it++);
    pos = next + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace

ChatPrompt paper_summary_prompt(std::string_view title, std::string_view abstract) {
  return {prompts::kPaperSystem, fill_placeholders(prompts::kPaperUser, {title, abstract})};
}

ChatPrompt candidate_summary_prompt(std::span<const SummaryText> article_summaries) {
  std::string listed;
  for (std::size_t i = 0; i < article_summaries.size(); ++i) {
    if (i) listed += "\n\n";
    listed += std::to_string(i + 1) + ". " + article_summaries[i].text;
  }
  return {prompts::kCandidateSystem, fill_placeholders(prompts::kCandidateUser, {listed})};
}

ProviderClient::ProviderClient(ProviderConfig config, std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

std::string ProviderClient::embedder_id() const {
  if (config_.stub_mode) return config_.model_name + "@stub" + std::to_string(config_.stub_dim);
  return config_.model_name;
}

HttpResponse ProviderClient::send(const std::string& path, const std::string& body,
                                  const std::vector<std::pair<std::string, std::string>>& headers) {
  if (transport_) {
    std::lock_guard lock(transport_mutex_);
    return transport_->post_json(path, body, headers);
  }
  // One transport per in-flight request; idle ones are reused.
  std::unique_ptr<HttpTransport> t;
  {
    std::lock_guard lock(transport_mutex_);
    if (!idle_transports_.empty()) {
      t = std::move(idle_transports_.back());
      idle_transports_.pop_back();
    }
  }
  if (!t) t = make_http_transport(config_.endpoint, config_.timeout_seconds);
  HttpResponse response = t->post_json(path, body, headers);
  std::lock_guard lock(transport_mutex_);
  idle_transports_.push_back(std::move(t));
  return response;
}

json ProviderClient::post_with_retries(const std::string& path, const json& request) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = request.dump();
  std::string last_error;
  int backoff_ms = config_.retry_backoff_ms;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    HttpResponse response;
    try {
      response = send(path, body, headers);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200) {
      throw ProviderError(path + ": HTTP " + std::to_string(response.status) + ": " + response.body);
    }
    try {
      return json::parse(response.body);
    } catch (const json::parse_error& e) {
      throw MalformedResponseError(path + ": unparsable response: " + e.what());
    }
  }
  throw ProviderError(path + ": giving up after " + std::to_string(config_.max_retries + 1) +
                      " attempts: " + last_error);
}

EmbeddingVector ProviderClient::embed_text(std::string_view text) {
  if (is_blank(text)) throw std::invalid_argument("embed_text: text is empty");
  json request;
  if (config_.stub_mode) {
    request = {{"stub_dim", config_.stub_dim}, {"input", text}};
  } else {
    request = {{"model", config_.model_name}, {"input", text}};
  }
  const std::string key = ResponseCache::key_for(config_.model_name, request.dump());
  // Raw (pre-normalization) values are cached so that a cache hit reproduces
  // the normalized vector bit for bit.
  if (cache_) {
    if (auto hit = cache_->get(key)) return EmbeddingVector::normalized(hit->get<std::vector<double>>());
  }
  std::vector<double> raw;
  if (config_.stub_mode) {
    raw = stub_embedding_values(text, config_.stub_dim, config_.model_name);
  } else {
    const json response = post_with_retries("/embeddings", request);
    try {
      raw = response.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw MalformedResponseError(std::string("embedding response: ") + e.what());
    }
    if (config_.embedding_dim > 0 && raw.size() != static_cast<std::size_t>(config_.embedding_dim)) {
      throw ContractError("embedding dimension " + std::to_string(raw.size()) + " != configured " +
                          std::to_string(config_.embedding_dim));
    }
  }
  EmbeddingVector v = EmbeddingVector::normalized(raw);
  if (cache_) cache_->put(key, raw);
  return v;
}

std::string ProviderClient::chat(const ChatPrompt& prompt) {
  const json request = {{"model", config_.chat_model_name},
                        {"temperature", 0},
                        {"messages",
                         {{{"role", "system"}, {"content", prompt.system}},
                          {{"role", "user"}, {"content", prompt.user}}}}};
  const std::string key = ResponseCache::key_for(config_.chat_model_name, request.dump());
  if (cache_) {
    if (auto hit = cache_->get(key)) return hit->get<std::string>();
  }
  const json response = post_with_retries("/chat/completions", request);
  std::string content;
  try {
    content = response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("chat response: ") + e.what());
  }
  if (is_blank(content)) throw MalformedResponseError("chat response is empty");
  if (cache_) cache_->put(key, content);
  return content;
}

SummaryText ProviderClient::summarize_paper(std::string_view title, std::string_view abstract) {
  if (is_blank(title)) throw std::invalid_argument("summarize_paper: title is empty");
  if (config_.stub_mode) {
    std::string text = "SUMMARY: " + join_words(split_words(title), kStubTitleWords);
    if (text.back() != '.' && text.back() != '!' && text.back() != '?') text.push_back('.');
    const std::string body = join_words(split_words(abstract), kStubAbstractWords);
    if (!body.empty()) text += " " + body;
    return SummaryText::from(std::move(text));
  }
  SummaryText s = SummaryText::from(chat(paper_summary_prompt(title, abstract)));
  if (s.word_count > kPaperSummaryWordLimit) {
    spdlog::warn("paper summary has {} words (limit {})", s.word_count, kPaperSummaryWordLimit);
  }
  return s;
}

SummaryText ProviderClient::summarize_candidate(std::span<const SummaryText> article_summaries) {
  if (article_summaries.empty()) throw std::invalid_argument("summarize_candidate: no article summaries");
  if (config_.stub_mode) {
    std::string joined;
    for (const auto& s : article_summaries) {
      if (!joined.empty()) joined.push_back(' ');
      joined += first_sentence(s.text);
    }
    return SummaryText::from(join_words(split_words(joined), kCandidateSummaryWordLimit));
  }
  SummaryText s = SummaryText::from(chat(candidate_summary_prompt(article_summaries)));
  if (s.word_count > kCandidateSummaryWordLimit) {
    spdlog::warn("candidate summary has {} words (limit {})", s.word_count, kCandidateSummaryWordLimit);
  }
  return s;
}

}  // namespace revmatch

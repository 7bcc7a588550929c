#include <charconv>
#include <functional>
#include <sstream>

#include "revmatch/pipeline.hpp"

#ifndef REVMATCH_DATA_DIR
#define REVMATCH_DATA_DIR "data"
#endif

namespace revmatch {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("bad value for " + key + ": '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad value for " + key + ": '" + v + "' (expected true or false)");
}

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

struct Key {
  const char* name;
  std::function<void(PipelineConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

#define KEY_PATH(name, field) \
  Key{name, [](PipelineConfig& c, const std::string&, const std::string& v) { c.field = v; }, \
      [](const PipelineConfig& c) { return c.field.string(); }}
#define KEY_STR(name, field) \
  Key{name, [](PipelineConfig& c, const std::string&, const std::string& v) { c.field = v; }, \
      [](const PipelineConfig& c) { return std::string(c.field); }}
#define KEY_NUM(name, field, type) \
  Key{name, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_number<type>(k, v); }, \
      [](const PipelineConfig& c) { return std::to_string(c.field); }}
#define KEY_DBL(name, field) \
  Key{name, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); }, \
      [](const PipelineConfig& c) { return fmt_double(c.field); }}
#define KEY_BOOL(name, field) \
  Key{name, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }, \
      [](const PipelineConfig& c) { return std::string(c.field ? "true" : "false"); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      KEY_PATH("corpus_dir", corpus_dir),
      KEY_PATH("taxonomy_path", taxonomy_path),
      KEY_PATH("stage_dir", stage_dir),
      KEY_NUM("seed", seed, std::uint64_t),
      KEY_NUM("jobs", jobs, std::size_t),
      KEY_STR("provider.endpoint", provider.endpoint),
      KEY_STR("provider.model_name", provider.model_name),
      KEY_STR("provider.chat_model_name", provider.chat_model_name),
      KEY_STR("provider.api_key_env", provider.api_key_env),
      KEY_DBL("provider.timeout_seconds", provider.timeout_seconds),
      KEY_NUM("provider.max_retries", provider.max_retries, int),
      KEY_NUM("provider.retry_backoff_ms", provider.retry_backoff_ms, int),
      KEY_PATH("provider.cache_dir", provider.cache_dir),
      KEY_BOOL("provider.stub_mode", provider.stub_mode),
      KEY_NUM("provider.stub_dim", provider.stub_dim, int),
      KEY_NUM("provider.embedding_dim", provider.embedding_dim, int),
      KEY_NUM("pool.min_pubs_in_cstar", pool.min_pubs_in_cstar, int),
      KEY_NUM("pool.h_index_threshold", pool.h_index_threshold, int),
      KEY_NUM("pool.pool_size", pool.pool_size, int),
      KEY_NUM("pairs.negatives_per_positive", negatives_per_positive, int),
      KEY_DBL("pairs.unqualified_share", unqualified_share),
      Key{"split.ratios",
          [](PipelineConfig& c, const std::string& k, const std::string& v) {
            std::array<int, 3> r{};
            std::stringstream ss(v);
            std::string part;
            std::size_t i = 0;
            while (std::getline(ss, part, ',')) {
              if (i == 3) throw ConfigError("split.ratios takes three integers");
              r[i++] = parse_number<int>(k, trim(part));
            }
            if (i != 3) throw ConfigError("split.ratios takes three integers");
            c.split_ratios = r;
          },
          [](const PipelineConfig& c) {
            return std::to_string(c.split_ratios[0]) + "," + std::to_string(c.split_ratios[1]) + "," +
                   std::to_string(c.split_ratios[2]);
          }},
      KEY_NUM("model.n_experts", n_experts, int),
      KEY_NUM("model.expert_hidden_dim", model_dims.expert_hidden_dim, int),
      KEY_NUM("model.expert_out_dim", model_dims.expert_out_dim, int),
      KEY_NUM("model.tower_hidden_dim", model_dims.tower_hidden_dim, int),
      KEY_NUM("train.epochs_total", train.epochs_total, int),
      KEY_NUM("train.stage_boundary", train.stage_boundary, int),
      KEY_DBL("train.lambda_entropy", train.lambda_entropy),
      KEY_DBL("train.lambda_auc", train.lambda_auc),
      KEY_DBL("train.margin", train.margin),
      KEY_DBL("train.learning_rate", train.learning_rate),
      KEY_NUM("train.batch_size", train.batch_size, int),
      KEY_BOOL("train.entropy_bonus", train.entropy_bonus),
      KEY_NUM("synth.n_records", synth.n_records, std::size_t),
      KEY_NUM("synth.n_categories", synth.n_categories, std::size_t),
      KEY_NUM("synth.experts_per_category", synth.experts_per_category, int),
      KEY_NUM("synth.residents_per_category", synth.residents_per_category, int),
      KEY_NUM("synth.cross_per_category", synth.cross_per_category, int),
      KEY_DBL("synth.registry_fraction", synth.registry_fraction),
  };
  return k;
}

}  // namespace

void PipelineConfig::propagate_seed() {
  pool.seed = seed;
  train.seed = seed;
  synth.seed = seed;
}

std::filesystem::path PipelineConfig::effective_corpus_dir() const {
  return corpus_dir.empty() ? stage_dir / "synth" : corpus_dir;
}

std::filesystem::path PipelineConfig::effective_cache_dir() const {
  return provider.cache_dir.empty() ? stage_dir / "cache" : provider.cache_dir;
}

std::filesystem::path default_taxonomy_path() { return std::filesystem::path(REVMATCH_DATA_DIR) / "taxonomy.jsonl"; }

void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  for (const Key& k : keys()) {
    if (key == k.name) {
      k.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected 'key = value'");
    try {
      apply_config_value(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  c.propagate_seed();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(read_file(path));
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  for (const Key& k : keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace revmatch

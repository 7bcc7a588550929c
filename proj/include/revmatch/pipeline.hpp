#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "revmatch/corpus.hpp"
#include "revmatch/eval.hpp"
#include "revmatch/linkage.hpp"
#include "revmatch/mmoe.hpp"
#include "revmatch/poolgen.hpp"
#include "revmatch/providers.hpp"
#include "revmatch/synth.hpp"

namespace revmatch {

/// Bad or unknown configuration; the CLI exits with status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage input that an earlier stage should have produced; exit status 2.
class MissingArtifactError : public std::runtime_error {
 public:
  explicit MissingArtifactError(const std::filesystem::path& path)
      : std::runtime_error("missing prerequisite artifact: " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct PipelineConfig {
  std::filesystem::path corpus_dir;  // empty: the synth stage output
  std::filesystem::path taxonomy_path;
  std::filesystem::path stage_dir = "stages";
  std::uint64_t seed = 42;
  std::size_t jobs = 1;

  ProviderConfig provider;  // cache_dir empty: <stage_dir>/cache
  PoolConfig pool;
  TrainConfig train;
  MmoeDims model_dims;  // input_dim follows from the profiles
  int n_experts = 3;
  int negatives_per_positive = 4;
  double unqualified_share = 0.5;
  std::array<int, 3> split_ratios{7, 2, 1};
  SyntheticConfig synth;

  /// Copies the global seed into every seeded sub-configuration.
  void propagate_seed();
  std::filesystem::path effective_corpus_dir() const;
  std::filesystem::path effective_cache_dir() const;
};

/// Flat "key = value" lines; '#' starts a comment. Unknown keys and
/// malformed values raise ConfigError.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Applies one key to `config` (shared by files and command-line overrides).
void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
/// All keys with their current values, in the file format.
std::string dump_config(const PipelineConfig& config);

/// Default location of the bundled taxonomy.
std::filesystem::path default_taxonomy_path();

enum class StageStatus { kRan, kSkipped };

inline constexpr std::array<const char*, 9> kStageNames = {"synth",   "ingest", "link",     "classify", "build-pools",
                                                           "profile", "train",  "evaluate", "report"};

/// Runs one stage. Throws ConfigError, MissingArtifactError, or the error of
/// the failing module.
StageStatus run_stage(const std::string& stage, const PipelineConfig& config);

/// Inputs and outputs of one stage run, keyed by path relative to the stage
/// directory, plus the hash of the stage's configuration slice.
struct Manifest {
  std::string stage;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;

  bool operator==(const Manifest&) const = default;
};

json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const json& j);

/// Merges each linked pair into the graph-side profile: the other side's ids
/// are appended and its publications are kept unless they duplicate a
/// publication named in the link evidence.
Corpus merge_linked_identities(const Corpus& corpus, const LinkTable& links);

/// Negatives for TF-IDF calibration: scholars with work in the level-3
/// category least similar to the record's, skipping categories nobody works
/// in. At most `limit` ids, seeded per record.
std::vector<SourceId> distant_candidates(const ReviewRecord& record, const Taxonomy& taxonomy,
                                         std::span<const ScholarSubjects> subjects, std::size_t limit,
                                         std::uint64_t seed);

}  // namespace revmatch

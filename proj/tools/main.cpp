// revmatch command-line driver: one subcommand per pipeline stage.
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "revmatch/corpus.hpp"
#include "revmatch/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kMissing = 2, kFailure = 3 };

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool stub = false;
  std::string stage_dir;
  std::optional<std::size_t> jobs;
  std::vector<std::string> overrides;
  bool verbose = false;
  bool dump = false;
};

revmatch::PipelineConfig resolve(const Options& o) {
  revmatch::PipelineConfig cfg = o.config_path.empty() ? revmatch::PipelineConfig{} : revmatch::load_config(o.config_path);
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw revmatch::ConfigError("--set expects key=value, got '" + kv + "'");
    revmatch::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.stub) cfg.provider.stub_mode = true;
  if (!o.stage_dir.empty()) cfg.stage_dir = o.stage_dir;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (cfg.jobs == 0) throw revmatch::ConfigError("jobs must be at least 1");
  cfg.propagate_seed();
  return cfg;
}

int run(const std::vector<std::string>& stages, const Options& o) {
  try {
    const revmatch::PipelineConfig cfg = resolve(o);
    if (o.dump) std::fputs(revmatch::dump_config(cfg).c_str(), stdout);
    for (const std::string& stage : stages) {
      const auto status = revmatch::run_stage(stage, cfg);
      spdlog::info("{}: {}", stage, status == revmatch::StageStatus::kRan ? "done" : "up to date, skipped");
    }
    return kOk;
  } catch (const revmatch::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kConfig;
  } catch (const revmatch::MissingArtifactError& e) {
    spdlog::error("{}", e.what());
    return kMissing;
  } catch (const std::invalid_argument& e) {
    // Out-of-range settings surface as precondition failures.
    spdlog::error("invalid setting: {}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("revmatch"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Reviewer recommendation pipeline"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Global seed (overrides the file)");
  app.add_flag("--stub", o.stub, "Offline deterministic providers");
  app.add_option("--stage-dir", o.stage_dir, "Directory holding stage artifacts");
  app.add_option("--jobs", o.jobs, "Worker threads inside a stage");
  app.add_option("--set", o.overrides, "Override one configuration key (key=value)");
  app.add_flag("-v,--verbose", o.verbose, "Debug logging");
  app.add_flag("--print-config", o.dump, "Print the resolved configuration first");

  std::vector<std::string> selected;
  for (const char* name : revmatch::kStageNames) {
    app.add_subcommand(name, std::string("Run the ") + name + " stage")->fallthrough()->callback([&selected, name] {
      selected = {name};
    });
  }
  app.add_subcommand("all", "Run every stage in order")->fallthrough()->callback([&selected] {
    selected.assign(revmatch::kStageNames.begin(), revmatch::kStageNames.end());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  if (o.verbose) spdlog::set_level(spdlog::level::debug);
  return run(selected, o);
}

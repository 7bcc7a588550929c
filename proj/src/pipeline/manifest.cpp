#include "revmatch/pipeline.hpp"

namespace revmatch {

json manifest_to_json(const Manifest& m) {
  return {{"stage", m.stage},
          {"seed", m.seed},
          {"config_hash", m.config_hash},
          {"inputs", m.inputs},
          {"outputs", m.outputs}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.stage = j.at("stage").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  return m;
}

}  // namespace revmatch

#include <bit>
#include <cstring>
#include <fstream>

#include "revmatch/mmoe.hpp"

namespace revmatch {
namespace {

// Layout: magic, u32 version, u64 header length, JSON header, u64 parameter
// count, parameters as little-endian IEEE-754 bits, end marker.
constexpr char kMagic[8] = {'R', 'V', 'M', 'M', 'O', 'E', '\0', '\0'};
constexpr char kEnd[8] = {'R', 'V', 'M', 'E', 'N', 'D', '\0', '\0'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& data, const std::filesystem::path& path) : data_(data), path_(path) {}

  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n) throw CheckpointError("checkpoint " + path_.string() + " is truncated");
    std::string_view v(data_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  std::uint64_t u64() { return le(take(8)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(take(4))); }
  bool done() const { return pos_ == data_.size(); }

 private:
  static std::uint64_t le(std::string_view b) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < b.size(); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  const std::string& data_;
  std::filesystem::path path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const MmoeModel& model, const TrainConfig& config, const std::filesystem::path& path) {
  json header = {{"dims", model.dims}, {"n_experts", model.n_experts}, {"train_config", config}};
  const std::string h = header.dump();
  std::string out(kMagic, sizeof kMagic);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((kCheckpointVersion >> (8 * i)) & 0xff));
  put_u64(out, h.size());
  out += h;
  put_u64(out, model.parameter_count());
  for_each_block(model.params, [&](ParamGroup, const std::string&, const auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(block.data()[i]));
  });
  out.append(kEnd, sizeof kEnd);
  write_file_atomic(path, out);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw CheckpointError("checkpoint not found: " + path.string());
  const std::string data = read_file(path);
  Reader r(data, path);
  if (r.take(8) != std::string_view(kMagic, 8)) throw CheckpointError(path.string() + " is not a model checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  json header;
  try {
    header = json::parse(r.take(r.u64()));
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint header is corrupt: " + std::string(e.what()));
  }
  LoadedCheckpoint out;
  const MmoeDims dims = header.at("dims").get<MmoeDims>();
  out.model = init_model(dims, header.at("n_experts").get<int>(), 0);
  out.config = header.at("train_config").get<TrainConfig>();
  const std::uint64_t count = r.u64();
  if (count != out.model.parameter_count()) {
    throw CheckpointError("checkpoint holds " + std::to_string(count) + " parameters, header implies " +
                          std::to_string(out.model.parameter_count()));
  }
  for_each_block(out.model.params, [&](ParamGroup, const std::string&, auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = std::bit_cast<double>(r.u64());
  });
  if (r.take(8) != std::string_view(kEnd, 8) || !r.done()) {
    throw CheckpointError("checkpoint " + path.string() + " has a corrupt trailer");
  }
  return out;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, int expected_n_experts) {
  LoadedCheckpoint out = load_checkpoint(path);
  if (out.model.n_experts != expected_n_experts) {
    throw CheckpointError("checkpoint has " + std::to_string(out.model.n_experts) + " experts, configuration expects " +
                          std::to_string(expected_n_experts));
  }
  return out;
}

}  // namespace revmatch

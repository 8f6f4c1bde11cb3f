#include "cogan/models/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "cogan/error.hpp"
#include "cogan/util/config.hpp"
#include "cogan/util/hash.hpp"

namespace fs = std::filesystem;

namespace cogan::models {
namespace {

constexpr char kMagic[8] = {'C', 'O', 'G', 'A', 'N', 'B', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

std::uint8_t dtype_code(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return 0;
    case torch::kFloat64: return 1;
    case torch::kInt64: return 2;
    default: fail("blob: unsupported tensor dtype");
  }
}

torch::ScalarType dtype_from_code(std::uint8_t c) {
  switch (c) {
    case 0: return torch::kFloat32;
    case 1: return torch::kFloat64;
    case 2: return torch::kInt64;
    default: fail("blob: unknown dtype code");
  }
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const fs::path& file) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail("blob truncated: " + file.string());
  return v;
}

std::vector<std::pair<std::string, torch::Tensor>> named_state(const torch::nn::Module& module) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto& p : module.named_parameters()) out.emplace_back(p.key(), p.value());
  for (const auto& b : module.named_buffers()) out.emplace_back(b.key(), b.value());
  return out;
}

struct BlobSpec {
  const char* name;
  bool encoder;
};

constexpr BlobSpec kBlobs[] = {{kEncoderVis, true},        {kEncoderNir, true},        {kDecoderVis, false},
                               {kDecoderNir, false},       {kDiscriminatorVis, false}, {kDiscriminatorNir, false},
                               {kPerceptual, false}};

torch::nn::Module& blob_module(ModelBundle& b, std::string_view name) {
  if (name == kEncoderVis) return *b.generator_vis->encoder();
  if (name == kEncoderNir) return *b.generator_nir->encoder();
  if (name == kDecoderVis) return *b.generator_vis->decoder();
  if (name == kDecoderNir) return *b.generator_nir->decoder();
  if (name == kDiscriminatorVis) return *b.discriminator_vis;
  if (name == kDiscriminatorNir) return *b.discriminator_nir;
  if (name == kPerceptual) return *b.perceptual;
  fail("unknown blob name: " + std::string(name));
}

fs::path blob_path(const fs::path& dir, std::string_view name) { return dir / (std::string(name) + ".bin"); }

void load_verified(torch::nn::Module& module, const fs::path& dir, const nlohmann::json& index,
                   const std::string& name) {
  if (!index.at("blobs").contains(name)) fail("checkpoint " + dir.string() + " lacks blob " + name);
  load_module_blob(module, blob_path(dir, name));
}

}  // namespace

std::string save_module_blob(const torch::nn::Module& module, const fs::path& file) {
  const auto state = named_state(module);
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write blob: " + file.string());
    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(state.size()));
    for (const auto& [name, tensor] : state) {
      auto t = tensor.detach().cpu().contiguous();
      put(out, static_cast<std::uint32_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      put(out, dtype_code(t.scalar_type()));
      put(out, static_cast<std::uint32_t>(t.dim()));
      for (auto d : t.sizes()) put(out, static_cast<std::int64_t>(d));
      put(out, static_cast<std::uint64_t>(t.nbytes()));
      out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
    }
    out.flush();
    if (!out) fail("write failed for blob: " + file.string());
  }
  return util::sha256_file(file);
}

void load_module_blob(torch::nn::Module& module, const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail("cannot open blob: " + file.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) fail("not a weight blob: " + file.string());
  if (get<std::uint32_t>(in, file) != kVersion) fail("unsupported blob version: " + file.string());

  std::map<std::string, torch::Tensor> stored;
  const auto n = get<std::uint32_t>(in, file);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name(get<std::uint32_t>(in, file), '\0');
    in.read(name.data(), static_cast<std::streamsize>(name.size()));
    const auto dtype = dtype_from_code(get<std::uint8_t>(in, file));
    std::vector<int64_t> dims(get<std::uint32_t>(in, file));
    for (auto& d : dims) d = get<std::int64_t>(in, file);
    const auto bytes = get<std::uint64_t>(in, file);
    auto t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    if (static_cast<std::uint64_t>(t.nbytes()) != bytes) fail("blob tensor size mismatch for " + name);
    in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
    if (!in) fail("blob truncated: " + file.string());
    stored.emplace(std::move(name), std::move(t));
  }

  torch::NoGradGuard no_grad;
  for (auto& [name, target] : named_state(module)) {
    auto it = stored.find(name);
    if (it == stored.end()) fail("blob " + file.string() + " lacks tensor " + name);
    if (!it->second.sizes().equals(target.sizes())) fail("shape mismatch for tensor " + name + " in " + file.string());
    target.copy_(it->second);
  }
}

void save_checkpoint(const ModelBundle& bundle, const fs::path& dir, int epoch, const nlohmann::json& extra) {
  auto tmp = dir;
  tmp += ".partial";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  auto& b = const_cast<ModelBundle&>(bundle);
  nlohmann::json blobs = nlohmann::json::object();
  for (const auto& spec : kBlobs) {
    const auto hash = save_module_blob(blob_module(b, spec.name), blob_path(tmp, spec.name));
    blobs[spec.name] = {{"file", std::string(spec.name) + ".bin"}, {"sha256", hash}};
  }
  nlohmann::json config = {{"model", to_json(bundle.config)}};
  for (const auto& [k, v] : extra.items()) config[k] = v;
  util::write_json(tmp / "config.json", config);
  util::write_json(tmp / "index.json", {{"epoch", epoch}, {"blobs", blobs}});

  std::error_code ec;
  if (fs::exists(dir)) {
    auto old = dir;
    old += ".old";
    fs::remove_all(old);
    fs::rename(dir, old, ec);
    if (ec) fail("cannot replace checkpoint " + dir.string() + ": " + ec.message());
    fs::rename(tmp, dir, ec);
    if (ec) fail("cannot move checkpoint into place: " + ec.message());
    fs::remove_all(old);
  } else {
    fs::rename(tmp, dir, ec);
    if (ec) fail("cannot move checkpoint into place: " + ec.message());
  }
}

nlohmann::json read_checkpoint_index(const fs::path& dir) {
  auto index = util::read_json(dir / "index.json");
  for (const auto& [name, entry] : index.at("blobs").items()) {
    const auto file = dir / entry.at("file").get<std::string>();
    if (util::sha256_file(file) != entry.at("sha256").get<std::string>()) {
      fail("hash mismatch for " + file.string());
    }
  }
  return index;
}

static ModelConfig checkpoint_config(const fs::path& dir) {
  return model_config_from_json(util::read_json(dir / "config.json").at("model"));
}

ModelBundle load_checkpoint(const fs::path& dir) {
  const auto index = read_checkpoint_index(dir);
  auto config = checkpoint_config(dir);
  // The stored perceptual blob supersedes any external weights path.
  config.perceptual_weights.clear();
  auto bundle = instantiate_models(config);
  for (const auto& spec : kBlobs) load_verified(blob_module(bundle, spec.name), dir, index, spec.name);
  bundle.config = checkpoint_config(dir);
  for (auto& p : bundle.perceptual->parameters()) p.set_requires_grad(false);
  return bundle;
}

EncoderPair load_encoders(const fs::path& dir) {
  const auto index = read_checkpoint_index(dir);
  EncoderPair pair;
  pair.config = checkpoint_config(dir);
  pair.vis = ResNetEncoder(pair.config);
  pair.nir = ResNetEncoder(pair.config);
  load_verified(*pair.vis, dir, index, kEncoderVis);
  load_verified(*pair.nir, dir, index, kEncoderNir);
  pair.vis->eval();
  pair.nir->eval();
  return pair;
}

void strip_to_encoders(const fs::path& src, const fs::path& dst) {
  auto index = read_checkpoint_index(src);
  fs::create_directories(dst);
  nlohmann::json blobs = nlohmann::json::object();
  for (const auto& spec : kBlobs) {
    if (!spec.encoder) continue;
    const auto& entry = index.at("blobs").at(spec.name);
    fs::copy_file(src / entry.at("file").get<std::string>(), dst / entry.at("file").get<std::string>(),
                  fs::copy_options::overwrite_existing);
    blobs[spec.name] = entry;
  }
  index["blobs"] = blobs;
  index["encoder_only"] = true;
  fs::copy_file(src / "config.json", dst / "config.json", fs::copy_options::overwrite_existing);
  util::write_json(dst / "index.json", index);
}

}  // namespace cogan::models

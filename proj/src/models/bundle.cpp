#include "cogan/models/bundle.hpp"



#include "cogan/error.hpp"
#include "cogan/models/checkpoint.hpp"
#include "cogan/util/hash.hpp"

namespace cogan::models {
namespace {

int64_t count(const torch::nn::Module& m) {
  int64_t n = 0;
  for (const auto& p : m.parameters()) n += p.numel();
  return n;
}

void append(std::vector<torch::Tensor>& out, const torch::nn::Module& m) {
  for (const auto& p : m.parameters()) {
    if (p.requires_grad()) out.push_back(p);
  }
}

}  // namespace

std::vector<torch::Tensor> ModelBundle::generator_parameters() const {
  std::vector<torch::Tensor> out;
  append(out, *generator_vis);
  append(out, *generator_nir);
  return out;
}

std::vector<torch::Tensor> ModelBundle::discriminator_parameters() const {
  std::vector<torch::Tensor> out;
  append(out, *discriminator_vis);
  append(out, *discriminator_nir);
  return out;
}

void ModelBundle::train(bool on) {
  generator_vis->train(on);
  generator_nir->train(on);
  discriminator_vis->train(on);
  discriminator_nir->train(on);
  perceptual->eval();
}

ParameterCounts ModelBundle::counts() const {
  ParameterCounts c;
  c.generator_vis = count(*generator_vis);
  c.generator_nir = count(*generator_nir);
  c.encoder = count(*generator_vis->encoder());
  c.discriminator_vis = count(*discriminator_vis);
  c.discriminator_nir = count(*discriminator_nir);
  c.perceptual = count(*perceptual);
  c.trainable = c.generator_vis + c.generator_nir + c.discriminator_vis + c.discriminator_nir;
  return c;
}

std::uint64_t perceptual_seed(const ModelConfig& config) { return config.weight_seed ^ 0x9E3779B97F4A7C15ULL; }

ModelBundle instantiate_models(const ModelConfig& config) {
  config.validate();
  torch::NoGradGuard no_grad;
  ModelBundle b;
  b.config = config;
  torch::manual_seed(config.weight_seed);
  b.generator_vis = UNetGenerator(config);
  b.generator_nir = UNetGenerator(config);
  b.discriminator_vis = Discriminator(config);
  b.discriminator_nir = Discriminator(config);
  torch::manual_seed(perceptual_seed(config));
  b.perceptual = PerceptualNet(config);
  if (!config.perceptual_weights.empty()) {
    load_module_blob(*b.perceptual, config.perceptual_weights);
    for (auto& p : b.perceptual->parameters()) p.set_requires_grad(false);
  }
  b.train(true);
  return b;
}

EmbeddingBatch encode(ResNetEncoder& encoder, const torch::Tensor& images, data::Spectrum source) {
  check_image_batch(images, encoder->channels(), encoder->side(), "encode");
  const bool was_training = encoder->is_training();
  encoder->eval();
  torch::NoGradGuard no_grad;
  auto z = encoder->forward(images);
  encoder->train(was_training);
  return {z, source};
}

torch::Tensor reconstruct(UNetGenerator& generator, const torch::Tensor& images) {
  auto& enc = generator->encoder();
  check_image_batch(images, enc->channels(), enc->side(), "reconstruct");
  return generator->forward(images).reconstruction;
}

torch::Tensor discriminate(Discriminator& discriminator, const torch::Tensor& candidate,
                           const torch::Tensor& condition) {
  return discriminator->forward(candidate, condition);
}

torch::Tensor perceptual_features(PerceptualNet& net, const torch::Tensor& images) { return net->forward(images); }

std::string module_checksum(const torch::nn::Module& module) {
  std::string bytes;
  auto add = [&](const std::string& name, const torch::Tensor& t) {
    auto c = t.detach().cpu().contiguous();
    bytes += name;
    bytes.push_back('\0');
    for (auto d : c.sizes()) bytes += std::to_string(d) + ",";
    bytes.append(static_cast<const char*>(c.data_ptr()), c.nbytes());
  };
  for (const auto& p : module.named_parameters()) add(p.key(), p.value());
  for (const auto& b : module.named_buffers()) add(b.key(), b.value());
  return util::sha256_hex(bytes);
}

nlohmann::json summarize(const ModelBundle& bundle) {
  const auto c = bundle.counts();
  const auto shape = bundle.perceptual->feature_shape();
  return {{"parameters",
           {{"generator_vis", c.generator_vis},
            {"generator_nir", c.generator_nir},
            {"encoder_per_branch", c.encoder},
            {"discriminator_vis", c.discriminator_vis},
            {"discriminator_nir", c.discriminator_nir},
            {"perceptual_frozen", c.perceptual},
            {"trainable", c.trainable}}},
          {"discriminator_widths", bundle.discriminator_vis->widths()},
          {"embedding_dim", bundle.config.embedding_dim},
          {"perceptual_layer", bundle.perceptual->layer()},
          {"perceptual_feature_shape", {shape[0], shape[1], shape[2]}},
          {"perceptual_source", bundle.config.perceptual_weights.empty()
                                    ? "random-frozen seed " + std::to_string(perceptual_seed(bundle.config))
                                    : bundle.config.perceptual_weights}};
}

}  // namespace cogan::models

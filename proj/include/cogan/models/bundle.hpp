#pragma once

#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "cogan/data/manifest.hpp"
#include "cogan/models/config.hpp"
#include "cogan/models/discriminator.hpp"
#include "cogan/models/encoder.hpp"
#include "cogan/models/generator.hpp"
#include "cogan/models/perceptual.hpp"

namespace cogan::models {

struct ParameterCounts {
  int64_t generator_vis = 0;
  int64_t generator_nir = 0;
  int64_t encoder = 0;  // per branch
  int64_t discriminator_vis = 0;
  int64_t discriminator_nir = 0;
  int64_t perceptual = 0;  // frozen
  int64_t trainable = 0;
};

/// The coupled networks. VIS and NIR branches share architecture but own
/// disjoint parameter tensors.
struct ModelBundle {
  ModelConfig config;
  UNetGenerator generator_vis{nullptr};
  UNetGenerator generator_nir{nullptr};
  Discriminator discriminator_vis{nullptr};
  Discriminator discriminator_nir{nullptr};
  PerceptualNet perceptual{nullptr};

  std::vector<torch::Tensor> generator_parameters() const;
  std::vector<torch::Tensor> discriminator_parameters() const;
  /// Switches generators and discriminators; φ always stays in eval mode.
  void train(bool on = true);
  ParameterCounts counts() const;
};

/// Builds the bundle from `config.weight_seed`. The perceptual network comes
/// from `config.perceptual_weights` when set, otherwise from a seed derived
/// from the weight seed; either way it is frozen.
ModelBundle instantiate_models(const ModelConfig& config);

/// Seed used for the randomly initialised perceptual network.
std::uint64_t perceptual_seed(const ModelConfig& config);

struct EmbeddingBatch {
  torch::Tensor vectors;  // B×|z|
  data::Spectrum source = data::Spectrum::Vis;
};

/// Inference-mode embedding (batch-norm running statistics, no autograd).
EmbeddingBatch encode(ResNetEncoder& encoder, const torch::Tensor& images, data::Spectrum source);

/// Runs the generator in its current mode and returns G(x).
torch::Tensor reconstruct(UNetGenerator& generator, const torch::Tensor& images);

torch::Tensor discriminate(Discriminator& discriminator, const torch::Tensor& candidate,
                           const torch::Tensor& condition);

torch::Tensor perceptual_features(PerceptualNet& net, const torch::Tensor& images);

/// Order-sensitive SHA-256 over every named parameter and buffer.
std::string module_checksum(const torch::nn::Module& module);

nlohmann::json summarize(const ModelBundle& bundle);

}  // namespace cogan::models

#pragma once

#include <vector>

#include <torch/torch.h>

#include "cogan/models/config.hpp"
#include "cogan/models/encoder.hpp"

namespace cogan::models {

/// Transposed-conv decoder mirroring the encoder. Each of the four upsampling
/// stages concatenates the matching encoder activation (with skips disabled,
/// zeros of the same shape); a fifth transposed conv emits the image.
class UNetDecoderImpl : public torch::nn::Module {
 public:
  explicit UNetDecoderImpl(const ModelConfig& config);
  torch::Tensor forward(const EncoderFeatures& features, bool use_skips = true);

 private:
  std::vector<torch::nn::ConvTranspose2d> up_;
  std::vector<torch::nn::BatchNorm2d> up_bn_;
  std::vector<torch::nn::Conv2d> fuse_;
  std::vector<torch::nn::BatchNorm2d> fuse_bn_;
  torch::nn::ConvTranspose2d head_{nullptr};
};
TORCH_MODULE(UNetDecoder);

struct GeneratorOutput {
  torch::Tensor embedding;
  torch::Tensor reconstruction;
};

/// Deterministic conditional autoencoder: the encoder embeds the input and
/// the decoder recreates it in standardized pixel units (no output squashing).
class UNetGeneratorImpl : public torch::nn::Module {
 public:
  explicit UNetGeneratorImpl(const ModelConfig& config);

  GeneratorOutput forward(const torch::Tensor& x);

  ResNetEncoder& encoder() { return encoder_; }
  UNetDecoder& decoder() { return decoder_; }
  const ResNetEncoder& encoder() const { return encoder_; }
  const UNetDecoder& decoder() const { return decoder_; }
  void set_skips_enabled(bool on) { skips_enabled_ = on; }
  bool skips_enabled() const { return skips_enabled_; }

 private:
  ResNetEncoder encoder_{nullptr};
  UNetDecoder decoder_{nullptr};
  bool skips_enabled_ = true;
};
TORCH_MODULE(UNetGenerator);

}  // namespace cogan::models

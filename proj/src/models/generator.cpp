#include "cogan/models/generator.hpp"

#include <array>

namespace nn = torch::nn;

namespace cogan::models {

UNetDecoderImpl::UNetDecoderImpl(const ModelConfig& config) {
  const auto& enc = config.encoder_widths;
  const auto dec = config.resolved_decoder_widths();
  // Encoder activations met on the way up: layer3, layer2, layer1, stem, none.
  const std::array<int, 4> skip_channels{enc[2], enc[1], enc[0], enc[0]};

  int in = enc[3];
  for (std::size_t i = 0; i < 4; ++i) {
    const auto tag = std::to_string(i);
    up_.push_back(register_module(
        "up" + tag, nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, dec[i], 4).stride(2).padding(1).bias(false))));
    up_bn_.push_back(register_module("up_bn" + tag, nn::BatchNorm2d(dec[i])));
    fuse_.push_back(register_module(
        "fuse" + tag, nn::Conv2d(nn::Conv2dOptions(dec[i] + skip_channels[i], dec[i], 3).padding(1).bias(false))));
    fuse_bn_.push_back(register_module("fuse_bn" + tag, nn::BatchNorm2d(dec[i])));
    in = dec[i];
  }
  head_ = register_module(
      "head", nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, config.channels, 4).stride(2).padding(1)));
}

torch::Tensor UNetDecoderImpl::forward(const EncoderFeatures& features, bool use_skips) {
  auto h = features.bottleneck;
  for (std::size_t i = 0; i < 4; ++i) {
    h = torch::relu(up_bn_[i](up_[i](h)));
    const auto& skip = features.skips[3 - i];
    h = torch::cat({h, use_skips ? skip : torch::zeros_like(skip)}, 1);
    h = torch::relu(fuse_bn_[i](fuse_[i](h)));
  }
  return head_(h);
}

UNetGeneratorImpl::UNetGeneratorImpl(const ModelConfig& config) {
  encoder_ = register_module("encoder", ResNetEncoder(config));
  decoder_ = register_module("decoder", UNetDecoder(config));
}

GeneratorOutput UNetGeneratorImpl::forward(const torch::Tensor& x) {
  auto f = encoder_->features(x);
  return {f.embedding, decoder_->forward(f, skips_enabled_)};
}

}  // namespace cogan::models

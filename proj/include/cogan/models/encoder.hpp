#pragma once

#include <array>

#include <torch/torch.h>

#include "cogan/models/config.hpp"

namespace cogan::models {

/// ResNet basic block: two 3×3 convs with batch norm and an identity or
/// 1×1 projection shortcut.
class BasicBlockImpl : public torch::nn::Module {
 public:
  BasicBlockImpl(int in_channels, int out_channels, int stride);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
  torch::nn::Sequential shortcut_{nullptr};
};
TORCH_MODULE(BasicBlock);

/// Activations the U-Net decoder consumes. `skips` holds the stem output and
/// the first three residual stages (shallow to deep); `bottleneck` is the
/// last stage before pooling.
struct EncoderFeatures {
  torch::Tensor embedding;
  torch::Tensor bottleneck;
  std::array<torch::Tensor, 4> skips;
};

/// ResNet-18-style backbone without a classifier, followed by a learned
/// affine projection from the pooled feature to the embedding.
class ResNetEncoderImpl : public torch::nn::Module {
 public:
  explicit ResNetEncoderImpl(const ModelConfig& config);

  EncoderFeatures features(const torch::Tensor& x);
  torch::Tensor forward(const torch::Tensor& x);

  int embedding_dim() const { return embedding_dim_; }
  int channels() const { return channels_; }
  int side() const { return side_; }

 private:
  int embedding_dim_;
  int channels_;
  int side_;
  torch::nn::Conv2d stem_conv_{nullptr};
  torch::nn::BatchNorm2d stem_bn_{nullptr};
  std::array<torch::nn::Sequential, 4> stages_;
  torch::nn::Linear projection_{nullptr};
};
TORCH_MODULE(ResNetEncoder);

/// Throws ValidationError unless `images` is B×C×S×S for this network.
void check_image_batch(const torch::Tensor& images, int channels, int side, const char* what);

}  // namespace cogan::models

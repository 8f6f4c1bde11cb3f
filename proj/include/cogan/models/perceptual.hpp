#pragma once

#include <array>

#include <torch/torch.h>

#include "cogan/models/config.hpp"

namespace cogan::models {

/// Fixed VGG-style feature extractor φ. Layers are registered under
/// `features.<i>` in plan order (conv, relu, ..., pool), matching the
/// torchvision VGG16 layout for the paper plan, so converted pretrained
/// weights load by name. All parameters are frozen at construction.
class PerceptualNetImpl : public torch::nn::Module {
 public:
  explicit PerceptualNetImpl(const ModelConfig& config);

  /// ReLU activations of the configured conv layer, B×C_k×H_k×W_k.
  torch::Tensor forward(const torch::Tensor& x);

  /// (C_k, H_k, W_k) for a profile-sized input.
  std::array<int64_t, 3> feature_shape() const { return feature_shape_; }
  int layer() const { return layer_; }

 private:
  int channels_;
  int side_;
  int layer_;
  std::size_t stop_ = 0;  // number of `features` entries evaluated
  std::array<int64_t, 3> feature_shape_{};
  torch::nn::Sequential features_{nullptr};
};
TORCH_MODULE(PerceptualNet);

}  // namespace cogan::models

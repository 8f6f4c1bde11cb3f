#pragma once

#include <vector>

#include <torch/torch.h>

#include "cogan/models/config.hpp"

namespace cogan::models {

/// Conditional discriminator D(candidate | condition). The condition is
/// concatenated to the candidate along channels, so the first conv sees 2C
/// inputs. Stride-2 4×4 convs with LeakyReLU; batch norm on every layer but
/// the first; a linear head produces one logit per item.
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(const ModelConfig& config);

  torch::Tensor logits(const torch::Tensor& candidate, const torch::Tensor& condition);
  /// Per-item probability, kept strictly inside (0, 1).
  torch::Tensor forward(const torch::Tensor& candidate, const torch::Tensor& condition);

  const std::vector<int>& widths() const { return widths_; }

 private:
  std::vector<int> widths_;
  int channels_;
  int side_;
  torch::nn::Sequential body_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(Discriminator);

}  // namespace cogan::models

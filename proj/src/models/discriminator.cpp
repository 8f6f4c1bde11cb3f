#include "cogan/models/discriminator.hpp"

#include <limits>

#include "cogan/error.hpp"
#include "cogan/models/encoder.hpp"

namespace nn = torch::nn;

namespace cogan::models {

DiscriminatorImpl::DiscriminatorImpl(const ModelConfig& config)
    : widths_(config.discriminator_widths), channels_(config.channels), side_(config.profile.side) {
  config.validate();
  nn::Sequential body;
  int in = 2 * config.channels;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    body->push_back(nn::Conv2d(nn::Conv2dOptions(in, widths_[i], 4).stride(2).padding(1).bias(i == 0)));
    if (i > 0) body->push_back(nn::BatchNorm2d(widths_[i]));
    body->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    in = widths_[i];
  }
  body_ = register_module("body", body);
  const int out_side = side_ >> widths_.size();
  head_ = register_module("head", nn::Linear(static_cast<int64_t>(in) * out_side * out_side, 1));
}

torch::Tensor DiscriminatorImpl::logits(const torch::Tensor& candidate, const torch::Tensor& condition) {
  check_image_batch(candidate, channels_, side_, "discriminate(candidate)");
  check_image_batch(condition, channels_, side_, "discriminate(condition)");
  if (candidate.size(0) != condition.size(0)) reject("discriminate: candidate and condition batch sizes differ");
  return head_(body_->forward(torch::cat({candidate, condition}, 1)).flatten(1)).squeeze(1);
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& candidate, const torch::Tensor& condition) {
  const auto p = torch::sigmoid(logits(candidate, condition));
  // float sigmoid rounds to exactly 0 or 1 for |logit| beyond ~17 (resp. ~88).
  const double lo = std::numeric_limits<float>::denorm_min();
  const double hi = std::nextafter(1.0f, 0.0f);
  return p.clamp(lo, hi);
}

}  // namespace cogan::models

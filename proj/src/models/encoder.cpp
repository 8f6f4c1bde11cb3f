#include "cogan/models/encoder.hpp"

#include <sstream>

#include "cogan/error.hpp"

namespace nn = torch::nn;

namespace cogan::models {

void check_image_batch(const torch::Tensor& images, int channels, int side, const char* what) {
  if (images.dim() != 4 || images.size(1) != channels || images.size(2) != side || images.size(3) != side) {
    std::ostringstream msg;
    msg << what << ": expected B×" << channels << "×" << side << "×" << side << " images, got " << images.sizes();
    reject(msg.str());
  }
}

BasicBlockImpl::BasicBlockImpl(int in_channels, int out_channels, int stride) {
  conv1_ = register_module(
      "conv1", nn::Conv2d(nn::Conv2dOptions(in_channels, out_channels, 3).stride(stride).padding(1).bias(false)));
  bn1_ = register_module("bn1", nn::BatchNorm2d(out_channels));
  conv2_ = register_module("conv2",
                           nn::Conv2d(nn::Conv2dOptions(out_channels, out_channels, 3).padding(1).bias(false)));
  bn2_ = register_module("bn2", nn::BatchNorm2d(out_channels));
  if (stride != 1 || in_channels != out_channels) {
    shortcut_ = register_module(
        "shortcut",
        nn::Sequential(nn::Conv2d(nn::Conv2dOptions(in_channels, out_channels, 1).stride(stride).bias(false)),
                       nn::BatchNorm2d(out_channels)));
  }
}

torch::Tensor BasicBlockImpl::forward(const torch::Tensor& x) {
  auto out = torch::relu(bn1_(conv1_(x)));
  out = bn2_(conv2_(out));
  return torch::relu(out + (shortcut_ ? shortcut_->forward(x) : x));
}

ResNetEncoderImpl::ResNetEncoderImpl(const ModelConfig& config)
    : embedding_dim_(config.embedding_dim), channels_(config.channels), side_(config.profile.side) {
  config.validate();
  const auto& w = config.encoder_widths;
  stem_conv_ = register_module(
      "stem_conv", nn::Conv2d(nn::Conv2dOptions(config.channels, w[0], 7).stride(2).padding(3).bias(false)));
  stem_bn_ = register_module("stem_bn", nn::BatchNorm2d(w[0]));

  int in = w[0];
  for (int s = 0; s < 4; ++s) {
    nn::Sequential stage;
    for (int b = 0; b < config.blocks_per_stage[s]; ++b) {
      const int stride = (s > 0 && b == 0) ? 2 : 1;
      stage->push_back(BasicBlock(in, w[s], stride));
      in = w[s];
    }
    stages_[s] = register_module("layer" + std::to_string(s + 1), stage);
  }
  projection_ = register_module("projection", nn::Linear(w[3], config.embedding_dim));

  for (auto& m : modules(/*include_self=*/false)) {
    if (auto* conv = m->as<nn::Conv2d>()) {
      nn::init::kaiming_normal_(conv->weight, 0.0, torch::kFanOut, torch::kReLU);
    } else if (auto* bn = m->as<nn::BatchNorm2d>()) {
      nn::init::ones_(bn->weight);
      nn::init::zeros_(bn->bias);
    }
  }
  // Small head: both branches start with distances well inside the margin.
  nn::init::normal_(projection_->weight, 0.0, 0.01);
  nn::init::zeros_(projection_->bias);
}

EncoderFeatures ResNetEncoderImpl::features(const torch::Tensor& x) {
  EncoderFeatures f;
  auto h = torch::relu(stem_bn_(stem_conv_(x)));
  f.skips[0] = h;
  h = torch::max_pool2d(h, 3, 2, 1);
  for (int s = 0; s < 3; ++s) {
    h = stages_[s]->forward(h);
    f.skips[s + 1] = h;
  }
  f.bottleneck = stages_[3]->forward(h);
  f.embedding = projection_(torch::adaptive_avg_pool2d(f.bottleneck, {1, 1}).flatten(1));
  return f;
}

torch::Tensor ResNetEncoderImpl::forward(const torch::Tensor& x) { return features(x).embedding; }

}  // namespace cogan::models

#include "cogan/models/perceptual.hpp"

#include "cogan/models/encoder.hpp"

namespace nn = torch::nn;

namespace cogan::models {

PerceptualNetImpl::PerceptualNetImpl(const ModelConfig& config)
    : channels_(config.channels), side_(config.profile.side), layer_(config.resolved_perceptual_layer()) {
  config.validate();
  nn::Sequential features;
  int in = config.channels;
  int side = config.profile.side;
  int convs = 0;
  for (int w : config.perceptual_plan) {
    if (w == 0) {
      features->push_back(nn::MaxPool2d(nn::MaxPool2dOptions(2).stride(2)));
      side /= 2;
      continue;
    }
    features->push_back(nn::Conv2d(nn::Conv2dOptions(in, w, 3).padding(1)));
    features->push_back(nn::ReLU());
    in = w;
    if (++convs == layer_) {
      stop_ = features->size();
      feature_shape_ = {w, side, side};
    }
  }
  features_ = register_module("features", features);

  // He initialisation keeps activation scale roughly constant through depth,
  // so randomly initialised features stay informative at the last layer.
  for (auto& m : features_->modules(/*include_self=*/false)) {
    if (auto* conv = m->as<nn::Conv2d>()) {
      nn::init::kaiming_normal_(conv->weight, 0.0, torch::kFanIn, torch::kReLU);
      nn::init::zeros_(conv->bias);
    }
  }
  for (auto& p : parameters()) p.set_requires_grad(false);
  eval();
}

torch::Tensor PerceptualNetImpl::forward(const torch::Tensor& x) {
  check_image_batch(x, channels_, side_, "perceptual_features");
  auto h = x;
  auto it = features_->begin();
  for (std::size_t i = 0; i < stop_; ++i, ++it) h = it->forward(h);
  return h;
}

}  // namespace cogan::models

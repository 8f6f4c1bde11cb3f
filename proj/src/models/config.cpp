#include "cogan/models/config.hpp"

#include <algorithm>

#include "cogan/error.hpp"

namespace cogan::models {

ModelConfig ModelConfig::for_profile(const data::ScaleProfile& profile) {
  ModelConfig c;
  c.profile = profile;
  if (profile.name == "paper") {
    c.encoder_widths = {64, 128, 256, 512};
    c.perceptual_plan = {64, 64, 0, 128, 128, 0, 256, 256, 256, 0, 512, 512, 512, 0, 512, 512, 512};
  } else {
    c.encoder_widths = {16, 32, 64, 128};
    c.decoder_widths = {64, 32, 16, 8};
    c.perceptual_plan = {4, 4, 0, 8, 8, 0, 16, 16, 16, 0, 32, 32, 32, 0, 32, 32, 32};
  }
  return c;
}

int ModelConfig::perceptual_conv_count() const {
  return static_cast<int>(std::count_if(perceptual_plan.begin(), perceptual_plan.end(), [](int w) { return w > 0; }));
}

int ModelConfig::resolved_perceptual_layer() const {
  return perceptual_layer == 0 ? perceptual_conv_count() : perceptual_layer;
}

std::vector<int> ModelConfig::resolved_decoder_widths() const {
  if (!decoder_widths.empty()) return decoder_widths;
  // Upsampling stages land on layer3, layer2, layer1 and the stem.
  return {encoder_widths[2], encoder_widths[1], encoder_widths[0], encoder_widths[0]};
}

void ModelConfig::validate() const {
  if (embedding_dim <= 0) reject("embedding_dim must be positive");
  if (channels <= 0) reject("channels must be positive");
  if (encoder_widths.size() != 4 || blocks_per_stage.size() != 4) {
    reject("encoder plan needs exactly four residual stages");
  }
  if (std::any_of(encoder_widths.begin(), encoder_widths.end(), [](int w) { return w <= 0; }) ||
      std::any_of(blocks_per_stage.begin(), blocks_per_stage.end(), [](int b) { return b <= 0; })) {
    reject("encoder widths and block counts must be positive");
  }
  if (resolved_decoder_widths().size() != 4) reject("decoder plan needs four upsampling widths");
  if (std::any_of(decoder_widths.begin(), decoder_widths.end(), [](int w) { return w <= 0; })) {
    reject("decoder widths must be positive");
  }
  if (discriminator_widths.empty()) reject("discriminator needs at least one layer");
  // Five stride-2 reductions in the encoder (stem, pool, three stages).
  if (profile.side <= 0 || profile.side % 32 != 0) {
    reject("profile side " + std::to_string(profile.side) +
           " is not a multiple of 32; the encoder cannot reduce it to a pooled feature for the projection head");
  }
  const int disc_stride = 1 << discriminator_widths.size();
  if (profile.side % disc_stride != 0) reject("profile side incompatible with discriminator depth");
  const int convs = perceptual_conv_count();
  if (convs == 0) reject("perceptual plan has no conv layers");
  if (perceptual_layer < 0 || perceptual_layer > convs) {
    reject("perceptual layer " + std::to_string(perceptual_layer) + " out of range 1.." + std::to_string(convs));
  }
  int side = profile.side;
  for (int w : perceptual_plan) {
    if (w == 0) side /= 2;
    if (w < 0) reject("perceptual plan entries must be >= 0");
  }
  if (side < 1) reject("perceptual plan pools below 1 pixel");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"profile", c.profile.name},
          {"channels", c.channels},
          {"embedding_dim", c.embedding_dim},
          {"encoder_widths", c.encoder_widths},
          {"blocks_per_stage", c.blocks_per_stage},
          {"decoder_widths", c.decoder_widths},
          {"discriminator_widths", c.discriminator_widths},
          {"perceptual_plan", c.perceptual_plan},
          {"perceptual_layer", c.perceptual_layer},
          {"weight_seed", c.weight_seed},
          {"perceptual_weights", c.perceptual_weights}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
  auto c = ModelConfig::for_profile(data::ScaleProfile::by_name(doc.value("profile", std::string("desk"))));
  c.channels = doc.value("channels", c.channels);
  c.embedding_dim = doc.value("embedding_dim", c.embedding_dim);
  c.encoder_widths = doc.value("encoder_widths", c.encoder_widths);
  c.blocks_per_stage = doc.value("blocks_per_stage", c.blocks_per_stage);
  c.decoder_widths = doc.value("decoder_widths", c.decoder_widths);
  c.discriminator_widths = doc.value("discriminator_widths", c.discriminator_widths);
  c.perceptual_plan = doc.value("perceptual_plan", c.perceptual_plan);
  c.perceptual_layer = doc.value("perceptual_layer", c.perceptual_layer);
  c.weight_seed = doc.value("weight_seed", c.weight_seed);
  c.perceptual_weights = doc.value("perceptual_weights", c.perceptual_weights);
  return c;
}

}  // namespace cogan::models

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/profile.hpp"

namespace cogan::models {

/// Shape of the coupled networks. Defaults come from `for_profile`: the
/// paper profile uses full ResNet-18 widths and a VGG16 feature plan, the
/// desk profile keeps the same topology with reduced widths.
struct ModelConfig {
  data::ScaleProfile profile = data::ScaleProfile::desk();
  int channels = 3;
  int embedding_dim = 64;
  /// Residual stage widths; the stem uses the first one.
  std::vector<int> encoder_widths;
  std::vector<int> blocks_per_stage{2, 2, 2, 2};
  /// Decoder widths from the deepest upsampling stage to the last; empty
  /// means the mirror of the encoder.
  std::vector<int> decoder_widths;
  std::vector<int> discriminator_widths{16, 32, 64, 128};
  /// VGG-style plan: positive entries are 3×3 conv widths, 0 is a 2×2 max-pool.
  std::vector<int> perceptual_plan;
  /// 1-based index of the conv layer whose ReLU activations are the features;
  /// 0 selects the last conv layer.
  int perceptual_layer = 0;
  std::uint64_t weight_seed = 0;
  /// Optional named-tensor blob with pretrained perceptual weights.
  std::string perceptual_weights;

  static ModelConfig for_profile(const data::ScaleProfile& profile);

  void validate() const;
  std::vector<int> resolved_decoder_widths() const;
  int resolved_perceptual_layer() const;
  int perceptual_conv_count() const;

  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& config);
/// Missing keys fall back to the profile defaults.
ModelConfig model_config_from_json(const nlohmann::json& doc);

}  // namespace cogan::models

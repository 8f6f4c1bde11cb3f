#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cogan/data/profile.hpp"
#include "cogan/losses/losses.hpp"
#include "cogan/models/config.hpp"

namespace cogan::training {

/// Where the λ_L2 term lives. `Loss` adds λ_L2·Σ‖p‖² to each objective;
/// `Optimizer` hands λ_L2 to Adam's (coupled) weight decay instead.
enum class WeightDecayPath { Loss, Optimizer };
std::string to_string(WeightDecayPath p);

struct TrainConfig {
  std::uint64_t seed = 0;
  data::ScaleProfile profile = data::ScaleProfile::desk();
  models::ModelConfig model = models::ModelConfig::for_profile(data::ScaleProfile::desk());
  losses::LossWeights weights;
  losses::AdversarialMode adversarial_mode = losses::AdversarialMode::NonSaturating;
  WeightDecayPath weight_decay_path = WeightDecayPath::Loss;

  int batch_pairs = 100;
  int epochs = 30;
  /// 0: as many pairs as there are genuine TRAIN combinations,
  /// ceil(Σ_class n_vis·n_nir / batch_pairs).
  int steps_per_epoch = 0;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double genuine_prob = 0.5;
  bool augment = true;
  int checkpoint_every = 1;
  int eval_batch_size = 64;
  /// Pins intra-op threads and requests deterministic kernels.
  bool deterministic = true;
  int threads = 1;

  /// Paper profile: 300 epochs at 256×256. Desk profile: 30 epochs at 64×64.
  static TrainConfig defaults(const data::ScaleProfile& profile);
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Full run document: {"seed", "profile", "data", "model", "loss", "train", "eval"}.
/// `seed` is mandatory; model.weight_seed defaults to it.
nlohmann::json to_json(const TrainConfig& config, const std::string& manifest_path = "");
TrainConfig train_config_from_json(const nlohmann::json& doc);

/// Defaults for a profile with every key present, so `--set` overrides can
/// be validated against the schema.
nlohmann::json default_run_document(const data::ScaleProfile& profile);

}  // namespace cogan::training

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/manifest.hpp"
#include "cogan/evaluation/roc.hpp"
#include "cogan/losses/losses.hpp"
#include "cogan/models/bundle.hpp"
#include "cogan/training/config.hpp"

namespace cogan::training {

/// Per-epoch means of every logged loss component.
struct EpochRecord {
  int epoch = 0;
  int steps = 0;
  losses::LossBreakdown loss;
  std::optional<double> validation_auc;
};

nlohmann::json to_json(const EpochRecord& record, WeightDecayPath path);

struct TrainOptions {
  /// When set, receives `config.json`, `history.jsonl`, `checkpoints/last`,
  /// `checkpoints/encoders` and `final.json`.
  std::filesystem::path run_dir;
  /// Evaluated on its TEST split after every epoch; drives `checkpoints/best`.
  const data::DatasetManifest* validation = nullptr;
  /// Written as `config.json` instead of the bare config when non-null
  /// (the CLI passes the resolved run document, data paths included).
  nlohmann::json config_document;
  bool verbose = false;
  std::function<void(const EpochRecord&)> on_epoch;
  /// Called after every optimisation step with the step index (tests use it
  /// to watch the frozen perceptual network).
  std::function<void(int, const models::ModelBundle&)> on_step;
};

struct TrainResult {
  models::ModelBundle bundle;
  std::vector<EpochRecord> history;
  /// SHA-256 over the checksums of every network in the bundle.
  std::string weight_hash;
  std::optional<int> best_epoch;
};

int resolved_steps_per_epoch(const TrainConfig& config, const data::DatasetManifest& manifest);

/// Alternating cGAN updates: per step one discriminator update on the coupled
/// discriminator term, then one generator+encoder update on
/// λ_C·L_C + λ_A·L_A(G) + λ_R·L_R + λ_P·L_P (+ λ_L2·L_L2), both on the same
/// minibatch. Terms whose λ is zero are skipped, including the discriminator
/// update when λ_A = 0. All randomness flows from `config.seed`.
TrainResult train_cogan(const TrainConfig& config, const data::DatasetManifest& manifest,
                        const TrainOptions& options = {});

/// SHA-256 over the checksums of all networks.
std::string bundle_hash(const models::ModelBundle& bundle);

/// Trains on the TRAIN split, then evaluates the encoders on the TEST split.
/// With a run directory the report lands in `<run_dir>/eval/`.
evaluation::VerificationReport train_and_evaluate(const TrainConfig& config, const data::DatasetManifest& manifest,
                                                  const std::filesystem::path& run_dir = {},
                                                  std::string* weight_hash = nullptr);

}  // namespace cogan::training

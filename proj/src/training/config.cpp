#include "cogan/training/config.hpp"

#include "cogan/error.hpp"

namespace cogan::training {

std::string to_string(WeightDecayPath p) { return p == WeightDecayPath::Loss ? "loss" : "optimizer"; }

static WeightDecayPath weight_decay_path_from_string(std::string_view s) {
  if (s == "loss") return WeightDecayPath::Loss;
  if (s == "optimizer") return WeightDecayPath::Optimizer;
  reject("unknown weight_decay_path: " + std::string(s));
}

TrainConfig TrainConfig::defaults(const data::ScaleProfile& profile) {
  TrainConfig c;
  c.profile = profile;
  c.model = models::ModelConfig::for_profile(profile);
  c.epochs = profile.name == "paper" ? 300 : 30;
  return c;
}

void TrainConfig::validate() const {
  if (epochs < 1) reject("epochs must be >= 1");
  if (batch_pairs < 1) reject("batch_pairs must be >= 1");
  if (!(learning_rate > 0.0)) reject("learning_rate must be positive");
  if (steps_per_epoch < 0) reject("steps_per_epoch must be >= 0");
  if (!(genuine_prob >= 0.0 && genuine_prob <= 1.0)) reject("genuine_prob must lie in [0, 1]");
  if (checkpoint_every < 0) reject("checkpoint_every must be >= 0");
  if (eval_batch_size < 1) reject("eval batch_size must be >= 1");
  if (threads < 0) reject("threads must be >= 0");
  if (!(model.profile == profile)) reject("model profile differs from run profile");
  weights.validate();
  model.validate();
}

nlohmann::json to_json(const TrainConfig& c, const std::string& manifest_path) {
  return {{"seed", c.seed},
          {"profile", c.profile.name},
          {"data", {{"manifest", manifest_path}}},
          {"model", models::to_json(c.model)},
          {"loss", losses::to_json(c.weights)},
          {"train",
           {{"batch_pairs", c.batch_pairs},
            {"epochs", c.epochs},
            {"steps_per_epoch", c.steps_per_epoch},
            {"learning_rate", c.learning_rate},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"genuine_prob", c.genuine_prob},
            {"augment", c.augment},
            {"adversarial_mode", losses::to_string(c.adversarial_mode)},
            {"weight_decay_path", to_string(c.weight_decay_path)},
            {"checkpoint_every", c.checkpoint_every},
            {"deterministic", c.deterministic},
            {"threads", c.threads}}},
          {"eval", {{"batch_size", c.eval_batch_size}}}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
  if (!doc.contains("seed") || !doc["seed"].is_number_integer()) reject("config must set an integer 'seed'");
  const auto profile = data::ScaleProfile::by_name(doc.value("profile", std::string("desk")));
  auto c = TrainConfig::defaults(profile);
  c.seed = doc["seed"].get<std::uint64_t>();

  auto model_doc = doc.value("model", nlohmann::json::object());
  model_doc["profile"] = profile.name;
  if (!model_doc.contains("weight_seed") || model_doc["weight_seed"].is_null()) model_doc["weight_seed"] = c.seed;
  c.model = models::model_config_from_json(model_doc);
  c.weights = losses::loss_weights_from_json(doc.value("loss", nlohmann::json::object()));

  const auto t = doc.value("train", nlohmann::json::object());
  c.batch_pairs = t.value("batch_pairs", c.batch_pairs);
  c.epochs = t.value("epochs", c.epochs);
  c.steps_per_epoch = t.value("steps_per_epoch", c.steps_per_epoch);
  c.learning_rate = t.value("learning_rate", c.learning_rate);
  c.adam_beta1 = t.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = t.value("adam_beta2", c.adam_beta2);
  c.genuine_prob = t.value("genuine_prob", c.genuine_prob);
  c.augment = t.value("augment", c.augment);
  c.adversarial_mode = losses::adversarial_mode_from_string(t.value("adversarial_mode", std::string("non_saturating")));
  c.weight_decay_path = weight_decay_path_from_string(t.value("weight_decay_path", std::string("loss")));
  c.checkpoint_every = t.value("checkpoint_every", c.checkpoint_every);
  c.deterministic = t.value("deterministic", c.deterministic);
  c.threads = t.value("threads", c.threads);
  c.eval_batch_size = doc.value("eval", nlohmann::json::object()).value("batch_size", c.eval_batch_size);
  c.validate();
  return c;
}

nlohmann::json default_run_document(const data::ScaleProfile& profile) {
  auto doc = to_json(TrainConfig::defaults(profile));
  doc["seed"] = nullptr;
  doc["model"]["weight_seed"] = nullptr;
  return doc;
}

}  // namespace cogan::training

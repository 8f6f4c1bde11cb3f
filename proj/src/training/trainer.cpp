#include "cogan/training/trainer.hpp"

#include <ATen/Context.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "cogan/data/preprocess.hpp"
#include "cogan/data/sampler.hpp"
#include "cogan/error.hpp"
#include "cogan/evaluation/report.hpp"
#include "cogan/evaluation/scoring.hpp"
#include "cogan/models/checkpoint.hpp"
#include "cogan/util/config.hpp"
#include "cogan/util/hash.hpp"

namespace fs = std::filesystem;

namespace cogan::training {
namespace {

void accumulate(losses::LossBreakdown& sum, const losses::LossBreakdown& b) {
  sum.contrastive += b.contrastive;
  sum.adversarial_D += b.adversarial_D;
  sum.adversarial_G += b.adversarial_G;
  sum.reconstruction += b.reconstruction;
  sum.perceptual += b.perceptual;
  sum.weight_decay += b.weight_decay;
  sum.total += b.total;
}

losses::LossBreakdown scaled(losses::LossBreakdown b, double f) {
  b.contrastive *= f;
  b.adversarial_D *= f;
  b.adversarial_G *= f;
  b.reconstruction *= f;
  b.perceptual *= f;
  b.weight_decay *= f;
  b.total *= f;
  return b;
}

double finite_item(const torch::Tensor& t, const char* name, int step) {
  const double v = t.item<double>();
  if (!std::isfinite(v)) {
    fail(std::string("non-finite loss component '") + name + "' at step " + std::to_string(step));
  }
  return v;
}

models::EncoderPair encoders_of(models::ModelBundle& bundle) {
  return {bundle.config, bundle.generator_vis->encoder(), bundle.generator_nir->encoder()};
}

void append_line(const fs::path& file, const nlohmann::json& doc) {
  std::ofstream out(file, std::ios::app);
  if (!out) fail("cannot append to " + file.string());
  out << doc.dump() << '\n';
  if (!out) fail("write failed for " + file.string());
}

}  // namespace

nlohmann::json to_json(const EpochRecord& r, WeightDecayPath path) {
  nlohmann::json doc = {{"epoch", r.epoch},
                        {"steps", r.steps},
                        {"loss", losses::to_json(r.loss)},
                        {"weight_decay_path", to_string(path)}};
  if (r.validation_auc) doc["validation_auc"] = *r.validation_auc;
  return doc;
}

int resolved_steps_per_epoch(const TrainConfig& config, const data::DatasetManifest& manifest) {
  if (config.steps_per_epoch > 0) return config.steps_per_epoch;
  const auto genuine = data::PairSampler(manifest, data::Split::Train).genuine_combinations();
  return static_cast<int>(std::max<std::size_t>(1, (genuine + config.batch_pairs - 1) / config.batch_pairs));
}

std::string bundle_hash(const models::ModelBundle& b) {
  std::string text;
  for (const torch::nn::Module* m :
       {static_cast<const torch::nn::Module*>(b.generator_vis.get()),
        static_cast<const torch::nn::Module*>(b.generator_nir.get()),
        static_cast<const torch::nn::Module*>(b.discriminator_vis.get()),
        static_cast<const torch::nn::Module*>(b.discriminator_nir.get()),
        static_cast<const torch::nn::Module*>(b.perceptual.get())}) {
    text += models::module_checksum(*m);
    text.push_back('\n');
  }
  return util::sha256_hex(text);
}

TrainResult train_cogan(const TrainConfig& config, const data::DatasetManifest& manifest,
                        const TrainOptions& options) {
  config.validate();
  if (manifest.indices(data::Split::Train).empty()) reject("training manifest has an empty TRAIN split");
  if (config.deterministic) at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/true);
  if (config.threads > 0) torch::set_num_threads(config.threads);

  const auto& w = config.weights;
  const bool use_adversarial = w.lambda_A > 0.0;
  const bool use_decoder = use_adversarial || w.lambda_R > 0.0 || w.lambda_P > 0.0;
  const bool decay_in_loss = config.weight_decay_path == WeightDecayPath::Loss;
  const double optimizer_decay = decay_in_loss ? 0.0 : w.lambda_L2;

  TrainResult result{instantiate_models(config.model), {}, {}, std::nullopt};
  auto& bundle = result.bundle;
  torch::manual_seed(config.seed);
  std::mt19937_64 rng(config.seed);

  auto adam = [&](const std::vector<torch::Tensor>& params) {
    return torch::optim::Adam(params, torch::optim::AdamOptions(config.learning_rate)
                                          .betas({config.adam_beta1, config.adam_beta2})
                                          .weight_decay(optimizer_decay));
  };
  torch::optim::Adam generator_opt = adam(bundle.generator_parameters());
  torch::optim::Adam discriminator_opt = adam(bundle.discriminator_parameters());

  data::ImageStore store(manifest, config.profile);
  data::PairSampler sampler(manifest, data::Split::Train);
  const int steps_per_epoch = resolved_steps_per_epoch(config, manifest);

  const bool on_disk = !options.run_dir.empty();
  const auto history_file = options.run_dir / "history.jsonl";
  if (on_disk) {
    fs::create_directories(options.run_dir / "checkpoints");
    util::write_json(options.run_dir / "config.json",
                     options.config_document.is_null() ? to_json(config) : options.config_document);
    std::ofstream(history_file, std::ios::trunc);
  }
  const nlohmann::json checkpoint_extra = {{"train", to_json(config)}};

  auto phi = [&](const torch::Tensor& x) { return bundle.perceptual->forward(x); };
  double best_auc = -1.0;
  int step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    bundle.train(true);
    losses::LossBreakdown sum;
    for (int s = 0; s < steps_per_epoch; ++s, ++step) {
      auto batch = data::sample_pair_batch(sampler, store, config.batch_pairs, config.genuine_prob, rng, config.augment);
      losses::LossComponents c;

      torch::Tensor z_vis, z_nir, recon_vis, recon_nir;
      if (use_decoder) {
        auto out_vis = bundle.generator_vis->forward(batch.vis);
        auto out_nir = bundle.generator_nir->forward(batch.nir);
        z_vis = out_vis.embedding;
        z_nir = out_nir.embedding;
        recon_vis = out_vis.reconstruction;
        recon_nir = out_nir.reconstruction;
      } else {
        z_vis = bundle.generator_vis->encoder()->forward(batch.vis);
        z_nir = bundle.generator_nir->encoder()->forward(batch.nir);
      }

      // Discriminator update on the coupled term, conditioned on the input image.
      if (use_adversarial) {
        auto vis_terms = losses::adversarial_loss_terms_from_logits(
            bundle.discriminator_vis->logits(batch.vis, batch.vis),
            bundle.discriminator_vis->logits(recon_vis.detach(), batch.vis), config.adversarial_mode);
        auto nir_terms = losses::adversarial_loss_terms_from_logits(
            bundle.discriminator_nir->logits(batch.nir, batch.nir),
            bundle.discriminator_nir->logits(recon_nir.detach(), batch.nir), config.adversarial_mode);
        auto d_loss = losses::couple(vis_terms, nir_terms).discriminator;
        c.adversarial_D = finite_item(d_loss, "adversarial_D", step);
        if (decay_in_loss && w.lambda_L2 > 0.0) {
          d_loss = d_loss + w.lambda_L2 * losses::squared_parameter_norm(bundle.discriminator_parameters());
        }
        discriminator_opt.zero_grad();
        d_loss.backward();
        discriminator_opt.step();
      }

      // Generator + encoder update against the freshly updated discriminators.
      auto contrastive = losses::contrastive_loss(z_vis, z_nir, batch.labels, w.margin);
      c.contrastive = finite_item(contrastive, "contrastive", step);
      auto total = w.lambda_C * contrastive;
      if (use_adversarial) {
        auto g_adv = 0.5 * (losses::generator_adversarial_from_logits(
                                bundle.discriminator_vis->logits(recon_vis, batch.vis), config.adversarial_mode) +
                            losses::generator_adversarial_from_logits(
                                bundle.discriminator_nir->logits(recon_nir, batch.nir), config.adversarial_mode));
        c.adversarial_G = finite_item(g_adv, "adversarial_G", step);
        total = total + w.lambda_A * g_adv;
      }
      if (w.lambda_R > 0.0) {
        auto r = 0.5 * (losses::reconstruction_loss(batch.vis, recon_vis) +
                        losses::reconstruction_loss(batch.nir, recon_nir));
        c.reconstruction = finite_item(r, "reconstruction", step);
        total = total + w.lambda_R * r;
      }
      if (w.lambda_P > 0.0) {
        auto p = 0.5 * (losses::perceptual_loss(batch.vis, recon_vis, phi) +
                        losses::perceptual_loss(batch.nir, recon_nir, phi));
        c.perceptual = finite_item(p, "perceptual", step);
        total = total + w.lambda_P * p;
      }
      if (decay_in_loss) {
        auto l2 = losses::squared_parameter_norm(bundle.generator_parameters());
        c.weight_decay = finite_item(l2, "weight_decay", step);
        if (w.lambda_L2 > 0.0) total = total + w.lambda_L2 * l2;
      }

      generator_opt.zero_grad();
      total.backward();
      generator_opt.step();

      auto breakdown = losses::total_objective(c, w);
      if (!decay_in_loss) breakdown.weight_decay = 0.0;
      accumulate(sum, breakdown);
      if (options.on_step) options.on_step(step, bundle);
    }

    EpochRecord record{epoch, steps_per_epoch, scaled(sum, 1.0 / steps_per_epoch), std::nullopt};
    if (options.validation) {
      auto encoders = encoders_of(bundle);
      record.validation_auc =
          evaluation::evaluate(encoders, *options.validation, config.profile, config.eval_batch_size).auc;
    }
    result.history.push_back(record);

    if (on_disk) {
      append_line(history_file, to_json(record, config.weight_decay_path));
      const bool scheduled = config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0;
      try {
        if (scheduled || epoch == config.epochs) {
          models::save_checkpoint(bundle, options.run_dir / "checkpoints" / "last", epoch, checkpoint_extra);
        }
        if (record.validation_auc && *record.validation_auc > best_auc) {
          models::save_checkpoint(bundle, options.run_dir / "checkpoints" / "best", epoch, checkpoint_extra);
        }
      } catch (const std::exception& e) {
        fail(std::string("checkpoint write failed at epoch ") + std::to_string(epoch) +
             " (previous checkpoint left intact): " + e.what());
      }
    }
    if (record.validation_auc && *record.validation_auc > best_auc) {
      best_auc = *record.validation_auc;
      result.best_epoch = epoch;
    }
    if (options.verbose) {
      std::fprintf(stderr, "epoch %3d/%d  total %.5f  contrastive %.5f  adv_D %.4f  adv_G %.4f  rec %.4f  perc %.4f%s\n",
                   epoch, config.epochs, record.loss.total, record.loss.contrastive, record.loss.adversarial_D,
                   record.loss.adversarial_G, record.loss.reconstruction, record.loss.perceptual,
                   record.validation_auc ? ("  val_auc " + std::to_string(*record.validation_auc)).c_str() : "");
    }
    if (options.on_epoch) options.on_epoch(record);
  }

  bundle.train(false);
  result.weight_hash = bundle_hash(bundle);
  if (on_disk) {
    models::strip_to_encoders(options.run_dir / "checkpoints" / "last", options.run_dir / "checkpoints" / "encoders");
    nlohmann::json final_doc = {{"epochs", config.epochs}, {"steps", step}, {"weight_hash", result.weight_hash}};
    if (result.best_epoch) final_doc["best_epoch"] = *result.best_epoch;
    util::write_json(options.run_dir / "final.json", final_doc);
  }
  return result;
}

evaluation::VerificationReport train_and_evaluate(const TrainConfig& config, const data::DatasetManifest& manifest,
                                                  const fs::path& run_dir, std::string* weight_hash) {
  TrainOptions options;
  options.run_dir = run_dir;
  auto result = train_cogan(config, manifest, options);
  auto encoders = encoders_of(result.bundle);
  evaluation::ScoreSet scores;
  auto report = evaluation::evaluate(encoders, manifest, config.profile, config.eval_batch_size, &scores);
  report.config = to_json(config);
  if (!run_dir.empty()) evaluation::emit_report(report, run_dir / "eval");
  if (weight_hash) *weight_hash = result.weight_hash;
  return report;
}

}  // namespace cogan::training

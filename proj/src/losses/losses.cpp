#include "cogan/losses/losses.hpp"

#include <cmath>

#include "cogan/error.hpp"

namespace cogan::losses {
namespace {

void check_probabilities(const torch::Tensor& p, const char* what) {
  if (p.numel() == 0) reject(std::string(what) + " is empty");
  const bool inside = (p > 0).all().item<bool>() && (p < 1).all().item<bool>();
  if (!inside) reject(std::string(what) + " has probabilities outside (0, 1)");
}

void check_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (!a.sizes().equals(b.sizes())) reject(std::string(what) + ": shape mismatch");
}

AdversarialTerms assemble(const torch::Tensor& log_real, const torch::Tensor& log_one_minus_fake,
                          const torch::Tensor& log_fake, AdversarialMode mode) {
  AdversarialTerms t;
  t.discriminator = -(log_real.mean() + log_one_minus_fake.mean());
  t.generator = mode == AdversarialMode::Literal ? log_one_minus_fake.mean() : -log_fake.mean();
  return t;
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {lambda_C, lambda_A, lambda_R, lambda_P, lambda_L2}) {
    if (!(v >= 0.0) || !std::isfinite(v)) reject("loss coefficients must be finite and non-negative");
  }
  if (!(margin > 0.0) || !std::isfinite(margin)) reject("contrastive margin must be positive");
}

nlohmann::json to_json(const LossWeights& w) {
  return {{"lambda_C", w.lambda_C}, {"lambda_A", w.lambda_A},   {"lambda_R", w.lambda_R},
          {"lambda_P", w.lambda_P}, {"lambda_L2", w.lambda_L2}, {"margin", w.margin}};
}

LossWeights loss_weights_from_json(const nlohmann::json& doc, LossWeights w) {
  w.lambda_C = doc.value("lambda_C", w.lambda_C);
  w.lambda_A = doc.value("lambda_A", w.lambda_A);
  w.lambda_R = doc.value("lambda_R", w.lambda_R);
  w.lambda_P = doc.value("lambda_P", w.lambda_P);
  w.lambda_L2 = doc.value("lambda_L2", w.lambda_L2);
  w.margin = doc.value("margin", w.margin);
  w.validate();
  return w;
}

std::string to_string(AdversarialMode mode) {
  return mode == AdversarialMode::Literal ? "literal" : "non_saturating";
}

AdversarialMode adversarial_mode_from_string(std::string_view s) {
  if (s == "literal") return AdversarialMode::Literal;
  if (s == "non_saturating") return AdversarialMode::NonSaturating;
  reject("unknown adversarial mode: " + std::string(s));
}

torch::Tensor embedding_distance(const torch::Tensor& z1, const torch::Tensor& z2) {
  check_same_shape(z1, z2, "embedding_distance");
  if (z1.dim() != 1 && z1.dim() != 2) reject("embedding_distance expects vectors or B×d batches");
  return (z1 - z2).pow(2).sum(-1).sqrt();
}

torch::Tensor contrastive_loss(const torch::Tensor& z_vis, const torch::Tensor& z_nir, const torch::Tensor& labels,
                               double margin) {
  check_same_shape(z_vis, z_nir, "contrastive_loss");
  if (z_vis.dim() != 2 || z_vis.size(0) == 0) reject("contrastive_loss needs a non-empty B×d batch");
  if (labels.dim() != 1 || labels.size(0) != z_vis.size(0)) reject("contrastive_loss: one label per pair");

  const auto y = labels.to(z_vis.dtype());
  const auto d2 = (z_vis - z_nir).pow(2).sum(1);
  // The genuine term uses D² directly; sqrt only enters the hinge, guarded at 0.
  const auto d = d2.clamp_min(1e-24).sqrt();
  const auto genuine = 0.5 * d2;
  const auto imposter = 0.5 * torch::clamp_min(margin - d, 0.0).pow(2);
  return ((1.0 - y) * genuine + y * imposter).mean();
}

AdversarialTerms adversarial_loss_terms(const torch::Tensor& d_real, const torch::Tensor& d_fake,
                                        AdversarialMode mode) {
  check_probabilities(d_real, "d_real");
  check_probabilities(d_fake, "d_fake");
  return assemble(torch::log(d_real), torch::log1p(-d_fake), torch::log(d_fake), mode);
}

AdversarialTerms adversarial_loss_terms_from_logits(const torch::Tensor& real_logits,
                                                    const torch::Tensor& fake_logits, AdversarialMode mode) {
  if (real_logits.numel() == 0 || fake_logits.numel() == 0) reject("adversarial loss on empty batch");
  return assemble(torch::log_sigmoid(real_logits), torch::log_sigmoid(-fake_logits), torch::log_sigmoid(fake_logits),
                  mode);
}

torch::Tensor generator_adversarial_from_logits(const torch::Tensor& fake_logits, AdversarialMode mode) {
  if (fake_logits.numel() == 0) reject("adversarial loss on empty batch");
  return mode == AdversarialMode::Literal ? torch::log_sigmoid(-fake_logits).mean()
                                          : -torch::log_sigmoid(fake_logits).mean();
}

AdversarialTerms couple(const AdversarialTerms& vis, const AdversarialTerms& nir) {
  return {0.5 * (vis.discriminator + nir.discriminator), 0.5 * (vis.generator + nir.generator)};
}

torch::Tensor reconstruction_loss(const torch::Tensor& x, const torch::Tensor& gx) {
  check_same_shape(x, gx, "reconstruction_loss");
  if (x.numel() == 0) reject("reconstruction_loss on empty tensor");
  return (x - gx).pow(2).mean();
}

torch::Tensor perceptual_loss(const torch::Tensor& x, const torch::Tensor& gx, const FeatureMap& phi) {
  check_same_shape(x, gx, "perceptual_loss");
  if (x.numel() == 0) reject("perceptual_loss on empty tensor");
  return (phi(x) - phi(gx)).pow(2).mean();
}

torch::Tensor squared_parameter_norm(const std::vector<torch::Tensor>& parameters) {
  if (parameters.empty()) return torch::zeros({});
  auto total = torch::zeros({}, parameters.front().options());
  for (const auto& p : parameters) total = total + p.pow(2).sum();
  return total;
}

LossBreakdown total_objective(const LossComponents& c, const LossWeights& w) {
  const std::pair<const char*, double> parts[] = {
      {"contrastive", c.contrastive},       {"adversarial_D", c.adversarial_D}, {"adversarial_G", c.adversarial_G},
      {"reconstruction", c.reconstruction}, {"perceptual", c.perceptual},       {"weight_decay", c.weight_decay}};
  for (const auto& [name, value] : parts) {
    if (!std::isfinite(value)) fail(std::string("non-finite loss component: ") + name);
  }
  LossBreakdown b{c.contrastive, c.adversarial_D, c.adversarial_G, c.reconstruction, c.perceptual, c.weight_decay, 0.0};
  b.total = recombine(b, w);
  return b;
}

double recombine(const LossBreakdown& b, const LossWeights& w) {
  return w.lambda_C * b.contrastive + w.lambda_A * b.adversarial_G + w.lambda_R * b.reconstruction +
         w.lambda_P * b.perceptual + w.lambda_L2 * b.weight_decay;
}

nlohmann::json to_json(const LossBreakdown& b) {
  return {{"contrastive", b.contrastive},
          {"adversarial_D", b.adversarial_D},
          {"adversarial_G", b.adversarial_G},
          {"reconstruction", b.reconstruction},
          {"perceptual", b.perceptual},
          {"weight_decay", b.weight_decay},
          {"total", b.total}};
}

LossBreakdown loss_breakdown_from_json(const nlohmann::json& doc) {
  return {doc.at("contrastive").get<double>(),    doc.at("adversarial_D").get<double>(),
          doc.at("adversarial_G").get<double>(),  doc.at("reconstruction").get<double>(),
          doc.at("perceptual").get<double>(),     doc.at("weight_decay").get<double>(),
          doc.at("total").get<double>()};
}

}  // namespace cogan::losses

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

namespace cogan::losses {

/// Coefficients of the multi-task objective plus the contrastive margin.
struct LossWeights {
  double lambda_C = 1.0;
  double lambda_A = 1.0;
  double lambda_R = 1.0;
  double lambda_P = 1.0;
  double lambda_L2 = 1e-4;
  double margin = 1.0;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

nlohmann::json to_json(const LossWeights& w);
LossWeights loss_weights_from_json(const nlohmann::json& doc, LossWeights defaults = {});

enum class AdversarialMode { Literal, NonSaturating };
std::string to_string(AdversarialMode mode);
AdversarialMode adversarial_mode_from_string(std::string_view s);

/// Euclidean distance. 1-D inputs give a scalar; B×d inputs give B distances.
torch::Tensor embedding_distance(const torch::Tensor& z1, const torch::Tensor& z2);

/// Batch mean of ½D² (label 0, genuine) and ½max(0, m − D)² (label 1, imposter).
torch::Tensor contrastive_loss(const torch::Tensor& z_vis, const torch::Tensor& z_nir, const torch::Tensor& labels,
                               double margin);

struct AdversarialTerms {
  torch::Tensor discriminator;  // −mean[log D(real) + log(1 − D(fake))]
  torch::Tensor generator;      // literal: mean[log(1 − D(fake))]; non-saturating: −mean[log D(fake)]
};

/// From probabilities; every entry must lie strictly inside (0, 1).
AdversarialTerms adversarial_loss_terms(const torch::Tensor& d_real, const torch::Tensor& d_fake,
                                        AdversarialMode mode);

/// Same quantities from discriminator logits via log-sigmoid, which stays
/// finite where float probabilities would round to 0 or 1.
AdversarialTerms adversarial_loss_terms_from_logits(const torch::Tensor& real_logits,
                                                    const torch::Tensor& fake_logits, AdversarialMode mode);

/// Generator term alone, from fake-sample logits.
torch::Tensor generator_adversarial_from_logits(const torch::Tensor& fake_logits, AdversarialMode mode);

/// Coupled total over the VIS and NIR cGANs: the average of the branch terms.
AdversarialTerms couple(const AdversarialTerms& vis, const AdversarialTerms& nir);

/// Mean over all elements of (x − G(x))².
torch::Tensor reconstruction_loss(const torch::Tensor& x, const torch::Tensor& gx);

using FeatureMap = std::function<torch::Tensor(const torch::Tensor&)>;

/// Mean over batch and C_k×H_k×W_k of (φ(x) − φ(G(x)))².
torch::Tensor perceptual_loss(const torch::Tensor& x, const torch::Tensor& gx, const FeatureMap& phi);

/// Σ‖p‖² over the given tensors.
torch::Tensor squared_parameter_norm(const std::vector<torch::Tensor>& parameters);

/// Unweighted component values of one objective evaluation.
struct LossComponents {
  double contrastive = 0.0;
  double adversarial_D = 0.0;
  double adversarial_G = 0.0;
  double reconstruction = 0.0;
  double perceptual = 0.0;
  double weight_decay = 0.0;
};

/// Components echoed with the weighted generator-side total
/// λ_C·C + λ_A·A_G + λ_R·R + λ_P·P + λ_L2·L2.
struct LossBreakdown {
  double contrastive = 0.0;
  double adversarial_D = 0.0;
  double adversarial_G = 0.0;
  double reconstruction = 0.0;
  double perceptual = 0.0;
  double weight_decay = 0.0;
  double total = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

/// Throws Error naming the first non-finite component.
LossBreakdown total_objective(const LossComponents& components, const LossWeights& weights);

/// Recomputes the weighted total from a breakdown's components.
double recombine(const LossBreakdown& breakdown, const LossWeights& weights);

nlohmann::json to_json(const LossBreakdown& b);
LossBreakdown loss_breakdown_from_json(const nlohmann::json& doc);

}  // namespace cogan::losses

#pragma once

#include <random>
#include <vector>

#include <torch/torch.h>

#include "cogan/data/manifest.hpp"
#include "cogan/data/preprocess.hpp"

namespace cogan::data {

/// Manifest record indices of one cross-spectral pair.
struct PairId {
  std::size_t vis = 0;
  std::size_t nir = 0;
  bool operator==(const PairId&) const = default;
};

/// Label convention: 0 = genuine (same class), 1 = imposter.
struct PairDraw {
  std::vector<PairId> pairs;
  std::vector<int> labels;
};

struct PairBatch {
  torch::Tensor vis;     // B×C×H×W
  torch::Tensor nir;     // B×C×H×W
  torch::Tensor labels;  // B, float {0, 1}
  std::vector<PairId> pair_ids;
};

/// Draws training pairs from one split. Genuine pairs are uniform over all
/// within-class (VIS, NIR) combinations, imposters uniform over all
/// cross-class combinations.
class PairSampler {
 public:
  explicit PairSampler(const DatasetManifest& manifest, Split split = Split::Train);

  PairDraw draw(int batch_pairs, double genuine_prob, std::mt19937_64& rng) const;
  std::size_t num_classes() const { return class_vis_.size(); }
  /// Within-class cross-spectral combinations, Σ n_vis·n_nir.
  std::size_t genuine_combinations() const;

 private:
  const DatasetManifest& manifest_;
  std::vector<std::vector<std::size_t>> class_vis_;
  std::vector<std::vector<std::size_t>> class_nir_;
  std::vector<std::size_t> all_vis_;
  std::vector<std::size_t> all_nir_;
  std::vector<double> genuine_weights_;
};

/// Draws `batch_pairs` pairs and materialises them through `store`; with
/// `augment`, each image gets an independent random crop.
PairBatch sample_pair_batch(const PairSampler& sampler, ImageStore& store, int batch_pairs, double genuine_prob,
                            std::mt19937_64& rng, bool augment = false);

}  // namespace cogan::data

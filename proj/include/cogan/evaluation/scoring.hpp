#pragma once

#include <map>

#include <torch/torch.h>

#include "cogan/data/manifest.hpp"
#include "cogan/data/profile.hpp"
#include "cogan/evaluation/pairs.hpp"
#include "cogan/evaluation/roc.hpp"
#include "cogan/models/checkpoint.hpp"

namespace cogan::evaluation {

/// Inference-mode embeddings keyed by manifest record index. Each record is
/// preprocessed and embedded once; VIS records go through the VIS encoder,
/// NIR records through the NIR encoder.
class EmbeddingCache {
 public:
  EmbeddingCache(models::EncoderPair& encoders, const data::DatasetManifest& manifest, data::ScaleProfile profile,
                 int batch_size);

  /// Embeds any of `records` not yet cached.
  void fill(const std::vector<std::size_t>& records);
  const torch::Tensor& at(std::size_t record) const;
  std::size_t size() const { return embeddings_.size(); }

 private:
  models::EncoderPair& encoders_;
  const data::DatasetManifest& manifest_;
  data::ScaleProfile profile_;
  int batch_size_;
  std::map<std::size_t, torch::Tensor> embeddings_;  // 1-D float64
};

/// Distances for every genuine and imposter pair, genuine first. Files for
/// every referenced record must exist; otherwise the error names the
/// missing images and how many pairs they affect.
ScoreSet score_pairs(models::EncoderPair& encoders, const PairList& pairs, const data::DatasetManifest& manifest,
                     const data::ScaleProfile& profile, int batch_size);

/// Reference path: embeds both images of each pair on the spot, one at a time.
ScoreSet score_pairs_direct(models::EncoderPair& encoders, const PairList& pairs,
                            const data::DatasetManifest& manifest, const data::ScaleProfile& profile);

/// Enumerate TEST pairs, score them and compute metrics in one call.
VerificationReport evaluate(models::EncoderPair& encoders, const data::DatasetManifest& manifest,
                            const data::ScaleProfile& profile, int batch_size, ScoreSet* scores_out = nullptr);

}  // namespace cogan::evaluation

#pragma once

#include <random>
#include <unordered_map>

#include <torch/torch.h>

#include "cogan/data/manifest.hpp"
#include "cogan/data/profile.hpp"

namespace cogan::data {

/// (x - mean_c) / std_c per channel of a C×H×W tensor.
torch::Tensor standardize(const torch::Tensor& image, const ChannelStats& stats);

/// Loads, resizes to the profile side and standardizes with the manifest's
/// TRAIN statistics. The stats must have been computed for the same profile.
torch::Tensor preprocess_image(const ImageRecord& record, const DatasetManifest& manifest,
                               const ScaleProfile& profile);

/// Crop of the zero-padded canvas with its top-left corner at (dx, dy);
/// dx = dy = pad/2 returns the input unchanged.
torch::Tensor crop_padded(const torch::Tensor& image, int dx, int dy, const ScaleProfile& profile);

/// Random translation by zero-pad-and-crop. Offsets are drawn uniformly in
/// [0, pad] from `rng`.
torch::Tensor augment_image(const torch::Tensor& image, std::mt19937_64& rng, const ScaleProfile& profile);

/// Lazily preprocessed images keyed by manifest record index.
class ImageStore {
 public:
  ImageStore(const DatasetManifest& manifest, ScaleProfile profile, bool cache = true);

  torch::Tensor get(std::size_t record);
  const DatasetManifest& manifest() const { return manifest_; }
  const ScaleProfile& profile() const { return profile_; }

 private:
  const DatasetManifest& manifest_;
  ScaleProfile profile_;
  bool cache_;
  std::unordered_map<std::size_t, torch::Tensor> tensors_;
};

}  // namespace cogan::data

#include "cogan/data/preprocess.hpp"

#include "cogan/data/image_io.hpp"
#include "cogan/error.hpp"

namespace cogan::data {

torch::Tensor standardize(const torch::Tensor& image, const ChannelStats& stats) {
  if (image.dim() != 3 || image.size(0) != stats.channels) {
    reject("standardize: image channels do not match statistics");
  }
  auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  auto mean = torch::tensor(stats.mean, opts).view({-1, 1, 1});
  auto sd = torch::tensor(stats.stddev, opts).view({-1, 1, 1});
  return ((image.to(torch::kFloat64) - mean) / sd).to(image.scalar_type());
}

torch::Tensor preprocess_image(const ImageRecord& record, const DatasetManifest& manifest,
                               const ScaleProfile& profile) {
  if (!manifest.channel_stats) reject("manifest has no channel statistics; TRAIN split empty?");
  const auto& stats = *manifest.channel_stats;
  if (stats.profile != profile.name) {
    reject("channel statistics were computed for profile '" + stats.profile + "', not '" + profile.name + "'");
  }
  return standardize(load_image(manifest.resolve(record), profile.side, stats.channels), stats);
}

torch::Tensor crop_padded(const torch::Tensor& image, int dx, int dy, const ScaleProfile& profile) {
  const int side = profile.side;
  if (image.dim() != 3 || image.size(1) != side || image.size(2) != side) {
    reject("augment: image is not profile-sized");
  }
  const int pad = profile.pad();
  if (dx < 0 || dy < 0 || dx > pad || dy > pad) reject("augment: crop offset outside padded canvas");
  const int before = pad / 2;
  auto canvas = torch::zeros({image.size(0), profile.padded_side, profile.padded_side}, image.options());
  canvas.narrow(1, before, side).narrow(2, before, side).copy_(image);
  return canvas.narrow(1, dy, side).narrow(2, dx, side).contiguous();
}

torch::Tensor augment_image(const torch::Tensor& image, std::mt19937_64& rng, const ScaleProfile& profile) {
  std::uniform_int_distribution<int> offset(0, profile.pad());
  const int dx = offset(rng);
  const int dy = offset(rng);
  return crop_padded(image, dx, dy, profile);
}

ImageStore::ImageStore(const DatasetManifest& manifest, ScaleProfile profile, bool cache)
    : manifest_(manifest), profile_(std::move(profile)), cache_(cache) {}

torch::Tensor ImageStore::get(std::size_t record) {
  if (record >= manifest_.records.size()) reject("record index out of range");
  if (cache_) {
    if (auto it = tensors_.find(record); it != tensors_.end()) return it->second;
  }
  auto t = preprocess_image(manifest_.records[record], manifest_, profile_);
  if (cache_) tensors_.emplace(record, t);
  return t;
}

}  // namespace cogan::data

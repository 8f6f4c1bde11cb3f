#pragma once

#include <filesystem>

#include <torch/torch.h>

namespace cogan::data {

/// Decodes an image file into a float C×side×side tensor in [0, 1].
/// Resizing is bilinear. Single-channel inputs are replicated to `channels`;
/// colour inputs are returned in RGB order.
torch::Tensor load_image(const std::filesystem::path& path, int side, int channels);

/// Encodes a C×H×W tensor with values in [0, 1] as an 8-bit PNG (C ∈ {1, 3}).
void write_png(const std::filesystem::path& path, const torch::Tensor& image);

}  // namespace cogan::data

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>
#include <torch/torch.h>

#include "cogan/models/bundle.hpp"

namespace cogan::models {

/// Named-tensor blob: "COGANBLB", u32 version, u32 count, then per tensor
/// u32 name length, name, u8 dtype, u32 rank, i64 dims, u64 byte count and
/// the raw little-endian data. Parameters and buffers are both stored.
/// Returns the SHA-256 of the written file.
std::string save_module_blob(const torch::nn::Module& module, const std::filesystem::path& file);

/// Copies every named parameter and buffer of `module` from the blob; a
/// missing name or a shape mismatch throws.
void load_module_blob(torch::nn::Module& module, const std::filesystem::path& file);

/// Blob names inside a checkpoint directory.
inline constexpr const char* kEncoderVis = "encoder_vis";
inline constexpr const char* kEncoderNir = "encoder_nir";
inline constexpr const char* kDecoderVis = "decoder_vis";
inline constexpr const char* kDecoderNir = "decoder_nir";
inline constexpr const char* kDiscriminatorVis = "discriminator_vis";
inline constexpr const char* kDiscriminatorNir = "discriminator_nir";
inline constexpr const char* kPerceptual = "perceptual";

/// Checkpoint directory: `config.json` (model config + `extra`),
/// `index.json` (epoch and blob hashes) and one `<name>.bin` per network.
/// The directory is assembled under a temporary name and renamed into place,
/// so an interrupted write leaves any previous checkpoint intact.
void save_checkpoint(const ModelBundle& bundle, const std::filesystem::path& dir, int epoch,
                     const nlohmann::json& extra = nlohmann::json::object());

ModelBundle load_checkpoint(const std::filesystem::path& dir);

/// Both encoders plus the config they were built with.
struct EncoderPair {
  ModelConfig config;
  ResNetEncoder vis{nullptr};
  ResNetEncoder nir{nullptr};
};

/// Works on full and encoder-only checkpoints alike.
EncoderPair load_encoders(const std::filesystem::path& dir);

/// Writes a checkpoint holding only config and encoder blobs.
void strip_to_encoders(const std::filesystem::path& src, const std::filesystem::path& dst);

/// Reads `index.json` and verifies each listed blob against its hash.
nlohmann::json read_checkpoint_index(const std::filesystem::path& dir);

}  // namespace cogan::models

#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>
#include <torch/torch.h>

#include "cogan/data/manifest.hpp"

namespace cogan::data {

/// Global renderings that turn one identity pattern into a VIS or NIR image.
struct DomainTransforms {
  double vis_gamma = 0.8;
  double nir_gamma = 1.4;
  double nir_blur_sigma = 0.8;   // pixels at 64×64, scaled with image size
  double vis_noise = 0.02;
  double nir_noise = 0.04;
  double shift_fraction = 0.02;  // max translation as a fraction of the side
  double rotation_deg = 3.0;
  double illumination = 0.05;    // max relative gain change
  double ramp = 0.03;            // max amplitude of a linear shading ramp
  double vis_tint = 0.0;         // per-class colour cast: channel gains in [1 - vis_tint, 1]

  bool operator==(const DomainTransforms&) const = default;
};

struct SyntheticSpec {
  int num_classes = 0;
  int samples_per_class = 0;  // per spectrum
  int image_size = 64;
  std::uint64_t seed = 0;
  DomainTransforms transforms;

  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

struct SyntheticOptions {
  SplitRule split;
  bool overwrite = false;
  BuildOptions build;
};

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);

/// Classes map to subjects in pairs: class 2k is `s<k>/left`, 2k+1 is
/// `s<k>/right`. Sample index i of class c is rendered with jitter drawn
/// from (seed, c, spectrum, i) alone, so the output is a pure function of
/// the spec.
std::string subject_name(int class_index);
std::string eye_name(int class_index);

/// Undistorted identity pattern of one class in [0, 1], 1×S×S.
torch::Tensor render_identity(const SyntheticSpec& spec, int class_index);

/// One rendered sample: 3×S×S for VIS, 1×S×S for NIR, values in [0, 1].
torch::Tensor render_sample(const SyntheticSpec& spec, int class_index, Spectrum spectrum, int sample_index);

/// Writes `out/<subject>/<eye>/{vis,nir}/<index>.png`, `out/synthetic.json`
/// and `out/manifest.json`; returns the manifest.
DatasetManifest generate_synthetic_dataset(const SyntheticSpec& spec, const std::filesystem::path& out,
                                           const SyntheticOptions& options);

}  // namespace cogan::data

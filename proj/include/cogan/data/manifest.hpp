#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/profile.hpp"

namespace cogan::data {

enum class Spectrum : std::uint8_t { Vis, Nir };
enum class Split : std::uint8_t { Train, Test };

std::string to_string(Spectrum s);
std::string to_string(Split s);
Spectrum spectrum_from_string(std::string_view s);
Split split_from_string(std::string_view s);

/// One image of the experiment universe. `class_id` is `<subject>_<eye>`,
/// so left and right eyes of one subject are distinct identities.
struct ImageRecord {
  std::filesystem::path path;  // relative to the manifest root
  std::string subject;
  std::string eye;
  std::string class_id;
  Spectrum spectrum = Spectrum::Vis;
  int sample_index = 0;
  Split split = Split::Train;

  bool operator==(const ImageRecord&) const = default;
};

/// Per-channel statistics of TRAIN pixels, measured after resizing to
/// `profile` but before standardization. Values are in [0, 1] pixel units.
struct ChannelStats {
  std::string profile;
  int channels = 0;
  std::vector<double> mean;
  std::vector<double> stddev;
  /// Some channel had (near) zero spread; its stddev was clamped to kMinStd.
  bool degenerate = false;

  static constexpr double kMinStd = 1e-6;
  bool operator==(const ChannelStats&) const = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ImageRecord> records;
  std::optional<ChannelStats> channel_stats;

  std::filesystem::path resolve(const ImageRecord& r) const { return root / r.path; }

  /// Sorted, unique class ids of one split.
  std::vector<std::string> classes(Split split) const;
  std::vector<std::size_t> indices(Split split) const;
  std::vector<std::size_t> indices(Split split, Spectrum spectrum) const;

  /// Throws ValidationError on the first violated invariant.
  void validate() const;

  bool operator==(const DatasetManifest&) const = default;
};

/// Subjects are taken in lexicographic order; the first `train_subjects`
/// go to TRAIN. `extra_train_eye` additionally moves that eye of the next
/// subject to TRAIN, which reproduces half-subject splits such as 104.5/104.5.
struct SplitRule {
  std::size_t train_subjects = 0;
  std::optional<std::string> extra_train_eye;
};

struct BuildOptions {
  ScaleProfile profile = ScaleProfile::desk();
  int channels = 3;
  bool compute_stats = true;
};

/// Scans `root/<subject>/<eye>/<spectrum>/<index>.png`.
DatasetManifest build_manifest(const std::filesystem::path& root, const SplitRule& rule,
                               const BuildOptions& options = {});

/// Reassigns splits by class list, e.g. for a cross-validation fold; stats are
/// dropped because they no longer describe the TRAIN split.
DatasetManifest with_train_classes(const DatasetManifest& manifest,
                                   const std::vector<std::string>& train_classes,
                                   const std::vector<std::string>& test_classes);

ChannelStats compute_channel_stats(const DatasetManifest& manifest, const ScaleProfile& profile,
                                   int channels = 3);

nlohmann::json to_json(const DatasetManifest& manifest);
/// `root` replaces the serialized location; paths stay relative to it.
DatasetManifest manifest_from_json(const nlohmann::json& doc, const std::filesystem::path& root);

/// The manifest file lives at the dataset root; its directory is the root on load.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);
DatasetManifest load_manifest(const std::filesystem::path& file);

nlohmann::json to_json(const ChannelStats& stats);
ChannelStats channel_stats_from_json(const nlohmann::json& doc);

}  // namespace cogan::data

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/manifest.hpp"
#include "cogan/training/cells.hpp"
#include "cogan/training/config.hpp"

namespace cogan::training {

/// Class-disjoint folds over `classes`: the sorted list is shuffled with
/// `seed` and dealt round-robin. Throws when there are fewer classes than folds.
std::vector<std::vector<std::string>> make_class_folds(std::vector<std::string> classes, int folds,
                                                       std::uint64_t seed);

struct CvPointResult {
  GridPoint point;
  std::vector<double> fold_auc;
  double mean_auc = 0.0;
  /// Sample standard deviation (n-1); 0 for a single fold.
  double std_auc = 0.0;
};

struct CvReport {
  int folds = 0;
  std::vector<std::vector<std::string>> fold_classes;
  std::vector<CvPointResult> points;
  /// Index into `points`; ties keep the earlier grid point.
  std::size_t selected = 0;
};

nlohmann::json to_json(const CvReport& report);

/// For every grid point and fold: train on the other folds' TRAIN classes,
/// score the held-out fold with the evaluation protocol. Cells run under
/// `<out_dir>/cv/`; the report goes to `<out_dir>/cv_report.json`.
CvReport run_cross_validation(const TrainConfig& base, const data::DatasetManifest& manifest, int folds,
                              const std::vector<GridPoint>& grid, CellExecutor& executor,
                              const std::filesystem::path& out_dir);

/// Builds fold `k`'s manifest: held-out classes as TEST, the rest as TRAIN,
/// with channel statistics recomputed on the fold's TRAIN images.
data::DatasetManifest fold_manifest(const data::DatasetManifest& manifest,
                                    const std::vector<std::vector<std::string>>& folds, std::size_t k,
                                    const data::ScaleProfile& profile, int channels);

}  // namespace cogan::training

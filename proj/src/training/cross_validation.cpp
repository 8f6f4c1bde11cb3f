#include "cogan/training/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogan/error.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::training {

std::vector<std::vector<std::string>> make_class_folds(std::vector<std::string> classes, int folds,
                                                       std::uint64_t seed) {
  if (folds < 2) reject("cross-validation needs at least 2 folds");
  if (classes.size() < static_cast<std::size_t>(folds)) {
    reject("TRAIN split has " + std::to_string(classes.size()) + " classes, fewer than " + std::to_string(folds) +
           " folds");
  }
  std::sort(classes.begin(), classes.end());
  std::mt19937_64 rng(seed);
  std::shuffle(classes.begin(), classes.end(), rng);
  std::vector<std::vector<std::string>> out(folds);
  for (std::size_t i = 0; i < classes.size(); ++i) out[i % folds].push_back(classes[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

data::DatasetManifest fold_manifest(const data::DatasetManifest& manifest,
                                    const std::vector<std::vector<std::string>>& folds, std::size_t k,
                                    const data::ScaleProfile& profile, int channels) {
  std::vector<std::string> train;
  for (std::size_t j = 0; j < folds.size(); ++j) {
    if (j != k) train.insert(train.end(), folds[j].begin(), folds[j].end());
  }
  auto m = data::with_train_classes(manifest, train, folds[k]);
  m.channel_stats = data::compute_channel_stats(m, profile, channels);
  return m;
}

nlohmann::json to_json(const CvReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) {
    points.push_back({{"key", p.point.key},
                      {"overrides", p.point.overrides},
                      {"fold_auc", p.fold_auc},
                      {"mean_auc", p.mean_auc},
                      {"std_auc", p.std_auc}});
  }
  return {{"schema", "cogan.cv_report/1"},
          {"folds", report.folds},
          {"fold_classes", report.fold_classes},
          {"points", points},
          {"selected", report.points.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.selected)},
          {"selected_key", report.points.empty() ? nlohmann::json(nullptr)
                                                 : nlohmann::json(report.points[report.selected].point.key)},
          {"selected_overrides", report.points.empty() ? nlohmann::json(nullptr)
                                                       : report.points[report.selected].point.overrides}};
}

CvReport run_cross_validation(const TrainConfig& base, const data::DatasetManifest& manifest, int folds,
                              const std::vector<GridPoint>& grid, CellExecutor& executor,
                              const fs::path& out_dir) {
  if (grid.empty()) reject("cross-validation grid is empty");
  CvReport report;
  report.folds = folds;
  report.fold_classes = make_class_folds(manifest.classes(data::Split::Train), folds, base.seed);

  std::vector<data::DatasetManifest> manifests;
  manifests.reserve(folds);
  for (int k = 0; k < folds; ++k) {
    manifests.push_back(fold_manifest(manifest, report.fold_classes, k, base.profile, base.model.channels));
  }

  std::vector<CellJob> jobs;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto config = apply_grid_point(base, grid[g]);
    for (int k = 0; k < folds; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "p%02zu_f%d", g, k);
      jobs.push_back({grid[g].key + "/fold" + std::to_string(k), config, &manifests[k], out_dir / "cv" / name});
    }
  }
  const auto outcomes = executor.run(jobs);
  if (outcomes.size() != jobs.size()) fail("executor returned the wrong number of outcomes");

  for (std::size_t g = 0; g < grid.size(); ++g) {
    CvPointResult r{grid[g], {}, 0.0, 0.0};
    for (int k = 0; k < folds; ++k) r.fold_auc.push_back(outcomes[g * folds + k].report.auc);
    double sum = 0.0;
    for (double a : r.fold_auc) sum += a;
    r.mean_auc = sum / folds;
    double ss = 0.0;
    for (double a : r.fold_auc) ss += (a - r.mean_auc) * (a - r.mean_auc);
    r.std_auc = folds > 1 ? std::sqrt(ss / (folds - 1)) : 0.0;
    report.points.push_back(std::move(r));
    if (report.points.back().mean_auc > report.points[report.selected].mean_auc) report.selected = g;
  }
  util::write_json(out_dir / "cv_report.json", to_json(report));
  return report;
}

}  // namespace cogan::training

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/manifest.hpp"
#include "cogan/training/cells.hpp"
#include "cogan/training/config.hpp"

namespace cogan::training {

enum class AblationLayout { DimensionByContrastive, LossTerms, Custom };
std::string to_string(AblationLayout layout);

struct AblationPlan {
  AblationLayout layout = AblationLayout::Custom;
  std::vector<GridPoint> cells;
};

/// |z| ∈ {32,64,128,256} × λ_C ∈ {1,2,5,10}, other λ at 1.
AblationPlan table3_plan();
/// (λ_C, λ_A, λ_R, λ_P) rows (1,0,0,0), (5,1,0,0), (5,1,1,0), (5,1,0,1), (5,1,1,1).
AblationPlan table4_plan();
AblationPlan plan_by_name(const std::string& name);

struct AblationCell {
  GridPoint point;
  double auc = 0.0;
  double eer = 0.0;
  double frr_at_far_1pct = 0.0;
  double frr_at_far_10pct = 0.0;
  std::string weight_hash;
};

struct AblationTable {
  AblationLayout layout = AblationLayout::Custom;
  std::vector<AblationCell> cells;
};

nlohmann::json to_json(const AblationTable& table);

/// One train+evaluate per cell under `<out_dir>/cells/`, every cell with the
/// base seed. Writes `<out_dir>/ablation_table.json`.
AblationTable run_ablation_grid(const TrainConfig& base, const data::DatasetManifest& manifest,
                                const AblationPlan& plan, CellExecutor& executor,
                                const std::filesystem::path& out_dir);

}  // namespace cogan::training

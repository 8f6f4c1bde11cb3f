#include "cogan/training/ablation.hpp"

#include <set>

#include "cogan/error.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::training {

std::string to_string(AblationLayout layout) {
  switch (layout) {
    case AblationLayout::DimensionByContrastive: return "embedding_dim_x_lambda_C";
    case AblationLayout::LossTerms: return "loss_terms";
    case AblationLayout::Custom: return "custom";
  }
  return "custom";
}

AblationPlan table3_plan() {
  AblationPlan plan{AblationLayout::DimensionByContrastive, {}};
  for (int z : {32, 64, 128, 256}) {
    for (double c : {1.0, 2.0, 5.0, 10.0}) {
      plan.cells.push_back(make_point({{"model.embedding_dim", z},
                                       {"loss.lambda_C", c},
                                       {"loss.lambda_A", 1.0},
                                       {"loss.lambda_R", 1.0},
                                       {"loss.lambda_P", 1.0}}));
    }
  }
  return plan;
}

AblationPlan table4_plan() {
  AblationPlan plan{AblationLayout::LossTerms, {}};
  const double rows[5][4] = {{1, 0, 0, 0}, {5, 1, 0, 0}, {5, 1, 1, 0}, {5, 1, 0, 1}, {5, 1, 1, 1}};
  for (const auto& r : rows) {
    plan.cells.push_back(make_point(
        {{"loss.lambda_C", r[0]}, {"loss.lambda_A", r[1]}, {"loss.lambda_R", r[2]}, {"loss.lambda_P", r[3]}}));
  }
  return plan;
}

AblationPlan plan_by_name(const std::string& name) {
  if (name == "table3") return table3_plan();
  if (name == "table4") return table4_plan();
  reject("unknown ablation grid '" + name + "' (expected table3 or table4)");
}

nlohmann::json to_json(const AblationTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"key", c.point.key},
                     {"overrides", c.point.overrides},
                     {"auc", c.auc},
                     {"eer", c.eer},
                     {"frr_at_far_1pct", c.frr_at_far_1pct},
                     {"frr_at_far_10pct", c.frr_at_far_10pct},
                     {"weight_hash", c.weight_hash}});
  }
  nlohmann::json doc{{"schema", "cogan.ablation/1"}, {"layout", to_string(table.layout)}, {"cells", cells}};

  if (table.layout == AblationLayout::DimensionByContrastive) {
    std::vector<int> dims;
    std::vector<double> lambdas;
    for (const auto& c : table.cells) {
      const int z = c.point.overrides.at("model.embedding_dim").get<int>();
      const double l = c.point.overrides.at("loss.lambda_C").get<double>();
      if (std::find(dims.begin(), dims.end(), z) == dims.end()) dims.push_back(z);
      if (std::find(lambdas.begin(), lambdas.end(), l) == lambdas.end()) lambdas.push_back(l);
    }
    nlohmann::json grid = nlohmann::json::array();
    for (int z : dims) {
      nlohmann::json row = nlohmann::json::array();
      for (double l : lambdas) {
        nlohmann::json v = nullptr;
        for (const auto& c : table.cells) {
          if (c.point.overrides.at("model.embedding_dim").get<int>() == z &&
              c.point.overrides.at("loss.lambda_C").get<double>() == l) {
            v = c.auc;
          }
        }
        row.push_back(v);
      }
      grid.push_back(row);
    }
    doc["embedding_dim"] = dims;
    doc["lambda_C"] = lambdas;
    doc["auc"] = grid;
  } else if (table.layout == AblationLayout::LossTerms) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : table.cells) {
      rows.push_back({{"lambda_C", c.point.overrides.at("loss.lambda_C")},
                      {"lambda_A", c.point.overrides.at("loss.lambda_A")},
                      {"lambda_R", c.point.overrides.at("loss.lambda_R")},
                      {"lambda_P", c.point.overrides.at("loss.lambda_P")},
                      {"auc", c.auc},
                      {"eer", c.eer}});
    }
    doc["rows"] = rows;
  }
  return doc;
}

AblationTable run_ablation_grid(const TrainConfig& base, const data::DatasetManifest& manifest,
                                const AblationPlan& plan, CellExecutor& executor, const fs::path& out_dir) {
  if (plan.cells.empty()) reject("ablation grid is empty");
  std::set<std::string> seen_keys;
  std::set<std::string> seen_configs;
  std::vector<CellJob> jobs;
  for (std::size_t i = 0; i < plan.cells.size(); ++i) {
    const auto& cell = plan.cells[i];
    const auto config = apply_grid_point(base, cell);
    if (!seen_keys.insert(cell.key).second || !seen_configs.insert(to_json(config).dump()).second) {
      reject("duplicate ablation cell: " + cell.key);
    }
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i);
    jobs.push_back({cell.key, config, &manifest, out_dir / "cells" / (prefix + sanitize_key(cell.key))});
  }
  const auto outcomes = executor.run(jobs);
  if (outcomes.size() != jobs.size()) fail("executor returned the wrong number of outcomes");

  AblationTable table{plan.layout, {}};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = outcomes[i].report;
    table.cells.push_back(
        {plan.cells[i], r.auc, r.eer, r.frr_at_far_1pct, r.frr_at_far_10pct, outcomes[i].weight_hash});
  }
  util::write_json(out_dir / "ablation_table.json", to_json(table));
  return table;
}

}  // namespace cogan::training

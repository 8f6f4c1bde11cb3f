#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cogan/data/manifest.hpp"
#include "cogan/evaluation/roc.hpp"
#include "cogan/training/config.hpp"

namespace cogan::training {

/// One point of a hyperparameter grid: dotted run-config keys and values,
/// e.g. {"model.embedding_dim": 64, "loss.lambda_C": 5.0}.
struct GridPoint {
  std::string key;
  nlohmann::json overrides = nlohmann::json::object();
};

using GridAxis = std::pair<std::string, std::vector<nlohmann::json>>;

/// Cartesian product, first axis varying slowest.
std::vector<GridPoint> make_grid(const std::vector<GridAxis>& axes);
GridPoint make_point(const nlohmann::json& overrides);
TrainConfig apply_grid_point(const TrainConfig& base, const GridPoint& point);

/// One independent train+evaluate run.
struct CellJob {
  std::string key;
  TrainConfig config;
  const data::DatasetManifest* manifest = nullptr;
  std::filesystem::path dir;
};

struct CellOutcome {
  evaluation::VerificationReport report;
  std::string weight_hash;
};

/// Runs cells and returns outcomes in job order, whatever the execution order.
class CellExecutor {
 public:
  virtual ~CellExecutor() = default;
  virtual std::vector<CellOutcome> run(const std::vector<CellJob>& jobs) = 0;
};

/// Sequential, in this process.
class InProcessExecutor : public CellExecutor {
 public:
  explicit InProcessExecutor(bool verbose = false) : verbose_(verbose) {}
  std::vector<CellOutcome> run(const std::vector<CellJob>& jobs) override;

 private:
  bool verbose_;
};

/// Cell directory layout shared by every executor: `config.json`,
/// `manifest.json`, the training run, `eval/report.json` and `outcome.json`.
void prepare_cell_dir(const CellJob& job);
CellOutcome run_prepared_cell(const std::filesystem::path& dir);
CellOutcome read_cell_outcome(const std::filesystem::path& dir);

std::string sanitize_key(const std::string& key);

}  // namespace cogan::training

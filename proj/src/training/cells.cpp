#include "cogan/training/cells.hpp"

#include <cstdio>

#include "cogan/error.hpp"
#include "cogan/evaluation/report.hpp"
#include "cogan/training/trainer.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::training {

std::vector<GridPoint> make_grid(const std::vector<GridAxis>& axes) {
  std::vector<nlohmann::json> partial{nlohmann::json::object()};
  for (const auto& [key, values] : axes) {
    if (values.empty()) reject("grid axis " + key + " has no values");
    std::vector<nlohmann::json> next;
    for (const auto& p : partial) {
      for (const auto& v : values) {
        auto q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    partial = std::move(next);
  }
  std::vector<GridPoint> out;
  for (auto& p : partial) out.push_back(make_point(p));
  return out;
}

GridPoint make_point(const nlohmann::json& overrides) {
  std::string key;
  for (const auto& [k, v] : overrides.items()) {
    if (!key.empty()) key += ",";
    key += k + "=" + v.dump();
  }
  return {key.empty() ? "base" : key, overrides};
}

TrainConfig apply_grid_point(const TrainConfig& base, const GridPoint& point) {
  auto doc = to_json(base);
  for (const auto& [k, v] : point.overrides.items()) util::apply_override(doc, k + "=" + v.dump());
  return train_config_from_json(doc);
}

std::string sanitize_key(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      out.push_back(c);
    } else if (c == '=') {
      out.push_back('-');
    } else {
      out.push_back('_');
    }
  }
  return out;
}

void prepare_cell_dir(const CellJob& job) {
  if (!job.manifest) reject("cell " + job.key + " has no manifest");
  fs::create_directories(job.dir);
  util::write_json(job.dir / "cell.json", {{"key", job.key}, {"config", to_json(job.config)}});
  data::save_manifest(*job.manifest, job.dir / "manifest.json");
}

CellOutcome read_cell_outcome(const fs::path& dir) {
  const auto doc = util::read_json(dir / "outcome.json");
  return {evaluation::load_report(dir / "eval" / "report.json"), doc.at("weight_hash").get<std::string>()};
}

CellOutcome run_prepared_cell(const fs::path& dir) {
  const auto cell = util::read_json(dir / "cell.json");
  const auto config = train_config_from_json(cell.at("config"));
  const auto manifest = data::load_manifest(dir / "manifest.json");
  CellOutcome outcome;
  outcome.report = train_and_evaluate(config, manifest, dir, &outcome.weight_hash);
  util::write_json(dir / "outcome.json", {{"key", cell.at("key")}, {"weight_hash", outcome.weight_hash}});
  return outcome;
}

std::vector<CellOutcome> InProcessExecutor::run(const std::vector<CellJob>& jobs) {
  std::vector<CellOutcome> out;
  out.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    prepare_cell_dir(jobs[i]);
    out.push_back(run_prepared_cell(jobs[i].dir));
    if (verbose_) {
      std::fprintf(stderr, "[%zu/%zu] %s  auc %.4f  eer %.4f\n", i + 1, jobs.size(), jobs[i].key.c_str(),
                   out.back().report.auc, out.back().report.eer);
    }
  }
  return out;
}

}  // namespace cogan::training

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "cogan/error.hpp"
#include "cogan/models/bundle.hpp"
#include "cogan/training/ablation.hpp"
#include "cogan/training/cells.hpp"
#include "cogan/training/cross_validation.hpp"
#include "cogan/training/trainer.hpp"
#include "cogan/util/config.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace cogan;
using namespace cogan::training;

namespace {

/// Returns scripted AUCs per job key without training anything.
class ScriptedExecutor : public CellExecutor {
 public:
  explicit ScriptedExecutor(std::function<double(const CellJob&)> auc) : auc_(std::move(auc)) {}
  std::vector<CellOutcome> run(const std::vector<CellJob>& jobs) override {
    std::vector<CellOutcome> out;
    for (const auto& j : jobs) {
      keys.push_back(j.key);
      CellOutcome o;
      o.report.auc = auc_(j);
      o.weight_hash = "h" + j.key;
      out.push_back(o);
    }
    return out;
  }
  std::vector<std::string> keys;

 private:
  std::function<double(const CellJob&)> auc_;
};

std::vector<nlohmann::json> read_lines(const fs::path& file) {
  std::vector<nlohmann::json> out;
  std::ifstream in(file);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

std::vector<std::string> train_classes(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("c" + std::to_string(100 + i));
  return out;
}

}  // namespace

TEST_CASE("two tiny epochs leave a finite history and a run directory") {
  testing::TempDir tmp("train2");
  const auto m = testing::make_dataset(tmp / "data", 20, 3, 1, 5);
  auto cfg = testing::tiny_config(1);
  TrainOptions opt;
  opt.run_dir = tmp / "run";
  const auto r = train_cogan(cfg, m, opt);
  const auto lines = read_lines(tmp / "run/history.jsonl");
  REQUIRE(lines.size() == 2);
  for (const auto& l : lines) {
    for (const char* k : {"contrastive", "adversarial_D", "adversarial_G", "reconstruction", "perceptual", "total"}) {
      CHECK(std::isfinite(l["loss"][k].get<double>()));
    }
  }
  CHECK(fs::exists(tmp / "run/config.json"));
  CHECK(fs::exists(tmp / "run/checkpoints/last"));
  CHECK(fs::exists(tmp / "run/checkpoints/encoders"));
  CHECK(r.history.size() == 2);
  for (const auto& e : r.history) CHECK(recombine(e.loss, cfg.weights) == doctest::Approx(e.loss.total).epsilon(1e-9));
}

TEST_CASE("training is deterministic for a fixed seed") {
  testing::TempDir tmp("traindet");
  const auto m = testing::make_dataset(tmp / "data", 8, 3, 1, 2);
  const auto cfg = testing::tiny_config(4);
  TrainOptions a, b;
  a.run_dir = tmp / "a";
  b.run_dir = tmp / "b";
  const auto ra = train_cogan(cfg, m, a);
  const auto rb = train_cogan(cfg, m, b);
  CHECK(ra.weight_hash == rb.weight_hash);
  CHECK(testing::file_sha256(tmp / "a/history.jsonl") == testing::file_sha256(tmp / "b/history.jsonl"));
  auto other = cfg;
  other.seed = 5;
  other.model.weight_seed = 5;
  CHECK(train_cogan(other, m).weight_hash != ra.weight_hash);
}

TEST_CASE("optimizer steps never touch the perceptual network") {
  testing::TempDir tmp("frozen");
  const auto m = testing::make_dataset(tmp / "data", 8, 3, 1, 2);
  const auto cfg = testing::tiny_config(2);
  std::string before;
  int steps = 0;
  TrainOptions opt;
  opt.on_step = [&](int, const models::ModelBundle& b) {
    const auto now = models::module_checksum(*b.perceptual);
    if (before.empty()) before = now;
    CHECK(now == before);
    ++steps;
  };
  const auto r = train_cogan(cfg, m, opt);
  CHECK(steps == 4);
  CHECK(models::module_checksum(*r.bundle.perceptual) ==
        models::module_checksum(*models::instantiate_models(cfg.model).perceptual));
}

TEST_CASE("steps per epoch cover the genuine TRAIN combinations") {
  testing::TempDir tmp("steps");
  const auto m = testing::make_dataset(tmp / "data", 8, 3, 1, 2);  // 4 TRAIN classes × 3 × 3
  auto cfg = testing::tiny_config(1);
  cfg.steps_per_epoch = 0;
  cfg.batch_pairs = 10;
  CHECK(resolved_steps_per_epoch(cfg, m) == 4);  // ceil(36 / 10)
  cfg.steps_per_epoch = 7;
  CHECK(resolved_steps_per_epoch(cfg, m) == 7);
}

TEST_CASE("contrastive-only training lowers the contrastive loss") {
  testing::TempDir tmp("converge");
  const auto m = testing::make_dataset(tmp / "data", 20, 6, 2, 5);  // 10 TRAIN classes
  std::vector<double> ratio;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto cfg = TrainConfig::defaults(data::ScaleProfile::desk());
    cfg.seed = seed;
    cfg.model.weight_seed = seed;
    cfg.weights.lambda_A = cfg.weights.lambda_R = cfg.weights.lambda_P = 0.0;
    const auto r = train_cogan(cfg, m);
    REQUIRE(r.history.size() == 30);
    ratio.push_back(r.history.back().loss.contrastive / r.history.front().loss.contrastive);
  }
  std::sort(ratio.begin(), ratio.end());
  CHECK(ratio[1] < 1.0);
}

TEST_CASE("invalid training configs are rejected") {
  auto c = testing::tiny_config(1);
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = testing::tiny_config(1);
  c.batch_pairs = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = testing::tiny_config(1);
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("run documents round-trip and reject unknown keys") {
  auto c = testing::tiny_config(9);
  c.weights.lambda_C = 5.0;
  c.model.embedding_dim = 32;
  CHECK(train_config_from_json(to_json(c)) == c);
  auto doc = default_run_document(data::ScaleProfile::desk());
  CHECK_THROWS_AS(util::apply_override(doc, "loss.lambda_Q=1"), ValidationError);
  util::apply_override(doc, "loss.lambda_C=2.5");
  CHECK(doc["loss"]["lambda_C"] == 2.5);
}

TEST_CASE("class folds") {
  const auto folds = make_class_folds(train_classes(20), 5, 3);
  REQUIRE(folds.size() == 5);
  std::set<std::string> all;
  for (const auto& f : folds) {
    CHECK(f.size() == 4);
    for (const auto& c : f) CHECK(all.insert(c).second);
  }
  CHECK(all.size() == 20);
  CHECK(make_class_folds(train_classes(20), 5, 3) == folds);
  CHECK_THROWS_AS(make_class_folds(train_classes(4), 5, 3), ValidationError);
}

TEST_CASE("fold manifests hold out whole classes") {
  testing::TempDir tmp("foldm");
  const auto m = testing::make_dataset(tmp / "data", 12, 2, 1, 3);  // 6 TRAIN classes
  const auto folds = make_class_folds(m.classes(data::Split::Train), 3, 1);
  const auto f = fold_manifest(m, folds, 1, data::ScaleProfile::desk(), 3);
  const auto test = f.classes(data::Split::Test);
  CHECK(std::set<std::string>(test.begin(), test.end()) == std::set<std::string>(folds[1].begin(), folds[1].end()));
  for (const auto& c : f.classes(data::Split::Train)) CHECK(std::find(folds[1].begin(), folds[1].end(), c) == folds[1].end());
  CHECK(f.classes(data::Split::Train).size() == 4);
}

TEST_CASE("cross-validation bookkeeping") {
  testing::TempDir tmp("cv");
  const auto m = testing::make_dataset(tmp / "data", 20, 2, 1, 10);
  const auto base = testing::tiny_config(1);

  SUBCASE("a dominating point is selected") {
    const auto grid = make_grid({{"loss.lambda_C", {1.0, 5.0}}});
    ScriptedExecutor ex([](const CellJob& j) { return j.config.weights.lambda_C == 5.0 ? 0.9 : 0.6; });
    const auto r = run_cross_validation(base, m, 5, grid, ex, tmp / "out");
    CHECK(r.selected == 1);
    CHECK(ex.keys.size() == 10);
    const auto doc = util::read_json(tmp / "out/cv_report.json");
    CHECK(doc["selected_key"] == grid[1].key);
  }
  SUBCASE("fold AUCs and their mean are reported") {
    int call = 0;
    ScriptedExecutor ex([&](const CellJob&) { return 0.5 + 0.1 * call++; });
    const auto r = run_cross_validation(base, m, 5, {make_point({})}, ex, tmp / "out1");
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.points[0].fold_auc.size() == 5);
    double sum = 0.0;
    for (double a : r.points[0].fold_auc) sum += a;
    CHECK(r.points[0].mean_auc == doctest::Approx(sum / 5.0).epsilon(1e-12));
    CHECK(r.points[0].std_auc == doctest::Approx(std::sqrt(0.025)).epsilon(1e-9));  // sample std of 0.5..0.9
  }
  SUBCASE("too few TRAIN classes") {
    ScriptedExecutor ex([](const CellJob&) { return 0.5; });
    CHECK_THROWS_AS(run_cross_validation(base, m, 21, {make_point({})}, ex, tmp / "out2"), ValidationError);
  }
  SUBCASE("real training on one grid point") {
    InProcessExecutor ex;
    const auto r = run_cross_validation(base, m, 2, {make_point({})}, ex, tmp / "out3");
    CHECK(r.points[0].fold_auc.size() == 2);
    for (double a : r.points[0].fold_auc) CHECK((a >= 0.0 && a <= 1.0));
  }
}

TEST_CASE("ablation plans: 4x4 dimension grid and 5 loss-term rows") {
  const auto t3 = table3_plan();
  CHECK(t3.cells.size() == 16);
  std::set<std::pair<int, double>> axes;
  for (const auto& c : t3.cells) axes.insert({c.overrides["model.embedding_dim"].get<int>(), c.overrides["loss.lambda_C"].get<double>()});
  CHECK(axes.size() == 16);
  for (int z : {32, 64, 128, 256}) {
    for (double l : {1.0, 2.0, 5.0, 10.0}) CHECK(axes.count({z, l}) == 1);
  }

  const auto t4 = table4_plan();
  const std::vector<std::array<double, 4>> rows{{1, 0, 0, 0}, {5, 1, 0, 0}, {5, 1, 1, 0}, {5, 1, 0, 1}, {5, 1, 1, 1}};
  REQUIRE(t4.cells.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto cfg = apply_grid_point(testing::tiny_config(1), t4.cells[i]);
    CHECK(cfg.weights.lambda_C == rows[i][0]);
    CHECK(cfg.weights.lambda_A == rows[i][1]);
    CHECK(cfg.weights.lambda_R == rows[i][2]);
    CHECK(cfg.weights.lambda_P == rows[i][3]);
  }
  CHECK_THROWS_AS(plan_by_name("table9"), ValidationError);
}

TEST_CASE("ablation grid runner") {
  testing::TempDir tmp("ablate");
  const auto m = testing::make_dataset(tmp / "data", 8, 3, 1, 2);
  const auto base = testing::tiny_config(3);

  SUBCASE("table3 fills a 4x4 matrix") {
    ScriptedExecutor ex([](const CellJob& j) { return j.config.model.embedding_dim / 1000.0 + j.config.weights.lambda_C / 100.0; });
    const auto t = run_ablation_grid(base, m, table3_plan(), ex, tmp / "t3");
    CHECK(t.cells.size() == 16);
    const auto doc = util::read_json(tmp / "t3/ablation_table.json");
    REQUIRE(doc["auc"].size() == 4);
    CHECK(doc["auc"][2][3].get<double>() == doctest::Approx(0.128 + 0.10));
  }
  SUBCASE("table4 rows") {
    ScriptedExecutor ex([](const CellJob&) { return 0.7; });
    run_ablation_grid(base, m, table4_plan(), ex, tmp / "t4");
    const auto doc = util::read_json(tmp / "t4/ablation_table.json");
    CHECK(doc["rows"].size() == 5);
  }
  SUBCASE("duplicate cells are rejected") {
    AblationPlan p;
    p.cells = {make_point({{"loss.lambda_C", 2.0}}), make_point({{"loss.lambda_C", 2.0}})};
    ScriptedExecutor ex([](const CellJob&) { return 0.5; });
    CHECK_THROWS_AS(run_ablation_grid(base, m, p, ex, tmp / "dup"), ValidationError);
    p.cells = {make_point({}), make_point({{"loss.lambda_C", 1.0}})};  // same resolved config
    CHECK_THROWS_AS(run_ablation_grid(base, m, p, ex, tmp / "dup2"), ValidationError);
  }
  SUBCASE("a base cell reproduces a standalone run") {
    AblationPlan p;
    p.cells = {make_point({{"loss.lambda_C", 2.0}}), make_point({})};
    InProcessExecutor ex;
    const auto t = run_ablation_grid(base, m, p, ex, tmp / "mix");
    std::string hash;
    const auto alone = train_and_evaluate(base, m, tmp / "alone", &hash);
    CHECK(t.cells[1].auc == alone.auc);
    CHECK(t.cells[1].weight_hash == hash);
  }
}

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cogan/data/manifest.hpp"
#include "cogan/data/synthetic.hpp"
#include "cogan/error.hpp"
#include "cogan/evaluation/report.hpp"
#include "cogan/evaluation/scoring.hpp"
#include "cogan/models/checkpoint.hpp"
#include "cogan/training/ablation.hpp"
#include "cogan/training/cross_validation.hpp"
#include "cogan/training/trainer.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cogan;

namespace {

// ---- run directories -------------------------------------------------------

void mark_incomplete(const fs::path& out) {
  fs::create_directories(out);
  std::ofstream(out / "INCOMPLETE") << "run did not finish\n";
}

void mark_complete(const fs::path& out) { fs::remove(out / "INCOMPLETE"); }

// ---- config resolution -----------------------------------------------------

void flatten(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [k, v] : node.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  out.push_back(prefix + "=" + node.dump());
}

std::string requested_profile(const json& file_doc, const std::vector<std::string>& sets) {
  std::string profile = file_doc.value("profile", std::string("desk"));
  for (const auto& s : sets) {
    if (s.rfind("profile=", 0) == 0) {
      profile = s.substr(8);
      if (profile.size() >= 2 && profile.front() == '"') profile = profile.substr(1, profile.size() - 2);
    }
  }
  return profile;
}

/// Defaults for the requested profile, then the config file, then `--set`.
/// Every key must already exist in the default document.
json resolve_run_document(const std::string& config_path, const std::string& manifest_override,
                          const std::vector<std::string>& sets) {
  json file_doc = json::object();
  if (!config_path.empty()) file_doc = util::read_json(config_path);
  if (!file_doc.is_object()) reject("config file must hold a JSON object");
  auto doc = training::default_run_document(data::ScaleProfile::by_name(requested_profile(file_doc, sets)));
  std::vector<std::string> assignments;
  flatten(file_doc, "", assignments);
  util::apply_overrides(doc, assignments);
  util::apply_overrides(doc, sets);
  if (!manifest_override.empty()) doc["data"]["manifest"] = manifest_override;

  auto& manifest = doc["data"]["manifest"];
  if (!manifest.is_string() || manifest.get<std::string>().empty()) reject("no manifest given (--manifest or data.manifest)");
  fs::path mp = manifest.get<std::string>();
  if (mp.is_relative() && !config_path.empty() && manifest_override.empty()) {
    mp = fs::path(config_path).parent_path() / mp;
  }
  manifest = fs::absolute(mp).lexically_normal().string();
  if (doc["model"]["weight_seed"].is_null()) doc["model"]["weight_seed"] = doc["seed"];
  return doc;
}

struct ResolvedRun {
  json doc;
  training::TrainConfig config;
  data::DatasetManifest manifest;
};

ResolvedRun resolve_run(const std::string& config_path, const std::string& manifest_path,
                        const std::vector<std::string>& sets) {
  ResolvedRun r;
  r.doc = resolve_run_document(config_path, manifest_path, sets);
  r.config = training::train_config_from_json(r.doc);
  r.config.validate();
  r.manifest = data::load_manifest(r.doc["data"]["manifest"].get<std::string>());
  return r;
}

// ---- parallel cells --------------------------------------------------------

/// One `cogan run-cell <dir>` child per cell, at most `workers` at a time.
class ProcessExecutor : public training::CellExecutor {
 public:
  ProcessExecutor(int workers, bool verbose) : workers_(workers), verbose_(verbose) {}

  std::vector<training::CellOutcome> run(const std::vector<training::CellJob>& jobs) override {
    for (const auto& j : jobs) training::prepare_cell_dir(j);
    const auto exe = fs::read_symlink("/proc/self/exe");
    std::map<pid_t, std::size_t> running;
    std::size_t next = 0;
    std::size_t done = 0;
    std::vector<std::string> failed;
    while (done < jobs.size()) {
      while (next < jobs.size() && running.size() < static_cast<std::size_t>(workers_)) {
        const pid_t pid = fork();
        if (pid < 0) fail("fork failed");
        if (pid == 0) {
          const std::string dir = jobs[next].dir.string();
          execl(exe.c_str(), exe.c_str(), "run-cell", dir.c_str(), static_cast<char*>(nullptr));
          _exit(127);
        }
        running[pid] = next++;
      }
      int status = 0;
      const pid_t pid = waitpid(-1, &status, 0);
      if (pid < 0) fail("waitpid failed");
      const auto idx = running.at(pid);
      running.erase(pid);
      ++done;
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failed.push_back(jobs[idx].key);
      if (verbose_) std::fprintf(stderr, "[%zu/%zu] %s finished\n", done, jobs.size(), jobs[idx].key.c_str());
    }
    if (!failed.empty()) fail("cell failed: " + failed.front() + " (" + std::to_string(failed.size()) + " total)");
    std::vector<training::CellOutcome> out;
    for (const auto& j : jobs) out.push_back(training::read_cell_outcome(j.dir));
    return out;
  }

 private:
  int workers_;
  bool verbose_;
};

std::unique_ptr<training::CellExecutor> make_executor(bool verbose) {
  int workers = 1;
  if (const char* env = std::getenv("COGAN_WORKERS")) {
    try {
      workers = std::stoi(env);
    } catch (const std::exception&) {
      reject(std::string("COGAN_WORKERS must be an integer, got '") + env + "'");
    }
    if (workers < 1) reject("COGAN_WORKERS must be >= 1");
  }
  if (workers == 1) return std::make_unique<training::InProcessExecutor>(verbose);
  return std::make_unique<ProcessExecutor>(workers, verbose);
}

// ---- subcommands -----------------------------------------------------------

struct SynthArgs {
  fs::path out;
  std::string spec_file;
  int classes = 0;
  int samples = 0;
  int size = 64;
  std::int64_t seed = -1;
  int train_subjects = -1;
  std::string extra_train_eye;
  std::string profile = "desk";
  bool overwrite = false;
};

int cmd_synth(const SynthArgs& a) {
  data::SyntheticSpec spec;
  if (!a.spec_file.empty()) spec = data::synthetic_spec_from_json(util::read_json(a.spec_file));
  if (a.classes > 0) spec.num_classes = a.classes;
  if (a.samples > 0) spec.samples_per_class = a.samples;
  if (a.spec_file.empty() || a.size != 64) spec.image_size = a.size;
  if (a.seed >= 0) {
    spec.seed = static_cast<std::uint64_t>(a.seed);
  } else if (a.spec_file.empty()) {
    reject("--seed is required");
  }
  spec.validate();

  data::SyntheticOptions opt;
  const int subjects = (spec.num_classes + 1) / 2;
  opt.split.train_subjects = a.train_subjects >= 0 ? a.train_subjects : subjects / 2;
  if (!a.extra_train_eye.empty()) opt.split.extra_train_eye = a.extra_train_eye;
  opt.overwrite = a.overwrite;
  opt.build.profile = data::ScaleProfile::by_name(a.profile);

  const auto m = data::generate_synthetic_dataset(spec, a.out, opt);
  std::printf("%zu images, %zu TRAIN classes, %zu TEST classes -> %s\n", m.records.size(),
              m.classes(data::Split::Train).size(), m.classes(data::Split::Test).size(),
              (a.out / "manifest.json").c_str());
  return 0;
}

struct RunArgs {
  std::string config;
  std::string manifest;
  std::vector<std::string> sets;
  fs::path out;
  bool verbose = false;
  int folds = 0;
  std::vector<std::string> grid;
  std::string grid_name;
};

std::vector<training::GridPoint> parse_grid(const std::vector<std::string>& specs) {
  std::vector<training::GridAxis> axes;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) reject("grid axis must look like key=v1,v2: " + s);
    training::GridAxis axis{s.substr(0, eq), {}};
    std::stringstream ss(s.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto v = json::parse(item, nullptr, false);
      axis.second.push_back(v.is_discarded() ? json(item) : v);
    }
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) return {training::make_point(json::object())};
  return training::make_grid(axes);
}

int cmd_train(const RunArgs& a) {
  auto run = resolve_run(a.config, a.manifest, a.sets);
  mark_incomplete(a.out);
  util::write_json(a.out / "config.json", run.doc);

  if (a.folds > 0) {
    auto executor = make_executor(a.verbose);
    const auto grid = parse_grid(a.grid);
    // Validate every grid point before spending compute.
    for (const auto& p : grid) training::apply_grid_point(run.config, p).validate();
    const auto report = training::run_cross_validation(run.config, run.manifest, a.folds, grid, *executor, a.out);
    for (const auto& p : report.points) {
      std::printf("%-40s mean AUC %.4f  std %.4f\n", p.point.key.c_str(), p.mean_auc, p.std_auc);
    }
    std::printf("selected: %s\n", report.points[report.selected].point.key.c_str());
    mark_complete(a.out);
    return 0;
  }

  training::TrainOptions options;
  options.run_dir = a.out;
  options.config_document = run.doc;
  options.verbose = a.verbose;
  const auto result = training::train_cogan(run.config, run.manifest, options);
  std::printf("trained %d epochs, weight hash %s\n", run.config.epochs, result.weight_hash.c_str());
  if (!run.manifest.indices(data::Split::Test).empty()) {
    auto encoders = models::load_encoders(a.out / "checkpoints" / "encoders");
    evaluation::ScoreSet scores;
    auto report = evaluation::evaluate(encoders, run.manifest, run.config.profile, run.config.eval_batch_size, &scores);
    report.config = run.doc;
    evaluation::emit_report(report, a.out / "eval", &scores);
    std::printf("test AUC %.4f  EER %.4f\n", report.auc, report.eer);
  }
  mark_complete(a.out);
  return 0;
}

struct EvalArgs {
  fs::path checkpoint;
  std::string manifest;
  fs::path out;
  int batch_size = 64;
  bool scores = true;
};

int cmd_evaluate(const EvalArgs& a) {
  auto encoders = models::load_encoders(a.checkpoint);
  const auto manifest = data::load_manifest(a.manifest);
  mark_incomplete(a.out);
  const json doc = {{"command", "evaluate"},
                    {"checkpoint", fs::absolute(a.checkpoint).lexically_normal().string()},
                    {"manifest", fs::absolute(a.manifest).lexically_normal().string()},
                    {"profile", encoders.config.profile.name},
                    {"eval", {{"batch_size", a.batch_size}}},
                    {"model", models::to_json(encoders.config)}};
  util::write_json(a.out / "config.json", doc);
  evaluation::ScoreSet scores;
  auto report = evaluation::evaluate(encoders, manifest, encoders.config.profile, a.batch_size, &scores);
  report.config = doc;
  evaluation::emit_report(report, a.out, a.scores ? &scores : nullptr);
  std::printf("%llu genuine / %llu imposter pairs\nAUC %.4f  EER %.4f  FRR@FAR=1%% %.4f  FRR@FAR=10%% %.4f\n",
              static_cast<unsigned long long>(report.genuine_pairs),
              static_cast<unsigned long long>(report.imposter_pairs), report.auc, report.eer, report.frr_at_far_1pct,
              report.frr_at_far_10pct);
  mark_complete(a.out);
  return 0;
}

int cmd_ablate(const RunArgs& a) {
  auto run = resolve_run(a.config, a.manifest, a.sets);
  const auto plan = training::plan_by_name(a.grid_name);
  for (const auto& p : plan.cells) training::apply_grid_point(run.config, p).validate();
  mark_incomplete(a.out);
  util::write_json(a.out / "config.json", run.doc);
  auto executor = make_executor(a.verbose);
  const auto table = training::run_ablation_grid(run.config, run.manifest, plan, *executor, a.out);
  for (const auto& c : table.cells) std::printf("%-60s AUC %.4f  EER %.4f\n", c.point.key.c_str(), c.auc, c.eer);
  mark_complete(a.out);
  return 0;
}

std::string format_report(const evaluation::VerificationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "pairs: %llu genuine / %llu imposter\nAUC %.4f\nEER %.4f\nFRR@FAR=1%% %.4f\nFRR@FAR=10%% %.4f\n"
                "protocol %s\n",
                static_cast<unsigned long long>(r.genuine_pairs), static_cast<unsigned long long>(r.imposter_pairs),
                r.auc, r.eer, r.frr_at_far_1pct, r.frr_at_far_10pct, r.protocol_hash.c_str());
  return buf;
}

int cmd_report(const fs::path& dir, fs::path out) {
  if (!fs::is_directory(dir)) reject("not a directory: " + dir.string());
  if (out.empty()) out = dir / "summary";
  fs::create_directories(out);
  std::ostringstream text;
  bool found = false;

  if (fs::exists(dir / "INCOMPLETE")) text << "WARNING: run is marked incomplete\n\n";

  for (const auto& candidate : {dir / "report.json", dir / "eval" / "report.json"}) {
    if (!fs::exists(candidate)) continue;
    const auto r = evaluation::load_report(candidate);
    text << "== verification (" << candidate.lexically_relative(dir).string() << ")\n" << format_report(r) << "\n";
    evaluation::render_roc_png(r, out / "roc.png");
    found = true;
    break;
  }
  if (fs::exists(dir / "history.jsonl")) {
    text << "== history\nepoch     total  contrast     adv_G     recon      perc\n";
    std::ifstream in(dir / "history.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto e = json::parse(line);
      const auto& l = e.at("loss");
      char buf[160];
      std::snprintf(buf, sizeof buf, "%5d %9.4f %9.4f %9.4f %9.4f %9.4f\n", e.at("epoch").get<int>(),
                    l.at("total").get<double>(), l.at("contrastive").get<double>(), l.at("adversarial_G").get<double>(),
                    l.at("reconstruction").get<double>(), l.at("perceptual").get<double>());
      text << buf;
    }
    text << "\n";
    found = true;
  }
  if (fs::exists(dir / "ablation_table.json")) {
    const auto t = util::read_json(dir / "ablation_table.json");
    text << "== ablation (" << t.at("layout").get<std::string>() << ")\n";
    if (t.contains("auc")) {
      text << "|z| \\ lambda_C";
      for (const auto& l : t["lambda_C"]) text << "  " << l.dump();
      text << "\n";
      for (std::size_t i = 0; i < t["embedding_dim"].size(); ++i) {
        text << t["embedding_dim"][i].dump();
        for (const auto& v : t["auc"][i]) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "  %.4f", v.is_null() ? 0.0 : v.get<double>());
          text << buf;
        }
        text << "\n";
      }
    } else {
      for (const auto& c : t.at("cells")) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-60s AUC %.4f  EER %.4f\n", c.at("key").get<std::string>().c_str(),
                      c.at("auc").get<double>(), c.at("eer").get<double>());
        text << buf;
      }
    }
    text << "\n";
    found = true;
  }
  if (fs::exists(dir / "cv_report.json")) {
    const auto cv = util::read_json(dir / "cv_report.json");
    text << "== cross-validation (" << cv.at("folds").get<int>() << " folds)\n";
    for (const auto& p : cv.at("points")) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-40s mean %.4f  std %.4f\n", p.at("key").get<std::string>().c_str(),
                    p.at("mean_auc").get<double>(), p.at("std_auc").get<double>());
      text << buf;
    }
    text << "selected: " << cv.at("selected_key").get<std::string>() << "\n\n";
    found = true;
  }
  if (!found) reject("no report.json, history.jsonl, ablation_table.json or cv_report.json under " + dir.string());

  std::ofstream(out / "summary.txt") << text.str();
  std::cout << text.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled cGAN cross-spectral verification"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth-data", "Render a synthetic VIS/NIR dataset and its manifest");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--spec", synth.spec_file, "SyntheticSpec JSON (flags override it)");
  s->add_option("--classes", synth.classes, "Number of classes (2 per subject)");
  s->add_option("--samples", synth.samples, "Samples per class and spectrum");
  s->add_option("--size", synth.size, "Image side in pixels");
  s->add_option("--seed", synth.seed, "Generator seed");
  s->add_option("--train-subjects", synth.train_subjects, "Subjects assigned to TRAIN (default: half)");
  s->add_option("--extra-train-eye", synth.extra_train_eye, "Also put this eye of the next subject in TRAIN");
  s->add_option("--profile", synth.profile, "Profile for channel statistics (desk|paper)");
  s->add_flag("--overwrite", synth.overwrite, "Replace a nonempty output directory");

  RunArgs train;
  auto* t = app.add_subcommand("train", "Train a model (or cross-validate with --folds)");
  t->add_option("--config", train.config, "Run config JSON");
  t->add_option("--manifest", train.manifest, "Dataset manifest (overrides data.manifest)");
  t->add_option("--set", train.sets, "key=value override")->take_all();
  t->add_option("--out", train.out, "Run directory")->required();
  t->add_option("--folds", train.folds, "Class-disjoint cross-validation folds over TRAIN");
  t->add_option("--grid", train.grid, "CV grid axis key=v1,v2 (repeatable)")->take_all();
  t->add_flag("-v,--verbose", train.verbose);

  EvalArgs eval;
  auto* e = app.add_subcommand("evaluate", "Score the TEST split with a checkpoint's encoders");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint directory (full or encoder-only)")->required();
  e->add_option("--manifest", eval.manifest, "Dataset manifest")->required();
  e->add_option("--out", eval.out, "Output directory")->required();
  e->add_option("--batch-size", eval.batch_size, "Embedding batch size");
  e->add_flag("!--no-scores", eval.scores, "Skip scores.csv");

  RunArgs ablate;
  auto* ab = app.add_subcommand("ablate", "Run an ablation grid (table3 or table4)");
  ab->add_option("--grid", ablate.grid_name, "table3 | table4")->required();
  ab->add_option("--config", ablate.config, "Run config JSON");
  ab->add_option("--manifest", ablate.manifest, "Dataset manifest");
  ab->add_option("--set", ablate.sets, "key=value override")->take_all();
  ab->add_option("--out", ablate.out, "Output directory")->required();
  ab->add_flag("-v,--verbose", ablate.verbose);

  fs::path report_dir;
  fs::path report_out;
  auto* r = app.add_subcommand("report", "Summarize stored artifacts");
  r->add_option("dir", report_dir, "Run, evaluation or ablation directory")->required();
  r->add_option("--out", report_out, "Where summary.txt and figures go (default <dir>/summary)");

  std::string profile = "desk";
  auto* c = app.add_subcommand("config", "Print the default run config for a profile");
  c->add_option("--profile", profile, "desk | paper");

  fs::path cell_dir;
  auto* rc = app.add_subcommand("run-cell", "");
  rc->group("");
  rc->add_option("dir", cell_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*t) return cmd_train(train);
    if (*e) return cmd_evaluate(eval);
    if (*ab) return cmd_ablate(ablate);
    if (*r) return cmd_report(report_dir, report_out);
    if (*c) {
      std::cout << training::default_run_document(data::ScaleProfile::by_name(profile)).dump(2) << "\n";
      return 0;
    }
    if (*rc) {
      training::run_prepared_cell(cell_dir);
      return 0;
    }
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "failed: %s\n", err.what());
    return 2;
  }
  return 1;
}

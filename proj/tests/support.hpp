#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cogan/data/manifest.hpp"
#include "cogan/data/synthetic.hpp"
#include "cogan/evaluation/roc.hpp"
#include "cogan/training/config.hpp"

#include <torch/torch.h>

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Synthetic dataset with the first `train_subjects` subjects in TRAIN.
cogan::data::DatasetManifest make_dataset(const std::filesystem::path& dir, int classes, int samples,
                                          std::uint64_t seed, std::size_t train_subjects);

/// Manifest of file-less records, `classes` × `samples` per spectrum, all TEST.
/// Enough for pair enumeration, which never opens images.
cogan::data::DatasetManifest shaped_manifest(int classes, int samples);

/// Small, fast desk-profile run: 8 pairs per batch, 2 epochs of 2 steps.
cogan::training::TrainConfig tiny_config(std::uint64_t seed);

std::string file_sha256(const std::filesystem::path& file);

// ---- scalar oracles ---------------------------------------------------------
// Plain double arithmetic, no tensors, written from the definitions.

double oracle_distance(const std::vector<double>& a, const std::vector<double>& b);
double oracle_contrastive(const std::vector<std::vector<double>>& zv, const std::vector<std::vector<double>>& zn,
                          const std::vector<int>& labels, double margin);
double oracle_discriminator_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake);
double oracle_generator_loss(const std::vector<double>& d_fake, bool literal);
double oracle_mean_squared(const std::vector<double>& x, const std::vector<double>& y);

struct OracleRoc {
  double auc = 0.0;
  double eer = 0.0;
  double frr_at_1pct = 0.0;
  double frr_at_10pct = 0.0;
};

/// Counts accepted scores at every candidate threshold separately (O(n²)).
OracleRoc oracle_threshold_sweep(const std::vector<double>& genuine, const std::vector<double>& imposter);
/// P(genuine < imposter) + ½·P(tie) over all genuine × imposter pairs.
double oracle_mann_whitney(const std::vector<double>& genuine, const std::vector<double>& imposter);

/// Splits a ScoreSet by label.
void split_scores(const cogan::evaluation::ScoreSet& s, std::vector<double>& genuine, std::vector<double>& imposter);
cogan::evaluation::ScoreSet make_scores(const std::vector<double>& genuine, const std::vector<double>& imposter);

// ---- gradient check ---------------------------------------------------------

using ScalarFn = std::function<torch::Tensor(const std::vector<torch::Tensor>&)>;

/// Autograd gradient of `f` against central differences, both in float64.
/// Returns the largest ‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖)
/// over the inputs (0 when both vanish).
double gradient_relative_error(const ScalarFn& f, const std::vector<torch::Tensor>& inputs, double step = 1e-6);

}  // namespace testing

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cogan/util/hash.hpp"

namespace fs = std::filesystem;

namespace testing {

TempDir::TempDir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  path_ = fs::temp_directory_path() / ("cogan_" + tag + "_" + std::to_string(rng() % 1000000000));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

cogan::data::DatasetManifest make_dataset(const fs::path& dir, int classes, int samples, std::uint64_t seed,
                                          std::size_t train_subjects) {
  cogan::data::SyntheticSpec spec;
  spec.num_classes = classes;
  spec.samples_per_class = samples;
  spec.image_size = 64;
  spec.seed = seed;
  cogan::data::SyntheticOptions opt;
  opt.split.train_subjects = train_subjects;
  return cogan::data::generate_synthetic_dataset(spec, dir, opt);
}

cogan::data::DatasetManifest shaped_manifest(int classes, int samples) {
  cogan::data::DatasetManifest m;
  m.root = "/nonexistent";
  for (int c = 0; c < classes; ++c) {
    for (auto sp : {cogan::data::Spectrum::Vis, cogan::data::Spectrum::Nir}) {
      for (int i = 0; i < samples; ++i) {
        cogan::data::ImageRecord r;
        r.subject = cogan::data::subject_name(c);
        r.eye = cogan::data::eye_name(c);
        r.class_id = r.subject + "_" + r.eye;
        r.spectrum = sp;
        r.sample_index = i;
        r.split = cogan::data::Split::Test;
        r.path = r.subject + "/" + r.eye + "/" + cogan::data::to_string(sp) + "/" + std::to_string(i) + ".png";
        m.records.push_back(std::move(r));
      }
    }
  }
  return m;
}

cogan::training::TrainConfig tiny_config(std::uint64_t seed) {
  auto c = cogan::training::TrainConfig::defaults(cogan::data::ScaleProfile::desk());
  c.seed = seed;
  c.model.weight_seed = seed;
  c.batch_pairs = 8;
  c.epochs = 2;
  c.steps_per_epoch = 2;
  c.eval_batch_size = 32;
  return c;
}

std::string file_sha256(const fs::path& file) { return cogan::util::sha256_file(file); }

double oracle_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double oracle_contrastive(const std::vector<std::vector<double>>& zv, const std::vector<std::vector<double>>& zn,
                          const std::vector<int>& labels, double margin) {
  double total = 0.0;
  for (std::size_t i = 0; i < zv.size(); ++i) {
    const double d = oracle_distance(zv[i], zn[i]);
    if (labels[i] == 0) {
      total += 0.5 * d * d;
    } else {
      const double h = std::max(0.0, margin - d);
      total += 0.5 * h * h;
    }
  }
  return total / static_cast<double>(zv.size());
}

double oracle_discriminator_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake) {
  double s = 0.0;
  for (std::size_t i = 0; i < d_real.size(); ++i) s += std::log(d_real[i]) + std::log(1.0 - d_fake[i]);
  return -s / static_cast<double>(d_real.size());
}

double oracle_generator_loss(const std::vector<double>& d_fake, bool literal) {
  double s = 0.0;
  for (double d : d_fake) s += literal ? std::log(1.0 - d) : -std::log(d);
  return s / static_cast<double>(d_fake.size());
}

double oracle_mean_squared(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

namespace {

struct Point {
  double far, frr;
};

double interpolate_frr(const std::vector<Point>& pts, double t) {
  // Last point with FAR <= t, then linear towards the next one.
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].far <= t) k = i;
  }
  if (k + 1 >= pts.size() || pts[k].far == t) return pts[k].frr;
  const auto& a = pts[k];
  const auto& b = pts[k + 1];
  return a.frr + (b.frr - a.frr) * (t - a.far) / (b.far - a.far);
}

}  // namespace

OracleRoc oracle_threshold_sweep(const std::vector<double>& genuine, const std::vector<double>& imposter) {
  std::vector<double> thresholds(genuine);
  thresholds.insert(thresholds.end(), imposter.begin(), imposter.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.insert(thresholds.begin(), -std::numeric_limits<double>::infinity());

  std::vector<Point> pts;
  for (double t : thresholds) {
    double fa = 0.0, fr = 0.0;
    for (double s : imposter) fa += s <= t ? 1.0 : 0.0;
    for (double s : genuine) fr += s > t ? 1.0 : 0.0;
    pts.push_back({fa / imposter.size(), fr / genuine.size()});
  }

  OracleRoc out;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    out.auc += (pts[i].far - pts[i - 1].far) * ((1.0 - pts[i].frr) + (1.0 - pts[i - 1].frr)) / 2.0;
  }
  out.eer = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].far - pts[i].frr;
    if (d == 0.0) {
      out.eer = pts[i].far;
      break;
    }
    if (i > 0) {
      const double prev = pts[i - 1].far - pts[i - 1].frr;
      if (prev < 0.0 && d > 0.0) {
        const double w = -prev / (d - prev);
        out.eer = pts[i - 1].far + w * (pts[i].far - pts[i - 1].far);
        break;
      }
    }
  }
  out.frr_at_1pct = interpolate_frr(pts, 0.01);
  out.frr_at_10pct = interpolate_frr(pts, 0.10);
  return out;
}

double oracle_mann_whitney(const std::vector<double>& genuine, const std::vector<double>& imposter) {
  double s = 0.0;
  for (double g : genuine) {
    for (double i : imposter) s += g < i ? 1.0 : (g == i ? 0.5 : 0.0);
  }
  return s / (static_cast<double>(genuine.size()) * static_cast<double>(imposter.size()));
}

void split_scores(const cogan::evaluation::ScoreSet& s, std::vector<double>& genuine, std::vector<double>& imposter) {
  genuine.clear();
  imposter.clear();
  for (std::size_t i = 0; i < s.distances.size(); ++i) (s.labels[i] == 0 ? genuine : imposter).push_back(s.distances[i]);
}

cogan::evaluation::ScoreSet make_scores(const std::vector<double>& genuine, const std::vector<double>& imposter) {
  cogan::evaluation::ScoreSet s;
  for (double g : genuine) {
    s.distances.push_back(g);
    s.labels.push_back(0);
  }
  for (double i : imposter) {
    s.distances.push_back(i);
    s.labels.push_back(1);
  }
  return s;
}

double gradient_relative_error(const ScalarFn& f, const std::vector<torch::Tensor>& inputs, double step) {
  std::vector<torch::Tensor> leaves;
  for (const auto& t : inputs) leaves.push_back(t.detach().to(torch::kFloat64).clone().requires_grad_(true));
  f(leaves).backward();

  double worst = 0.0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const auto analytic = leaves[k].grad().defined() ? leaves[k].grad().clone() : torch::zeros_like(leaves[k]);
    auto numeric = torch::zeros_like(analytic);
    torch::NoGradGuard ng;
    std::vector<torch::Tensor> probe;
    for (const auto& t : leaves) probe.push_back(t.detach().clone());
    auto flat = probe[k].view(-1);
    auto out = numeric.view(-1);
    for (int64_t i = 0; i < flat.numel(); ++i) {
      const double v = flat[i].item<double>();
      flat[i] = v + step;
      const double up = f(probe).item<double>();
      flat[i] = v - step;
      const double down = f(probe).item<double>();
      flat[i] = v;
      out[i] = (up - down) / (2.0 * step);
    }
    const double scale = std::max(analytic.norm().item<double>(), numeric.norm().item<double>());
    if (scale == 0.0) continue;
    worst = std::max(worst, (analytic - numeric).norm().item<double>() / scale);
  }
  return worst;
}

}  // namespace testing

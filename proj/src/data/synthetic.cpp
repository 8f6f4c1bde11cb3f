#include "cogan/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "cogan/data/image_io.hpp"
#include "cogan/error.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::data {
namespace {

constexpr double kPi = std::numbers::pi;

struct Blob {
  double cx, cy, sigma, amplitude;
};

struct Grating {
  double frequency, angle, phase, amplitude;
};

/// Class-specific parameters of the procedural identity texture.
struct Identity {
  std::vector<Blob> blobs;
  std::vector<Grating> gratings;
  double iris_x = 0.5, iris_y = 0.5, iris_r = 0.15;
  double brow_y = 0.2, brow_tilt = 0.0;
  std::array<double, 3> tint{1.0, 1.0, 1.0};
};

std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

Identity make_identity(const SyntheticSpec& spec, int class_index) {
  auto rng = stream(spec.seed, {0x1D, static_cast<std::uint64_t>(class_index)});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  Identity id;
  for (int k = 0; k < 8; ++k) {
    id.blobs.push_back({in(0.1, 0.9), in(0.1, 0.9), in(0.05, 0.15), in(-1.2, 1.2)});
  }
  for (int g = 0; g < 2; ++g) {
    id.gratings.push_back({in(2.0, 6.0), in(0.0, kPi), in(0.0, 2.0 * kPi), in(0.2, 0.5)});
  }
  id.iris_x = in(0.4, 0.6);
  id.iris_y = in(0.45, 0.65);
  id.iris_r = in(0.1, 0.2);
  id.brow_y = in(0.12, 0.28);
  id.brow_tilt = in(-0.2, 0.2);
  for (auto& t : id.tint) t = in(1.0 - spec.transforms.vis_tint, 1.0);
  return id;
}

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

/// Pattern intensity in [0, 1] at normalised coordinates (u, v).
double pattern(const Identity& id, double u, double v) {
  double s = 0.0;
  for (const auto& b : id.blobs) {
    const double d2 = (u - b.cx) * (u - b.cx) + (v - b.cy) * (v - b.cy);
    s += b.amplitude * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
  }
  for (const auto& g : id.gratings) {
    s += g.amplitude * std::sin(2.0 * kPi * g.frequency * (u * std::cos(g.angle) + v * std::sin(g.angle)) + g.phase);
  }
  const double r = std::hypot(u - id.iris_x, v - id.iris_y);
  s -= 1.5 * (1.0 - smoothstep(id.iris_r * 0.85, id.iris_r * 1.1, r));
  const double brow = id.brow_y + id.brow_tilt * (u - 0.5);
  s -= 0.8 * std::exp(-((v - brow) * (v - brow)) / (2.0 * 0.03 * 0.03));
  return 1.0 / (1.0 + std::exp(-2.0 * s));
}

/// Pattern sampled on the pixel grid after a rigid jitter about the centre.
cv::Mat sample_pattern(const Identity& id, int size, double dx, double dy, double angle) {
  cv::Mat out(size, size, CV_64F);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) / size - 0.5;
      const double v = (y + 0.5) / size - 0.5;
      const double ru = c * u - s * v + 0.5 - dx;
      const double rv = s * u + c * v + 0.5 - dy;
      out.at<double>(y, x) = pattern(id, ru, rv);
    }
  }
  return out;
}

torch::Tensor to_tensor(const std::vector<cv::Mat>& planes) {
  const int size = planes.front().rows;
  auto t = torch::empty({static_cast<int64_t>(planes.size()), size, size}, torch::kFloat64);
  auto acc = t.accessor<double, 3>();
  for (std::size_t c = 0; c < planes.size(); ++c) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) acc[c][y][x] = std::clamp(planes[c].at<double>(y, x), 0.0, 1.0);
    }
  }
  return t.to(torch::kFloat32);
}

bool nonempty_dir(const fs::path& p) { return fs::exists(p) && !fs::is_empty(p); }

}  // namespace

void SyntheticSpec::validate() const {
  if (num_classes < 2) reject("synthetic dataset needs num_classes >= 2");
  if (samples_per_class < 2) reject("synthetic dataset needs samples_per_class >= 2");
  if (image_size < 8) reject("synthetic image_size must be >= 8");
}

std::string subject_name(int class_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%04d", class_index / 2);
  return buf;
}

std::string eye_name(int class_index) { return class_index % 2 == 0 ? "left" : "right"; }

torch::Tensor render_identity(const SyntheticSpec& spec, int class_index) {
  const auto id = make_identity(spec, class_index);
  return to_tensor({sample_pattern(id, spec.image_size, 0.0, 0.0, 0.0)});
}

torch::Tensor render_sample(const SyntheticSpec& spec, int class_index, Spectrum spectrum, int sample_index) {
  const auto& tf = spec.transforms;
  const auto id = make_identity(spec, class_index);
  auto rng = stream(spec.seed, {0x5A, static_cast<std::uint64_t>(class_index),
                                static_cast<std::uint64_t>(spectrum), static_cast<std::uint64_t>(sample_index)});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double dx = tf.shift_fraction * u(rng);
  const double dy = tf.shift_fraction * u(rng);
  const double angle = tf.rotation_deg * kPi / 180.0 * u(rng);
  const double gain = 1.0 + tf.illumination * u(rng);
  const double offset = 0.05 * u(rng);
  const double ramp_x = tf.ramp * u(rng);
  const double ramp_y = tf.ramp * u(rng);

  const int size = spec.image_size;
  cv::Mat base = sample_pattern(id, size, dx, dy, angle);
  auto shading = [&](int x, int y) {
    return ramp_x * ((x + 0.5) / size - 0.5) + ramp_y * ((y + 0.5) / size - 0.5);
  };

  std::normal_distribution<double> noise(0.0, 1.0);
  if (spectrum == Spectrum::Vis) {
    std::vector<cv::Mat> planes(3, cv::Mat(size, size, CV_64F));
    for (auto& p : planes) p = cv::Mat(size, size, CV_64F);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const double v = gain * std::pow(base.at<double>(y, x), tf.vis_gamma) + offset + shading(x, y);
        for (int c = 0; c < 3; ++c) {
          planes[c].at<double>(y, x) = id.tint[c] * v + (1.0 - id.tint[c]) * 0.15 + tf.vis_noise * noise(rng);
        }
      }
    }
    return to_tensor(planes);
  }

  // NIR: inverted tonal curve, optical blur, single channel, stronger noise.
  cv::Mat nir(size, size, CV_64F);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      nir.at<double>(y, x) =
          gain * (0.15 + 0.75 * std::pow(1.0 - base.at<double>(y, x), tf.nir_gamma)) + offset + shading(x, y);
    }
  }
  const double sigma = tf.nir_blur_sigma * size / 64.0;
  if (sigma > 0.0) cv::GaussianBlur(nir, nir, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) nir.at<double>(y, x) += tf.nir_noise * noise(rng);
  }
  return to_tensor({nir});
}

nlohmann::json to_json(const SyntheticSpec& spec) {
  const auto& t = spec.transforms;
  return {{"num_classes", spec.num_classes},
          {"samples_per_class", spec.samples_per_class},
          {"image_size", spec.image_size},
          {"seed", spec.seed},
          {"transforms",
           {{"vis_gamma", t.vis_gamma},
            {"nir_gamma", t.nir_gamma},
            {"nir_blur_sigma", t.nir_blur_sigma},
            {"vis_noise", t.vis_noise},
            {"nir_noise", t.nir_noise},
            {"shift_fraction", t.shift_fraction},
            {"rotation_deg", t.rotation_deg},
            {"illumination", t.illumination},
            {"ramp", t.ramp},
            {"vis_tint", t.vis_tint}}}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc) {
  SyntheticSpec spec;
  spec.num_classes = doc.at("num_classes").get<int>();
  spec.samples_per_class = doc.at("samples_per_class").get<int>();
  spec.image_size = doc.value("image_size", 64);
  spec.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("transforms")) {
    const auto& t = doc["transforms"];
    auto& tf = spec.transforms;
    tf.vis_gamma = t.value("vis_gamma", tf.vis_gamma);
    tf.nir_gamma = t.value("nir_gamma", tf.nir_gamma);
    tf.nir_blur_sigma = t.value("nir_blur_sigma", tf.nir_blur_sigma);
    tf.vis_noise = t.value("vis_noise", tf.vis_noise);
    tf.nir_noise = t.value("nir_noise", tf.nir_noise);
    tf.shift_fraction = t.value("shift_fraction", tf.shift_fraction);
    tf.rotation_deg = t.value("rotation_deg", tf.rotation_deg);
    tf.illumination = t.value("illumination", tf.illumination);
    tf.ramp = t.value("ramp", tf.ramp);
    tf.vis_tint = t.value("vis_tint", tf.vis_tint);
  }
  return spec;
}

DatasetManifest generate_synthetic_dataset(const SyntheticSpec& spec, const fs::path& out,
                                           const SyntheticOptions& options) {
  spec.validate();
  if (nonempty_dir(out)) {
    if (!options.overwrite) reject("output directory exists and is not empty: " + out.string());
    fs::remove_all(out);
  }
  fs::create_directories(out);

  char name[16];
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto class_dir = out / subject_name(c) / eye_name(c);
    for (auto spectrum : {Spectrum::Vis, Spectrum::Nir}) {
      const auto dir = class_dir / (spectrum == Spectrum::Vis ? "vis" : "nir");
      for (int i = 0; i < spec.samples_per_class; ++i) {
        std::snprintf(name, sizeof(name), "%03d.png", i);
        write_png(dir / name, render_sample(spec, c, spectrum, i));
      }
    }
  }
  util::write_json(out / "synthetic.json", to_json(spec));

  auto manifest = build_manifest(out, options.split, options.build);
  save_manifest(manifest, out / "manifest.json");
  return manifest;
}

}  // namespace cogan::data

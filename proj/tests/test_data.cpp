#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "cogan/data/image_io.hpp"
#include "cogan/data/manifest.hpp"
#include "cogan/data/preprocess.hpp"
#include "cogan/data/sampler.hpp"
#include "cogan/data/synthetic.hpp"
#include "cogan/error.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace cogan;
using namespace cogan::data;

namespace {

void write_gray(const fs::path& file, int side, double value) {
  fs::create_directories(file.parent_path());
  write_png(file, torch::full({1, side, side}, value));
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = testing::file_sha256(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("build_manifest splits 120 subjects at a 60-subject cutoff") {
  testing::TempDir tmp("manifest120");
  SyntheticSpec spec;
  spec.num_classes = 240;
  spec.samples_per_class = 8;
  spec.image_size = 8;
  spec.seed = 3;
  SyntheticOptions opt;
  opt.split.train_subjects = 60;
  opt.build.compute_stats = false;
  const auto m = generate_synthetic_dataset(spec, tmp.path(), opt);
  CHECK(m.classes(Split::Train).size() == 120);
  CHECK(m.classes(Split::Test).size() == 120);
  CHECK(m.indices(Split::Train).size() == 1920);
  CHECK(m.indices(Split::Test).size() == 1920);
}

TEST_CASE("build_manifest on a single class with cutoff 0") {
  testing::TempDir tmp("manifest1");
  write_gray(tmp / "s0/left/vis/0.png", 16, 0.5);
  write_gray(tmp / "s0/left/nir/0.png", 16, 0.5);
  const auto m = build_manifest(tmp.path(), SplitRule{0, std::nullopt});
  CHECK(m.records.size() == 2);
  CHECK(m.classes(Split::Test) == std::vector<std::string>{"s0_left"});
  CHECK(m.classes(Split::Train).empty());
  CHECK_FALSE(m.channel_stats.has_value());
}

TEST_CASE("build_manifest names a class that lacks NIR") {
  testing::TempDir tmp("manifest_nonir");
  write_gray(tmp / "s0/left/vis/0.png", 16, 0.5);
  write_gray(tmp / "s0/left/nir/0.png", 16, 0.5);
  write_gray(tmp / "s1/right/vis/0.png", 16, 0.5);
  try {
    build_manifest(tmp.path(), SplitRule{1, std::nullopt});
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("s1_right") != std::string::npos);
    CHECK(std::string(e.what()).find("NIR") != std::string::npos);
  }
}

TEST_CASE("build_manifest rejects duplicate sample indices") {
  testing::TempDir tmp("manifest_dup");
  write_gray(tmp / "s0/left/vis/0.png", 16, 0.5);
  write_gray(tmp / "s0/left/vis/000.png", 16, 0.5);
  write_gray(tmp / "s0/left/nir/0.png", 16, 0.5);
  CHECK_THROWS_AS(build_manifest(tmp.path(), SplitRule{0, std::nullopt}), ValidationError);
}

TEST_CASE("per-eye split assignment reproduces a half subject") {
  testing::TempDir tmp("manifest_half");
  for (const char* s : {"a", "b"}) {
    for (const char* eye : {"left", "right"}) {
      for (const char* sp : {"vis", "nir"}) write_gray(tmp / s / eye / sp / "0.png", 8, 0.3);
    }
  }
  BuildOptions opt;
  opt.compute_stats = false;
  const auto m = build_manifest(tmp.path(), SplitRule{1, std::string("left")}, opt);
  CHECK(m.classes(Split::Train) == std::vector<std::string>{"a_left", "a_right", "b_left"});
  CHECK(m.classes(Split::Test) == std::vector<std::string>{"b_right"});
}

TEST_CASE("manifest survives a save/load round trip") {
  testing::TempDir tmp("manifest_rt");
  const auto m = testing::make_dataset(tmp / "data", 4, 2, 5, 1);
  save_manifest(m, tmp / "copy.json");
  auto back = load_manifest(tmp / "copy.json");
  CHECK((back.records == m.records));
  CHECK((back.channel_stats == m.channel_stats));
  CHECK(fs::equivalent(back.root, m.root));
}

TEST_CASE("preprocess_image rescales a 640x480 image to the paper side") {
  testing::TempDir tmp("pre640");
  fs::create_directories(tmp / "s0/left/vis");
  fs::create_directories(tmp / "s0/left/nir");
  write_png(tmp / "s0/left/vis/0.png", torch::rand({3, 480, 640}));
  write_png(tmp / "s0/left/nir/0.png", torch::rand({1, 480, 640}));
  BuildOptions opt;
  opt.profile = ScaleProfile::paper();
  const auto m = build_manifest(tmp.path(), SplitRule{1, std::nullopt}, opt);
  for (const auto& r : m.records) {
    const auto x = preprocess_image(r, m, ScaleProfile::paper());
    CHECK(x.sizes() == torch::IntArrayRef{3, 256, 256});
  }
}

TEST_CASE("standardizing the training mean gives zeros") {
  ChannelStats stats{"desk", 3, {0.2, 0.4, 0.6}, {0.1, 0.2, 0.3}, false};
  auto mean_image = torch::stack({torch::full({64, 64}, 0.2), torch::full({64, 64}, 0.4), torch::full({64, 64}, 0.6)})
                        .to(torch::kFloat32);
  CHECK(standardize(mean_image, stats).abs().max().item<double>() < 1e-6);
}

TEST_CASE("preprocessed TRAIN split has zero mean and unit std per channel") {
  testing::TempDir tmp("prestats");
  const auto m = testing::make_dataset(tmp.path(), 8, 3, 11, 4);
  std::vector<torch::Tensor> xs;
  for (auto i : m.indices(Split::Train)) xs.push_back(preprocess_image(m.records[i], m, ScaleProfile::desk()));
  const auto all = torch::stack(xs).to(torch::kFloat64);  // N×C×H×W
  for (int c = 0; c < 3; ++c) {
    const auto ch = all.select(1, c);
    CHECK(std::abs(ch.mean().item<double>()) < 0.01);
    CHECK(std::abs(ch.std(/*unbiased=*/false).item<double>() - 1.0) < 0.01);
  }
}

TEST_CASE("augment_image crops a translated window of the padded canvas") {
  const auto profile = ScaleProfile::paper();
  auto img = torch::rand({3, 256, 256}) + 0.5;  // strictly nonzero
  SUBCASE("centre crop is the identity") {
    CHECK(torch::equal(crop_padded(img, profile.pad() / 2, profile.pad() / 2, profile), img));
  }
  SUBCASE("shape is preserved and content is a shifted copy") {
    std::mt19937_64 rng(4);
    auto out = augment_image(img, rng, profile);
    CHECK(out.sizes() == img.sizes());
    auto canvas = torch::zeros({3, 272, 272});
    canvas.slice(1, 8, 264).slice(2, 8, 264).copy_(img);
    bool found = false;
    for (int dy = 0; dy <= 16 && !found; ++dy) {
      for (int dx = 0; dx <= 16 && !found; ++dx) {
        found = torch::equal(canvas.slice(1, dy, dy + 256).slice(2, dx, dx + 256), out);
      }
    }
    CHECK(found);
    // Nonzero pixels come from the original.
    auto nz = out.masked_select(out != 0);
    auto orig = std::get<0>(torch::_unique(img.flatten()));
    CHECK(torch::isin(nz, orig).all().item<bool>());
  }
  SUBCASE("equal seeds give equal crops") {
    std::mt19937_64 a(99), b(99);
    CHECK(torch::equal(augment_image(img, a, profile), augment_image(img, b, profile)));
  }
}

TEST_CASE("pair batches") {
  testing::TempDir tmp("pairs");
  const auto m = testing::make_dataset(tmp.path(), 8, 3, 2, 4);
  ImageStore store(m, ScaleProfile::desk());
  PairSampler sampler(m, Split::Train);
  std::mt19937_64 rng(1);

  SUBCASE("100 pairs make 200 images") {
    auto b = sample_pair_batch(sampler, store, 100, 0.5, rng, true);
    CHECK(b.labels.size(0) == 100);
    CHECK(b.vis.size(0) + b.nir.size(0) == 200);
    CHECK(b.vis.sizes() == b.nir.sizes());
    for (std::size_t i = 0; i < b.pair_ids.size(); ++i) {
      const bool same = m.records[b.pair_ids[i].vis].class_id == m.records[b.pair_ids[i].nir].class_id;
      CHECK((b.labels[i].item<float>() == 0.0f) == same);
      CHECK(m.records[b.pair_ids[i].vis].spectrum == Spectrum::Vis);
      CHECK(m.records[b.pair_ids[i].nir].spectrum == Spectrum::Nir);
    }
  }
  SUBCASE("genuine_prob 1 gives only class-matched pairs") {
    auto d = sampler.draw(200, 1.0, rng);
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
      CHECK(d.labels[i] == 0);
      CHECK(m.records[d.pairs[i].vis].class_id == m.records[d.pairs[i].nir].class_id);
    }
  }
  SUBCASE("genuine fraction lies inside the 3-sigma binomial band") {
    auto d = sampler.draw(10000, 0.5, rng);
    const auto genuine = std::count(d.labels.begin(), d.labels.end(), 0);
    const double sigma = std::sqrt(10000 * 0.25);
    CHECK(std::abs(static_cast<double>(genuine) - 5000.0) <= 3.0 * sigma);
  }
  SUBCASE("genuine pairs are uniform over within-class combinations") {
    auto d = sampler.draw(36000, 1.0, rng);
    std::map<std::pair<std::size_t, std::size_t>, int> hist;
    for (const auto& p : d.pairs) hist[{p.vis, p.nir}] += 1;
    REQUIRE(sampler.genuine_combinations() == 72);  // 8 TRAIN classes × 3 × 3
    CHECK(hist.size() == 72);
    for (const auto& [k, n] : hist) CHECK(std::abs(n - 500) < 5 * std::sqrt(500.0));
  }
  SUBCASE("equal seeds give equal batch sequences") {
    std::mt19937_64 a(5), b(5);
    auto x = sample_pair_batch(sampler, store, 6, 0.5, a, true);
    auto y = sample_pair_batch(sampler, store, 6, 0.5, b, true);
    CHECK(torch::equal(x.vis, y.vis));
    CHECK(torch::equal(x.labels, y.labels));
  }
}

TEST_CASE("imposters cannot be drawn from one class") {
  testing::TempDir tmp("oneclass");
  const auto m = testing::make_dataset(tmp.path(), 2, 2, 2, 1);
  const auto one = with_train_classes(m, {m.classes(Split::Train).front()}, {});
  PairSampler sampler(one, Split::Train);
  std::mt19937_64 rng(0);
  CHECK_NOTHROW(sampler.draw(4, 1.0, rng));
  CHECK_THROWS_AS(sampler.draw(4, 0.5, rng), ValidationError);
}

TEST_CASE("synthetic generator") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.samples_per_class = 6;
  spec.image_size = 64;
  spec.seed = 7;

  SUBCASE("layout holds classes x samples x 2 images") {
    testing::TempDir tmp("synth_layout");
    SyntheticOptions opt;
    opt.split.train_subjects = 3;
    generate_synthetic_dataset(spec, tmp / "d", opt);
    int png = 0;
    for (const auto& e : fs::recursive_directory_iterator(tmp / "d")) png += e.path().extension() == ".png";
    CHECK(png == 120);
  }
  SUBCASE("same spec twice gives byte-identical trees") {
    testing::TempDir tmp("synth_det");
    SyntheticOptions opt;
    opt.split.train_subjects = 3;
    generate_synthetic_dataset(spec, tmp / "a", opt);
    generate_synthetic_dataset(spec, tmp / "b", opt);
    auto ha = tree_hashes(tmp / "a");
    auto hb = tree_hashes(tmp / "b");
    ha.erase("manifest.json");  // records the root path
    hb.erase("manifest.json");
    CHECK(ha == hb);
    const auto ma = load_manifest(tmp / "a/manifest.json");
    const auto mb = load_manifest(tmp / "b/manifest.json");
    CHECK((ma.records == mb.records));
    CHECK((ma.channel_stats == mb.channel_stats));
  }
  SUBCASE("distinct classes have distinct base patterns") {
    for (int c = 1; c < 10; ++c) {
      const double diff = (render_identity(spec, 0) - render_identity(spec, c)).abs().mean().item<double>();
      CHECK(diff > 0.0);
    }
  }
  SUBCASE("VIS has three channels and NIR one") {
    CHECK(render_sample(spec, 0, Spectrum::Vis, 0).size(0) == 3);
    CHECK(render_sample(spec, 0, Spectrum::Nir, 0).size(0) == 1);
  }
  SUBCASE("a nonempty output directory needs overwrite") {
    testing::TempDir tmp("synth_over");
    std::ofstream(tmp / "keep.txt") << "x";
    SyntheticOptions opt;
    CHECK_THROWS_AS(generate_synthetic_dataset(spec, tmp.path(), opt), ValidationError);
    opt.overwrite = true;
    CHECK_NOTHROW(generate_synthetic_dataset(spec, tmp.path(), opt));
  }
  SUBCASE("invalid specs are rejected") {
    auto bad = spec;
    bad.samples_per_class = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = spec;
    bad.num_classes = 1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }
}

TEST_CASE("channel statistics") {
  testing::TempDir tmp("stats");
  SUBCASE("constant data is flagged degenerate") {
    for (const char* sp : {"vis", "nir"}) write_gray(tmp / "s0/left" / sp / "0.png", 16, 0.4);
    const auto m = build_manifest(tmp.path(), SplitRule{1, std::nullopt});
    REQUIRE(m.channel_stats);
    CHECK(m.channel_stats->mean[0] == doctest::Approx(std::round(0.4 * 255) / 255).epsilon(1e-6));
    CHECK(m.channel_stats->degenerate);
    CHECK(m.channel_stats->stddev[0] == ChannelStats::kMinStd);
  }
  SUBCASE("two images with values 0 and 2 average to 1") {
    write_gray(tmp / "s0/left/vis/0.png", 16, 0.0);
    write_gray(tmp / "s0/left/nir/0.png", 16, 2.0 / 255.0);
    const auto m = build_manifest(tmp.path(), SplitRule{1, std::nullopt});
    // Pixel units are [0, 1]; 8-bit values 0 and 2 average to 1/255.
    for (double mu : m.channel_stats->mean) CHECK(mu * 255.0 == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("TEST content does not move the statistics") {
    const auto m = testing::make_dataset(tmp / "d", 4, 2, 9, 1);
    for (auto i : m.indices(Split::Test)) write_png(m.resolve(m.records[i]), torch::ones({1, 64, 64}));
    const auto again = compute_channel_stats(m, ScaleProfile::desk(), 3);
    CHECK((again == *m.channel_stats));
  }
  SUBCASE("empty TRAIN split is an error") {
    const auto m = testing::make_dataset(tmp / "e", 2, 2, 9, 0);
    CHECK_THROWS_AS(compute_channel_stats(m, ScaleProfile::desk(), 3), ValidationError);
  }
}

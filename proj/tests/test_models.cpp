#include <doctest.h>

#include <fstream>
#include <set>

#include "cogan/error.hpp"
#include "cogan/models/bundle.hpp"
#include "cogan/models/checkpoint.hpp"
#include "support.hpp"

using namespace cogan;
using namespace cogan::models;

namespace {

ModelConfig desk(int dim = 64, std::uint64_t seed = 1) {
  auto c = ModelConfig::for_profile(data::ScaleProfile::desk());
  c.embedding_dim = dim;
  c.weight_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("paper profile encoder maps 256x256 to a 64-vector") {
  auto c = ModelConfig::for_profile(data::ScaleProfile::paper());
  c.embedding_dim = 64;
  torch::manual_seed(0);
  ResNetEncoder enc(c);
  enc->eval();
  torch::NoGradGuard ng;
  auto z = enc->forward(torch::randn({1, 3, 256, 256}));
  CHECK(z.sizes() == torch::IntArrayRef{1, 64});
}

TEST_CASE("equal weight seeds give identical bundles") {
  auto a = instantiate_models(desk());
  auto b = instantiate_models(desk());
  CHECK(module_checksum(*a.generator_vis) == module_checksum(*b.generator_vis));
  CHECK(module_checksum(*a.discriminator_nir) == module_checksum(*b.discriminator_nir));
  CHECK(module_checksum(*a.perceptual) == module_checksum(*b.perceptual));
  auto c = instantiate_models(desk(64, 2));
  CHECK(module_checksum(*a.generator_vis) != module_checksum(*c.generator_vis));
}

TEST_CASE("discriminator widths read back") {
  auto b = instantiate_models(desk());
  CHECK(b.discriminator_vis->widths() == std::vector<int>{16, 32, 64, 128});
  CHECK(summarize(b)["discriminator_widths"] == nlohmann::json({16, 32, 64, 128}));
}

TEST_CASE("VIS and NIR branches own disjoint parameters") {
  auto b = instantiate_models(desk());
  std::set<const void*> vis;
  for (const auto& p : b.generator_vis->parameters()) vis.insert(p.data_ptr());
  for (const auto& p : b.discriminator_vis->parameters()) vis.insert(p.data_ptr());
  for (const auto& p : b.generator_nir->parameters()) CHECK(vis.count(p.data_ptr()) == 0);
  for (const auto& p : b.discriminator_nir->parameters()) CHECK(vis.count(p.data_ptr()) == 0);
  CHECK(module_checksum(*b.generator_vis) != module_checksum(*b.generator_nir));
}

TEST_CASE("perceptual network stays out of the trainable set") {
  auto b = instantiate_models(desk());
  std::set<const void*> trainable;
  for (const auto& p : b.generator_parameters()) trainable.insert(p.data_ptr());
  for (const auto& p : b.discriminator_parameters()) trainable.insert(p.data_ptr());
  for (const auto& p : b.perceptual->parameters()) {
    CHECK(trainable.count(p.data_ptr()) == 0);
    CHECK_FALSE(p.requires_grad());
  }
  CHECK(b.counts().perceptual > 0);
}

TEST_CASE("invalid model configs are rejected") {
  auto c = desk();
  c.profile.side = 48;
  CHECK_THROWS_AS(instantiate_models(c), ValidationError);
  c = desk();
  c.embedding_dim = 0;
  CHECK_THROWS_AS(instantiate_models(c), ValidationError);
  c = desk();
  c.perceptual_layer = 99;
  CHECK_THROWS_AS(instantiate_models(c), ValidationError);
}

TEST_CASE("encode") {
  auto b = instantiate_models(desk(128));
  auto& enc = b.generator_vis->encoder();
  torch::manual_seed(3);
  auto x = torch::randn({7, 3, 64, 64});

  SUBCASE("B=7, |z|=128 gives a 7x128 matrix") {
    CHECK(encode(enc, x, data::Spectrum::Vis).vectors.sizes() == torch::IntArrayRef{7, 128});
  }
  SUBCASE("duplicate images give identical rows") {
    auto dup = x.clone();
    dup[4].copy_(dup[1]);
    auto z = encode(enc, dup, data::Spectrum::Vis).vectors;
    CHECK(torch::equal(z[1], z[4]));
  }
  SUBCASE("a one-pixel perturbation changes only its own row") {
    auto z0 = encode(enc, x, data::Spectrum::Vis).vectors;
    auto y = x.clone();
    y.index_put_({2, 0, 10, 10}, y.index({2, 0, 10, 10}) + 0.5);
    auto z1 = encode(enc, y, data::Spectrum::Vis).vectors;
    for (int i = 0; i < 7; ++i) {
      if (i == 2) {
        CHECK_FALSE(torch::equal(z0[i], z1[i]));
      } else {
        CHECK(torch::equal(z0[i], z1[i]));
      }
    }
  }
  SUBCASE("wrong shape is rejected") {
    CHECK_THROWS_AS(encode(enc, torch::randn({2, 3, 32, 32}), data::Spectrum::Vis), ValidationError);
    CHECK_THROWS_AS(encode(enc, torch::randn({2, 1, 64, 64}), data::Spectrum::Vis), ValidationError);
  }
}

TEST_CASE("reconstruct preserves shape and uses skips") {
  auto b = instantiate_models(desk());
  b.train(false);
  torch::manual_seed(5);
  auto x = torch::randn({2, 3, 64, 64});
  torch::NoGradGuard ng;
  auto with = reconstruct(b.generator_vis, x);
  CHECK(with.sizes() == x.sizes());
  b.generator_vis->set_skips_enabled(false);
  auto without = reconstruct(b.generator_vis, x);
  CHECK((with - without).abs().mean().item<double>() > 0.0);
  CHECK_THROWS_AS(reconstruct(b.generator_vis, torch::randn({2, 3, 32, 32})), ValidationError);
}

TEST_CASE("paper profile generator keeps 256x256") {
  auto c = ModelConfig::for_profile(data::ScaleProfile::paper());
  torch::manual_seed(0);
  UNetGenerator g(c);
  g->eval();
  torch::NoGradGuard ng;
  CHECK(reconstruct(g, torch::randn({1, 3, 256, 256})).sizes() == torch::IntArrayRef{1, 3, 256, 256});
}

TEST_CASE("discriminate") {
  auto b = instantiate_models(desk());
  torch::manual_seed(9);
  auto x = torch::randn({5, 3, 64, 64});
  auto y = torch::randn({5, 3, 64, 64});
  auto p = discriminate(b.discriminator_vis, x, y);
  CHECK(p.sizes() == torch::IntArrayRef{5});
  CHECK((p > 0).all().item<bool>());
  CHECK((p < 1).all().item<bool>());
  CHECK_THROWS_AS(discriminate(b.discriminator_vis, x, torch::randn({5, 3, 32, 32})), ValidationError);
}

TEST_CASE("fresh discriminators start undecided") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto b = instantiate_models(desk(64, seed));
    b.train(false);
    torch::manual_seed(static_cast<int64_t>(seed));
    torch::NoGradGuard ng;
    const double m = discriminate(b.discriminator_vis, torch::randn({16, 3, 64, 64}), torch::randn({16, 3, 64, 64}))
                         .mean()
                         .item<double>();
    CHECK(m >= 0.2);
    CHECK(m <= 0.8);
  }
}

TEST_CASE("perceptual features") {
  auto c = desk();
  auto b = instantiate_models(c);
  torch::manual_seed(2);
  auto x = torch::randn({3, 3, 64, 64});

  SUBCASE("shape follows the layer plan") {
    // Walk the plan by hand: channels of the k-th conv, side halved per pool.
    const int k = c.resolved_perceptual_layer();
    int convs = 0, side = 64, ch = 0;
    for (int w : c.perceptual_plan) {
      if (w == 0) {
        side /= 2;
      } else if (++convs == k) {
        ch = w;
        break;
      }
    }
    auto f = perceptual_features(b.perceptual, x);
    CHECK(f.sizes() == torch::IntArrayRef{3, ch, side, side});
    CHECK(summarize(b)["perceptual_feature_shape"] == nlohmann::json({ch, side, side}));
  }
  SUBCASE("an earlier layer is honoured") {
    auto c2 = c;
    c2.perceptual_layer = 3;  // third conv sits after one pool
    auto b2 = instantiate_models(c2);
    CHECK(perceptual_features(b2.perceptual, x).sizes() == torch::IntArrayRef{3, 8, 32, 32});
  }
  SUBCASE("identical inputs, identical features") {
    CHECK(torch::equal(perceptual_features(b.perceptual, x), perceptual_features(b.perceptual, x.clone())));
  }
  SUBCASE("gradient reaches the input but not the network") {
    auto xi = x.clone().requires_grad_(true);
    perceptual_features(b.perceptual, xi).sum().backward();
    REQUIRE(xi.grad().defined());
    CHECK(xi.grad().abs().sum().item<double>() > 0.0);
    for (const auto& p : b.perceptual->parameters()) CHECK_FALSE(p.grad().defined());
  }
}

TEST_CASE("checkpoint round trip and encoder isolation") {
  testing::TempDir tmp("ckpt");
  auto b = instantiate_models(desk());
  save_checkpoint(b, tmp / "full", 3);
  auto back = load_checkpoint(tmp / "full");
  CHECK(module_checksum(*back.generator_vis) == module_checksum(*b.generator_vis));
  CHECK(module_checksum(*back.discriminator_nir) == module_checksum(*b.discriminator_nir));
  CHECK(read_checkpoint_index(tmp / "full")["epoch"] == 3);

  strip_to_encoders(tmp / "full", tmp / "enc");
  CHECK_FALSE(std::filesystem::exists(tmp / "enc" / (std::string(kDecoderVis) + ".bin")));
  auto full = load_encoders(tmp / "full");
  auto enc = load_encoders(tmp / "enc");
  torch::manual_seed(1);
  auto x = torch::randn({4, 3, 64, 64});
  CHECK(torch::equal(encode(full.vis, x, data::Spectrum::Vis).vectors, encode(enc.vis, x, data::Spectrum::Vis).vectors));
  CHECK(torch::equal(encode(full.nir, x, data::Spectrum::Nir).vectors, encode(enc.nir, x, data::Spectrum::Nir).vectors));
  CHECK_THROWS(load_checkpoint(tmp / "enc"));
}

TEST_CASE("a corrupted blob is detected") {
  testing::TempDir tmp("ckpt_bad");
  auto b = instantiate_models(desk());
  save_checkpoint(b, tmp / "c", 0);
  {
    std::fstream f(tmp / "c" / (std::string(kEncoderVis) + ".bin"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-4, std::ios::end);
    f.put('\x7f');
  }
  CHECK_THROWS(read_checkpoint_index(tmp / "c"));
}

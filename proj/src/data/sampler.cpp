#include "cogan/data/sampler.hpp"

#include <map>

#include "cogan/error.hpp"

namespace cogan::data {

PairSampler::PairSampler(const DatasetManifest& manifest, Split split) : manifest_(manifest) {
  std::map<std::string, std::size_t> slot;
  for (const auto& id : manifest.classes(split)) {
    slot.emplace(id, slot.size());
  }
  if (slot.empty()) reject("pair sampler: " + to_string(split) + " split is empty");
  class_vis_.resize(slot.size());
  class_nir_.resize(slot.size());
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.split != split) continue;
    const auto c = slot.at(r.class_id);
    if (r.spectrum == Spectrum::Vis) {
      class_vis_[c].push_back(i);
      all_vis_.push_back(i);
    } else {
      class_nir_[c].push_back(i);
      all_nir_.push_back(i);
    }
  }
  for (std::size_t c = 0; c < class_vis_.size(); ++c) {
    genuine_weights_.push_back(static_cast<double>(class_vis_[c].size() * class_nir_[c].size()));
  }
}

std::size_t PairSampler::genuine_combinations() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < class_vis_.size(); ++c) n += class_vis_[c].size() * class_nir_[c].size();
  return n;
}

PairDraw PairSampler::draw(int batch_pairs, double genuine_prob, std::mt19937_64& rng) const {
  if (batch_pairs < 1) reject("batch_pairs must be >= 1");
  if (!(genuine_prob >= 0.0 && genuine_prob <= 1.0)) reject("genuine_prob must lie in [0, 1]");
  if (genuine_prob < 1.0 && num_classes() < 2) {
    reject("imposter pairs requested but the split holds a single class");
  }

  std::bernoulli_distribution is_genuine(genuine_prob);
  std::discrete_distribution<std::size_t> pick_class(genuine_weights_.begin(), genuine_weights_.end());
  std::uniform_int_distribution<std::size_t> pick_vis(0, all_vis_.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_nir(0, all_nir_.size() - 1);

  PairDraw out;
  out.pairs.reserve(batch_pairs);
  out.labels.reserve(batch_pairs);
  for (int i = 0; i < batch_pairs; ++i) {
    if (is_genuine(rng)) {
      const auto c = pick_class(rng);
      const auto& vis = class_vis_[c];
      const auto& nir = class_nir_[c];
      std::uniform_int_distribution<std::size_t> v(0, vis.size() - 1);
      std::uniform_int_distribution<std::size_t> n(0, nir.size() - 1);
      const auto a = vis[v(rng)];
      const auto b = nir[n(rng)];
      out.pairs.push_back({a, b});
      out.labels.push_back(0);
    } else {
      // Rejection keeps imposters uniform over every cross-class combination.
      while (true) {
        const auto a = all_vis_[pick_vis(rng)];
        const auto b = all_nir_[pick_nir(rng)];
        if (manifest_.records[a].class_id != manifest_.records[b].class_id) {
          out.pairs.push_back({a, b});
          out.labels.push_back(1);
          break;
        }
      }
    }
  }
  return out;
}

PairBatch sample_pair_batch(const PairSampler& sampler, ImageStore& store, int batch_pairs, double genuine_prob,
                            std::mt19937_64& rng, bool augment) {
  auto draw = sampler.draw(batch_pairs, genuine_prob, rng);
  std::vector<torch::Tensor> vis;
  std::vector<torch::Tensor> nir;
  vis.reserve(draw.pairs.size());
  nir.reserve(draw.pairs.size());
  for (const auto& p : draw.pairs) {
    auto a = store.get(p.vis);
    auto b = store.get(p.nir);
    if (augment) {
      a = augment_image(a, rng, store.profile());
      b = augment_image(b, rng, store.profile());
    }
    vis.push_back(a);
    nir.push_back(b);
  }
  std::vector<float> labels(draw.labels.begin(), draw.labels.end());
  PairBatch batch;
  batch.vis = torch::stack(vis);
  batch.nir = torch::stack(nir);
  batch.labels = torch::tensor(labels, torch::kFloat32);
  batch.pair_ids = std::move(draw.pairs);
  return batch;
}

}  // namespace cogan::data

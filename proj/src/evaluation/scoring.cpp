#include "cogan/evaluation/scoring.hpp"

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "cogan/data/preprocess.hpp"
#include "cogan/error.hpp"
#include "cogan/models/bundle.hpp"

namespace cogan::evaluation {
namespace {

models::ResNetEncoder& encoder_for(models::EncoderPair& encoders, data::Spectrum s) {
  return s == data::Spectrum::Vis ? encoders.vis : encoders.nir;
}

void require_files(const PairList& pairs, const data::DatasetManifest& manifest) {
  std::set<std::size_t> missing;
  auto check = [&](std::size_t r) {
    if (!std::filesystem::exists(manifest.resolve(manifest.records[r]))) missing.insert(r);
  };
  std::set<std::size_t> seen;
  for (const auto* list : {&pairs.genuine, &pairs.imposter}) {
    for (const auto& p : *list) {
      if (seen.insert(p.vis).second) check(p.vis);
      if (seen.insert(p.nir).second) check(p.nir);
    }
  }
  if (missing.empty()) return;

  std::size_t affected = 0;
  for (const auto* list : {&pairs.genuine, &pairs.imposter}) {
    for (const auto& p : *list) affected += (missing.contains(p.vis) || missing.contains(p.nir)) ? 1 : 0;
  }
  std::ostringstream msg;
  msg << missing.size() << " image file(s) missing, affecting " << affected << " pair(s):";
  for (auto r : missing) msg << "\n  " << manifest.resolve(manifest.records[r]).string();
  fail(msg.str());
}

double l2(const double* a, const double* b, int64_t dim) {
  double sum = 0.0;
  for (int64_t k = 0; k < dim; ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

ScoreSet collect(const PairList& pairs, const std::function<double(const PairId&)>& score) {
  ScoreSet s;
  s.distances.reserve(pairs.genuine.size() + pairs.imposter.size());
  for (const auto& p : pairs.genuine) {
    s.distances.push_back(score(p));
    s.labels.push_back(0);
    s.pairs.push_back(p);
  }
  for (const auto& p : pairs.imposter) {
    s.distances.push_back(score(p));
    s.labels.push_back(1);
    s.pairs.push_back(p);
  }
  return s;
}

}  // namespace

EmbeddingCache::EmbeddingCache(models::EncoderPair& encoders, const data::DatasetManifest& manifest,
                               data::ScaleProfile profile, int batch_size)
    : encoders_(encoders), manifest_(manifest), profile_(std::move(profile)), batch_size_(batch_size) {
  if (batch_size_ < 1) reject("embedding batch size must be >= 1");
}

void EmbeddingCache::fill(const std::vector<std::size_t>& records) {
  for (auto spectrum : {data::Spectrum::Vis, data::Spectrum::Nir}) {
    std::vector<std::size_t> todo;
    for (auto r : records) {
      if (manifest_.records.at(r).spectrum == spectrum && !embeddings_.contains(r)) todo.push_back(r);
    }
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    for (std::size_t start = 0; start < todo.size(); start += batch_size_) {
      const auto end = std::min(todo.size(), start + static_cast<std::size_t>(batch_size_));
      std::vector<torch::Tensor> images;
      for (auto i = start; i < end; ++i) {
        images.push_back(data::preprocess_image(manifest_.records[todo[i]], manifest_, profile_));
      }
      const auto z = models::encode(encoder_for(encoders_, spectrum), torch::stack(images), spectrum).vectors;
      const auto z64 = z.to(torch::kFloat64);
      for (auto i = start; i < end; ++i) embeddings_.emplace(todo[i], z64[static_cast<int64_t>(i - start)].clone());
    }
  }
}

const torch::Tensor& EmbeddingCache::at(std::size_t record) const {
  auto it = embeddings_.find(record);
  if (it == embeddings_.end()) fail("record " + std::to_string(record) + " has no cached embedding");
  return it->second;
}

ScoreSet score_pairs(models::EncoderPair& encoders, const PairList& pairs, const data::DatasetManifest& manifest,
                     const data::ScaleProfile& profile, int batch_size) {
  require_files(pairs, manifest);
  std::set<std::size_t> needed;
  for (const auto* list : {&pairs.genuine, &pairs.imposter}) {
    for (const auto& p : *list) {
      needed.insert(p.vis);
      needed.insert(p.nir);
    }
  }
  EmbeddingCache cache(encoders, manifest, profile, batch_size);
  cache.fill({needed.begin(), needed.end()});

  const int64_t dim = encoders.config.embedding_dim;
  std::map<std::size_t, const double*> rows;
  for (auto r : needed) rows.emplace(r, cache.at(r).data_ptr<double>());
  return collect(pairs, [&](const PairId& p) { return l2(rows.at(p.vis), rows.at(p.nir), dim); });
}

ScoreSet score_pairs_direct(models::EncoderPair& encoders, const PairList& pairs,
                            const data::DatasetManifest& manifest, const data::ScaleProfile& profile) {
  require_files(pairs, manifest);
  auto embed = [&](std::size_t r) {
    const auto& rec = manifest.records[r];
    auto img = data::preprocess_image(rec, manifest, profile).unsqueeze(0);
    return models::encode(encoder_for(encoders, rec.spectrum), img, rec.spectrum)
        .vectors[0]
        .to(torch::kFloat64)
        .contiguous();
  };
  const int64_t dim = encoders.config.embedding_dim;
  return collect(pairs, [&](const PairId& p) {
    const auto a = embed(p.vis);
    const auto b = embed(p.nir);
    return l2(a.data_ptr<double>(), b.data_ptr<double>(), dim);
  });
}

VerificationReport evaluate(models::EncoderPair& encoders, const data::DatasetManifest& manifest,
                            const data::ScaleProfile& profile, int batch_size, ScoreSet* scores_out) {
  const auto pairs = enumerate_test_pairs(manifest);
  auto scores = score_pairs(encoders, pairs, manifest, profile, batch_size);
  auto report = compute_roc_metrics(scores);
  report.protocol_hash = pairs.protocol_hash;
  if (scores_out) *scores_out = std::move(scores);
  return report;
}

}  // namespace cogan::evaluation

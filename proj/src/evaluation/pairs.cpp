#include "cogan/evaluation/pairs.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cogan/error.hpp"
#include "cogan/util/hash.hpp"

namespace cogan::evaluation {
namespace {

constexpr const char* kRule =
    "cogan.pairs/1 genuine:same-class,vis.index<nir.index imposter:all-cross-class-vis-nir";

struct ClassRecords {
  std::vector<std::size_t> vis;
  std::vector<std::size_t> nir;
};

std::map<std::string, ClassRecords> group(const data::DatasetManifest& manifest, data::Split split) {
  std::map<std::string, ClassRecords> classes;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.split != split) continue;
    auto& c = classes[r.class_id];
    (r.spectrum == data::Spectrum::Vis ? c.vis : c.nir).push_back(i);
  }
  if (classes.empty()) reject(data::to_string(split) + " split is empty; no verification pairs");
  for (const auto& [id, c] : classes) {
    if (c.vis.empty() || c.nir.empty()) reject("TEST class " + id + " lacks one spectrum");
  }
  return classes;
}

}  // namespace

PairCounts closed_form_counts(const data::DatasetManifest& manifest, data::Split split) {
  const auto classes = group(manifest, split);
  PairCounts counts;
  std::uint64_t n_vis = 0;
  std::uint64_t n_nir = 0;
  std::uint64_t same_class = 0;
  for (const auto& [id, c] : classes) {
    std::vector<int> vi;
    std::vector<int> ni;
    for (auto i : c.vis) vi.push_back(manifest.records[i].sample_index);
    for (auto i : c.nir) ni.push_back(manifest.records[i].sample_index);
    std::sort(vi.begin(), vi.end());
    std::sort(ni.begin(), ni.end());
    if (vi == ni) {
      const std::uint64_t n = vi.size();
      counts.genuine += n * (n - 1) / 2;
    } else {
      // #{(a, b) : a < b} by a merge over the two sorted index lists.
      std::size_t below = 0;
      for (int b : ni) {
        while (below < vi.size() && vi[below] < b) ++below;
        counts.genuine += below;
      }
    }
    n_vis += c.vis.size();
    n_nir += c.nir.size();
    same_class += static_cast<std::uint64_t>(c.vis.size()) * c.nir.size();
  }
  counts.imposter = n_vis * n_nir - same_class;
  return counts;
}

PairList enumerate_test_pairs(const data::DatasetManifest& manifest, data::Split split) {
  const auto classes = group(manifest, split);
  const auto expected = closed_form_counts(manifest, split);

  PairList out;
  out.genuine.reserve(expected.genuine);
  out.imposter.reserve(expected.imposter);

  std::vector<std::size_t> all_nir;
  for (const auto& [id, c] : classes) all_nir.insert(all_nir.end(), c.nir.begin(), c.nir.end());

  for (const auto& [id, c] : classes) {
    for (auto v : c.vis) {
      const int vi = manifest.records[v].sample_index;
      for (auto n : c.nir) {
        if (vi < manifest.records[n].sample_index) out.genuine.push_back({v, n});
      }
      for (auto n : all_nir) {
        if (manifest.records[n].class_id != id) out.imposter.push_back({v, n});
      }
    }
  }
  if (out.genuine.size() != expected.genuine || out.imposter.size() != expected.imposter) {
    fail("pair enumeration disagrees with closed-form counts");
  }
  out.protocol_hash = protocol_hash(manifest, split);
  return out;
}

std::string protocol_hash(const data::DatasetManifest& manifest, data::Split split) {
  std::vector<std::string> rows;
  for (const auto& r : manifest.records) {
    if (r.split != split) continue;
    rows.push_back(r.class_id + "|" + data::to_string(r.spectrum) + "|" + std::to_string(r.sample_index) + "|" +
                   r.path.generic_string());
  }
  std::sort(rows.begin(), rows.end());
  std::string text = kRule;
  for (const auto& row : rows) {
    text.push_back('\n');
    text += row;
  }
  return util::sha256_hex(text);
}

}  // namespace cogan::evaluation

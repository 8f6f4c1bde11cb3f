#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogan/data/manifest.hpp"
#include "cogan/data/sampler.hpp"

namespace cogan::evaluation {

using data::PairId;

/// One-against-all cross-spectral verification pairs over the TEST split.
/// Genuine: same class and vis.sample_index < nir.sample_index.
/// Imposter: every (VIS, NIR) combination across different classes.
struct PairList {
  std::vector<PairId> genuine;
  std::vector<PairId> imposter;
  std::string protocol_hash;
};

struct PairCounts {
  std::uint64_t genuine = 0;
  std::uint64_t imposter = 0;
  bool operator==(const PairCounts&) const = default;
};

/// Counts without enumerating: Σ_c #{(i, j) : i < j} over each class's VIS
/// and NIR sample indices (C(n_c, 2) when both spectra hold the same indices),
/// and N_vis·N_nir − Σ_c n_c^vis·n_c^nir imposters.
PairCounts closed_form_counts(const data::DatasetManifest& manifest, data::Split split = data::Split::Test);

PairList enumerate_test_pairs(const data::DatasetManifest& manifest, data::Split split = data::Split::Test);

/// Digest of the enumeration rule and the (class, spectrum, index, path)
/// records it ran over.
std::string protocol_hash(const data::DatasetManifest& manifest, data::Split split = data::Split::Test);

}  // namespace cogan::evaluation

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogan/data/sampler.hpp"

namespace cogan::evaluation {

/// Distances (lower = more likely genuine) with labels 0 = genuine, 1 = imposter.
struct ScoreSet {
  std::vector<double> distances;
  std::vector<int> labels;
  std::vector<data::PairId> pairs;  // optional provenance, parallel to distances

  std::size_t genuine_count() const;
  std::size_t imposter_count() const;
};

/// One operating point: accept iff distance <= threshold. The first point
/// uses threshold −∞ (accept nothing).
struct RocPoint {
  double far = 0.0;
  double frr = 1.0;
  double threshold = 0.0;
  bool operator==(const RocPoint&) const = default;
};

struct VerificationReport {
  static constexpr int kSchemaVersion = 1;

  std::vector<RocPoint> roc;
  double auc = 0.0;
  double eer = 0.0;
  double frr_at_far_1pct = 0.0;
  double frr_at_far_10pct = 0.0;
  std::uint64_t genuine_pairs = 0;
  std::uint64_t imposter_pairs = 0;
  std::string protocol_hash;
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const VerificationReport&) const = default;
};

/// Sweeps every distinct distance as a threshold (tied scores enter at the
/// same point). AUC: trapezoid over (FAR, 1 − FRR). EER: linear interpolation
/// where FAR − FRR changes sign. FRR@FAR: linear interpolation at FAR = t.
VerificationReport compute_roc_metrics(const ScoreSet& scores);

/// FRR at FAR = t on a monotone ROC polyline.
double frr_at_far(const std::vector<RocPoint>& roc, double target_far);
double equal_error_rate(const std::vector<RocPoint>& roc);
double area_under_curve(const std::vector<RocPoint>& roc);

nlohmann::json to_json(const VerificationReport& report);
VerificationReport verification_report_from_json(const nlohmann::json& doc);

}  // namespace cogan::evaluation

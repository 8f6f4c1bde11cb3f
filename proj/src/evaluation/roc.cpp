#include "cogan/evaluation/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cogan/error.hpp"

namespace cogan::evaluation {

std::size_t ScoreSet::genuine_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 0));
}

std::size_t ScoreSet::imposter_count() const { return labels.size() - genuine_count(); }

VerificationReport compute_roc_metrics(const ScoreSet& scores) {
  if (scores.distances.size() != scores.labels.size()) reject("score set: distances and labels differ in length");
  for (double d : scores.distances) {
    if (!std::isfinite(d)) reject("score set contains a non-finite distance");
  }
  const auto n_gen = scores.genuine_count();
  const auto n_imp = scores.imposter_count();
  if (n_gen == 0) reject("score set has no genuine pairs");
  if (n_imp == 0) reject("score set has no imposter pairs");

  std::vector<std::size_t> order(scores.distances.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores.distances[a] < scores.distances[b]; });

  VerificationReport report;
  report.genuine_pairs = n_gen;
  report.imposter_pairs = n_imp;
  report.roc.push_back({0.0, 1.0, -std::numeric_limits<double>::infinity()});

  std::size_t accepted_gen = 0;
  std::size_t accepted_imp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores.distances[order[k]];
    while (k < order.size() && scores.distances[order[k]] == threshold) {
      (scores.labels[order[k]] == 0 ? accepted_gen : accepted_imp) += 1;
      ++k;
    }
    report.roc.push_back({static_cast<double>(accepted_imp) / static_cast<double>(n_imp),
                          static_cast<double>(n_gen - accepted_gen) / static_cast<double>(n_gen), threshold});
  }

  report.auc = area_under_curve(report.roc);
  report.eer = equal_error_rate(report.roc);
  report.frr_at_far_1pct = frr_at_far(report.roc, 0.01);
  report.frr_at_far_10pct = frr_at_far(report.roc, 0.10);
  return report;
}

double area_under_curve(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    const double width = roc[i].far - roc[i - 1].far;
    area += width * ((1.0 - roc[i].frr) + (1.0 - roc[i - 1].frr)) / 2.0;
  }
  return area;
}

double equal_error_rate(const std::vector<RocPoint>& roc) {
  if (roc.empty()) reject("empty ROC");
  for (std::size_t i = 0; i < roc.size(); ++i) {
    const double diff = roc[i].far - roc[i].frr;
    if (diff < 0.0) continue;
    if (diff == 0.0 || i == 0) return roc[i].far;
    const double prev = roc[i - 1].far - roc[i - 1].frr;
    const double s = -prev / (diff - prev);
    const double far = roc[i - 1].far + s * (roc[i].far - roc[i - 1].far);
    const double frr = roc[i - 1].frr + s * (roc[i].frr - roc[i - 1].frr);
    return 0.5 * (far + frr);
  }
  return roc.back().far;
}

double frr_at_far(const std::vector<RocPoint>& roc, double target_far) {
  if (roc.empty()) reject("empty ROC");
  // Last point with FAR <= t carries the lowest FRR reachable without exceeding t.
  std::size_t last = 0;
  for (std::size_t i = 0; i < roc.size() && roc[i].far <= target_far; ++i) last = i;
  const auto& a = roc[last];
  if (a.far == target_far || last + 1 == roc.size()) return a.frr;
  const auto& b = roc[last + 1];
  const double s = (target_far - a.far) / (b.far - a.far);
  return a.frr + s * (b.frr - a.frr);
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& p : r.roc) {
    roc.push_back({p.far, p.frr, std::isfinite(p.threshold) ? nlohmann::json(p.threshold) : nlohmann::json(nullptr)});
  }
  return {{"schema", "cogan.report/" + std::to_string(VerificationReport::kSchemaVersion)},
          {"auc", r.auc},
          {"eer", r.eer},
          {"frr_at_far_1pct", r.frr_at_far_1pct},
          {"frr_at_far_10pct", r.frr_at_far_10pct},
          {"counts", {{"genuine", r.genuine_pairs}, {"imposter", r.imposter_pairs}}},
          {"protocol_hash", r.protocol_hash},
          {"config", r.config},
          {"roc_columns", {"far", "frr", "threshold"}},
          {"roc", std::move(roc)}};
}

VerificationReport verification_report_from_json(const nlohmann::json& doc) {
  const auto schema = doc.value("schema", std::string{});
  if (schema != "cogan.report/" + std::to_string(VerificationReport::kSchemaVersion)) {
    reject("unsupported report schema: " + schema);
  }
  VerificationReport r;
  r.auc = doc.at("auc").get<double>();
  r.eer = doc.at("eer").get<double>();
  r.frr_at_far_1pct = doc.at("frr_at_far_1pct").get<double>();
  r.frr_at_far_10pct = doc.at("frr_at_far_10pct").get<double>();
  r.genuine_pairs = doc.at("counts").at("genuine").get<std::uint64_t>();
  r.imposter_pairs = doc.at("counts").at("imposter").get<std::uint64_t>();
  r.protocol_hash = doc.value("protocol_hash", std::string{});
  r.config = doc.value("config", nlohmann::json::object());
  for (const auto& p : doc.at("roc")) {
    r.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                     p.at(2).is_null() ? -std::numeric_limits<double>::infinity() : p.at(2).get<double>()});
  }
  return r;
}

}  // namespace cogan::evaluation

#pragma once

#include <filesystem>

#include "cogan/evaluation/roc.hpp"

namespace cogan::evaluation {

/// Writes `report.json`, `roc.png` and, when scores are given, `scores.csv`
/// (columns: vis_record, nir_record, distance, label).
void emit_report(const VerificationReport& report, const std::filesystem::path& out,
                 const ScoreSet* scores = nullptr);

VerificationReport load_report(const std::filesystem::path& file);

/// ROC curve (FAR vs. 1 − FRR) as a PNG.
void render_roc_png(const VerificationReport& report, const std::filesystem::path& file);

}  // namespace cogan::evaluation

#include "cogan/evaluation/report.hpp"

#include <cstdio>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cogan/error.hpp"
#include "cogan/util/config.hpp"

namespace fs = std::filesystem;

namespace cogan::evaluation {

void render_roc_png(const VerificationReport& report, const fs::path& file) {
  constexpr int kSize = 480;
  constexpr int kMargin = 48;
  constexpr int kPlot = kSize - 2 * kMargin;
  cv::Mat canvas(kSize, kSize, CV_8UC3, cv::Scalar(255, 255, 255));
  auto at = [&](double far, double tar) {
    return cv::Point(kMargin + static_cast<int>(std::lround(far * kPlot)),
                     kSize - kMargin - static_cast<int>(std::lround(tar * kPlot)));
  };

  cv::rectangle(canvas, at(0, 0), at(1, 1), cv::Scalar(0, 0, 0), 1);
  cv::line(canvas, at(0, 0), at(1, 1), cv::Scalar(180, 180, 180), 1, cv::LINE_AA);
  for (int t = 1; t < 10; ++t) {
    cv::line(canvas, at(t / 10.0, 0), at(t / 10.0, 0.015), cv::Scalar(0, 0, 0), 1);
    cv::line(canvas, at(0, t / 10.0), at(0.015, t / 10.0), cv::Scalar(0, 0, 0), 1);
  }

  std::vector<cv::Point> curve;
  curve.reserve(report.roc.size());
  for (const auto& p : report.roc) {
    auto pt = at(p.far, 1.0 - p.frr);
    if (curve.empty() || curve.back() != pt) curve.push_back(pt);
  }
  cv::polylines(canvas, curve, false, cv::Scalar(200, 80, 20), 2, cv::LINE_AA);

  char label[96];
  std::snprintf(label, sizeof(label), "AUC %.4f  EER %.4f", report.auc, report.eer);
  cv::putText(canvas, label, {kMargin + 10, kMargin + 24}, cv::FONT_HERSHEY_SIMPLEX, 0.55, cv::Scalar(0, 0, 0), 1,
              cv::LINE_AA);
  cv::putText(canvas, "FAR", {kSize / 2 - 16, kSize - 14}, cv::FONT_HERSHEY_SIMPLEX, 0.5, cv::Scalar(0, 0, 0), 1,
              cv::LINE_AA);
  cv::putText(canvas, "1-FRR", {4, kMargin - 12}, cv::FONT_HERSHEY_SIMPLEX, 0.5, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);

  if (!cv::imwrite(file.string(), canvas)) fail("cannot write " + file.string());
}

void emit_report(const VerificationReport& report, const fs::path& out, const ScoreSet* scores) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) fail("cannot create report directory " + out.string());
  util::write_json(out / "report.json", to_json(report));
  render_roc_png(report, out / "roc.png");
  if (scores) {
    std::ofstream csv(out / "scores.csv", std::ios::trunc);
    if (!csv) fail("cannot write " + (out / "scores.csv").string());
    csv << "vis_record,nir_record,distance,label\n";
    char buf[64];
    for (std::size_t i = 0; i < scores->distances.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", scores->distances[i]);
      const auto& p = i < scores->pairs.size() ? scores->pairs[i] : data::PairId{};
      csv << p.vis << ',' << p.nir << ',' << buf << ',' << scores->labels[i] << '\n';
    }
  }
}

VerificationReport load_report(const fs::path& file) { return verification_report_from_json(util::read_json(file)); }

}  // namespace cogan::evaluation
